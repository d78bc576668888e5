// cmdp: command-line front end. Every subcommand reads an experiment config
// (or an instance shortcut) and writes plain files into --out.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmdp/config.hpp"
#include "cmdp/envs.hpp"
#include "cmdp/errors.hpp"
#include "cmdp/harness.hpp"
#include "cmdp/lp_oracle.hpp"
#include "cmdp/policy_io.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3, kBlowup = 4, kNumerical = 5 };

struct Common {
  std::string config;
  std::string out = "out";
  std::string seeds;
  std::string instance;
  std::string cmdp_file;
  bool renormalize = false;
  bool multi_prune = false;
  int threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "experiment config (JSON)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--instance", c.instance, "bundled instance: toy, synthetic or grid");
  app->add_option("--cmdp", c.cmdp_file, "CMDP file, overrides the config instance");
  app->add_flag("--renormalize", c.renormalize, "rescale transition rows that do not sum to one");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw cmdp::ConfigError("bad seed '" + item + "' in --seeds");
    }
  }
  if (seeds.empty()) throw cmdp::ConfigError("--seeds is empty");
  return seeds;
}

cmdp::ExperimentConfig resolve(const Common& c) {
  cmdp::ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = cmdp::load_config(c.config);
  } else if (!c.instance.empty()) {
    cfg = cmdp::config_from_json(json{{"instance", {{"kind", c.instance}}}});
  }
  if (!c.cmdp_file.empty()) {
    cfg.instance.kind = "file";
    cfg.instance.path = c.cmdp_file;
  } else if (!c.instance.empty() && cfg.instance.kind != c.instance) {
    cfg.instance.kind = c.instance;
  }
  if (c.renormalize) cfg.instance.renormalize = true;
  if (c.multi_prune) cfg.pri.multi_prune = true;
  if (c.threads > 0) cfg.threads = c.threads;
  if (!c.seeds.empty()) cfg.seeds = parse_seeds(c.seeds);
  cfg.out_dir = c.out;
  cmdp::validate_config(cfg);
  return cfg;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path);
  if (!f) throw cmdp::Error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

json vec(const std::vector<double>& v) { return json(v); }

int cmd_solve(const Common& c) {
  const auto cfg = resolve(c);
  const auto model = cmdp::make_instance(cfg.instance);
  const auto sol = cmdp::solve_cmdp_exact(model);
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  cmdp::save_policy(sol.policy, (out / "policy.txt").string(), {"optimal policy from the occupancy LP"});
  {
    std::ofstream f(out / "occupancy.csv");
    f << "h,x,a,q\n";
    char buf[32];
    for (int h = 0; h < model.horizon(); ++h)
      for (int x = 0; x < model.num_states(); ++x)
        for (int a = 0; a < model.num_actions(); ++a) {
          std::snprintf(buf, sizeof buf, "%.17g", sol.occupancy.mass(h, x, a));
          f << h << ',' << x << ',' << a << ',' << buf << '\n';
        }
  }
  json summary{{"V_star", sol.value},
               {"W_star", vec(sol.utilities)},
               {"rho", vec(model.tables().thresholds)},
               {"nonzero_count", sol.nonzero_count},
               {"nonzero_bound", model.num_decisions() + model.num_constraints()},
               {"stochastic_count", sol.stochastic_count},
               {"simplex_iterations", sol.lp.iterations}};
  write_json(out / "summary.json", summary);
  std::cout << "V* = " << sol.value << ", stochastic decisions = " << sol.stochastic_count << '\n';
  return kOk;
}

int cmd_run(const Common& c) {
  const auto cfg = resolve(c);
  if (cfg.algorithm == "lp-solve") return cmd_solve(c);
  const auto model = cmdp::make_instance(cfg.instance);
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_json(out / "config.json", cmdp::config_to_json(cfg));

  cmdp::RngStream probe_rng(cfg.instance.seed ^ 0x5eedULL);
  const auto report = cmdp::assumption_probe(model, probe_rng);
  write_json(out / "assumptions.json",
             json{{"min_positive_q", report.min_positive_q},
                  {"eps", cfg.pri.eps},
                  {"eps_ok", report.eps_ok(cfg.pri.eps)},
                  {"min_weight", report.min_weight},
                  {"eps_prime", cfg.pri.eps_prime},
                  {"eps_prime_ok", report.eps_prime_ok(cfg.pri.eps_prime)},
                  {"p_min", report.p_min},
                  {"greedy_policies", report.greedy_policies},
                  {"gap_ratio_min", report.gap_ratio_min},
                  {"reward_gap_ratio_min", report.reward_gap_ratio_min},
                  {"gap_samples", report.gap_samples}});

  const auto res = cmdp::run_experiment(cfg, model, true);
  json seeds = json::array();
  int failures = 0;
  for (const auto& s : res.seeds) {
    json entry{{"seed", s.seed}, {"ok", s.ok}};
    if (!s.ok) {
      ++failures;
      entry["error"] = s.error;
      std::cerr << s.error << '\n';
    } else {
      entry["episodes"] = s.episodes;
      entry["final_cum_regret"] = s.final_regret;
      entry["final_cum_violation"] = vec(s.final_violation);
      if (s.policy) {
        cmdp::save_policy(*s.policy, (out / ("policy_seed" + std::to_string(s.seed) + ".txt")).string(),
                          {"learned policy, seed " + std::to_string(s.seed)});
        entry["policy_value"] = s.policy_value;
        entry["policy_utilities"] = vec(s.policy_utilities);
        entry["optimality_gap"] = res.v_star - s.policy_value;
      }
    }
    seeds.push_back(entry);
  }
  write_json(out / "summary.json",
             json{{"algorithm", cfg.algorithm}, {"V_star", res.v_star}, {"W_star", vec(res.w_star)}, {"seeds", seeds}});
  std::cout << cfg.algorithm << ": " << res.seeds.size() - failures << "/" << res.seeds.size()
            << " seeds completed, outputs in " << cfg.out_dir << '\n';
  return failures ? kFailure : kOk;
}

int cmd_decompose(const Common& c, const std::string& policy_path) {
  const auto cfg = resolve(c);
  const auto model = cmdp::make_instance(cfg.instance);
  const auto policy = cmdp::load_policy(policy_path);
  if (policy.horizon() != model.horizon() || policy.num_states() != model.num_states() ||
      policy.num_actions() != model.num_actions()) {
    throw cmdp::DimensionError("policy shape does not match the instance");
  }
  // Decompose over the policy's own positive entries, reachable or not.
  cmdp::SupportMap own(policy.horizon(), policy.num_states(), policy.num_actions());
  for (int h = 0; h < policy.horizon(); ++h)
    for (int x = 0; x < policy.num_states(); ++x) {
      std::vector<int> set;
      for (int a = 0; a < policy.num_actions(); ++a)
        if (policy.prob(h, x, a) > 0.0) set.push_back(a);
      own.set(h, x, set);
    }
  const auto mix = cmdp::decompose(policy, own, static_cast<std::size_t>(cfg.pri.greedy_cap));
  const auto mixed = cmdp::mixture_occupancy(model, mix);
  const auto target = cmdp::occupancy_of_policy(model, policy);
  double err = 0.0;
  for (std::size_t i = 0; i < mixed.values().size(); ++i) err += std::abs(mixed.values()[i] - target.values()[i]);
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / "decomposition.txt");
  cmdp::write_greedy_mix(f, mix, err);
  std::cout << mix.policies.size() << " greedy policies, L1 error " << err << '\n';
  return kOk;
}

struct GenArgs {
  std::string kind = "random";
  int S = 3, A = 3, H = 3, N = 1;
  std::uint64_t seed = 0;
  bool unique = false;
  std::string output;
};

int cmd_gen(const GenArgs& g, const Common& c) {
  cmdp::InstanceSpec spec;
  spec.kind = g.kind;
  spec.S = g.S;
  spec.A = g.A;
  spec.H = g.H;
  spec.N = g.N;
  spec.seed = g.seed;
  spec.unique_solution = g.unique;
  spec.path = c.cmdp_file;
  if (g.kind == "file") throw cmdp::ConfigError("gen does not copy files");
  const fs::path path = g.output.empty() ? fs::path(c.out) / (g.kind + ".json") : fs::path(g.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (g.kind == "synthetic") {
    // The bundled benchmark keeps its printed values and the renormalize flag.
    write_json(path, cmdp::synthetic_cmdp_json());
  } else {
    cmdp::save_cmdp(cmdp::make_instance(spec), path.string());
  }
  std::cout << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_probe(const Common& c) {
  const auto cfg = resolve(c);
  const auto model = cmdp::make_instance(cfg.instance);
  cmdp::RngStream rng(cfg.seeds.front());
  const auto r = cmdp::assumption_probe(model, rng);
  fs::create_directories(cfg.out_dir);
  json doc{{"min_positive_q", r.min_positive_q}, {"eps", cfg.pri.eps},
           {"eps_ok", r.eps_ok(cfg.pri.eps)},    {"min_weight", r.min_weight},
           {"eps_prime", cfg.pri.eps_prime},     {"eps_prime_ok", r.eps_prime_ok(cfg.pri.eps_prime)},
           {"p_min", r.p_min},                   {"greedy_policies", r.greedy_policies},
           {"gap_ratio_min", r.gap_ratio_min},   {"reward_gap_ratio_min", r.reward_gap_ratio_min},
           {"gap_samples", r.gap_samples}};
  write_json(fs::path(cfg.out_dir) / "assumptions.json", doc);
  std::cout << doc.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular constrained-MDP workbench"};
  app.require_subcommand(1);

  Common solve_c, run_c, dec_c, gen_c, probe_c;
  auto* solve = app.add_subcommand("solve", "exact LP solution of an instance");
  add_common(solve, solve_c);

  auto* run = app.add_subcommand("run", "run PRI or Triple-Q over seeds");
  add_common(run, run_c);
  run->add_option("--seeds", run_c.seeds, "comma-separated seed list");
  run->add_option("--threads", run_c.threads, "concurrent seeds");
  run->add_flag("--multi-prune", run_c.multi_prune, "insert multi-solution pruning after phase 1");

  std::string policy_path;
  auto* dec = app.add_subcommand("decompose", "split a policy into weighted greedy policies");
  add_common(dec, dec_c);
  dec->add_option("--policy", policy_path, "policy file")->required();

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "write an instance file");
  gen->add_option("--kind", gen_args.kind, "random, toy, synthetic or grid");
  gen->add_option("--S", gen_args.S);
  gen->add_option("--A", gen_args.A);
  gen->add_option("--H", gen_args.H);
  gen->add_option("--N", gen_args.N);
  gen->add_option("--seed", gen_args.seed);
  gen->add_flag("--unique", gen_args.unique, "accept only instances with a stable optimal support");
  gen->add_option("--output", gen_args.output, "output file");
  gen->add_option("--out", gen_c.out, "output directory when --output is not given");
  gen->add_option("--map", gen_c.cmdp_file, "map file for --kind grid");

  auto* probe = app.add_subcommand("probe", "assumption report for an instance");
  add_common(probe, probe_c);
  probe->add_option("--seeds", probe_c.seeds, "seed for the sampled quantities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_c);
    if (*run) return cmd_run(run_c);
    if (*dec) return cmd_decompose(dec_c, policy_path);
    if (*gen) return cmd_gen(gen_args, gen_c);
    if (*probe) return cmd_probe(probe_c);
  } catch (const cmdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const cmdp::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfig;
  } catch (const cmdp::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const cmdp::BlowupError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kBlowup;
  } catch (const cmdp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
