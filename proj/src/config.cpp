#include "cmdp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cmdp/envs.hpp"
#include "cmdp/errors.hpp"

namespace cmdp {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

// Episode counts may be written as 1e5 in the document.
void read_count(const json& obj, const char* key, std::int64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (d != std::floor(d) || d < 0 || d > 9e15) throw ConfigError(std::string("'") + key + "' must be a whole count");
  out = static_cast<std::int64_t>(d);
}

void read_count(const json& obj, const char* key, int& out) {
  std::int64_t v = out;
  read_count(obj, key, v);
  if (v > 2000000000) throw ConfigError(std::string("'") + key + "' is too large");
  out = static_cast<int>(v);
}

// Schedules that follow the experiment section when the document leaves them out.
PriParams schedule_for(const std::string& kind) {
  PriParams p;
  if (kind == "synthetic") {
    p.K = 1000000;
    p.prune_episodes = 100000;
    p.identify = false;
  } else if (kind == "grid") {
    p.K = 5000000;
    p.prune_episodes = 200000;
  }
  return p;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be an object");
  reject_unknown(doc,
                 {"name", "instance", "algorithm", "K", "eps", "eps_prime", "c_rad", "radius_log_sqrt_k",
                  "prune_episodes", "refine_rounds", "refine_episodes", "identify_rounds", "identify_episodes",
                  "identify", "probe_episodes", "greedy_cap", "multi_prune", "triple_q", "tq_episodes", "seeds",
                  "threads", "out", "bucket", "csv_stride"},
                 "config");
  ExperimentConfig cfg;
  read(doc, "name", cfg.name);
  if (doc.contains("instance")) {
    const json& in = doc.at("instance");
    if (!in.is_object()) throw ConfigError("'instance' must be an object");
    reject_unknown(in, {"kind", "path", "renormalize", "S", "A", "H", "N", "seed", "unique_solution",
                        "duplicate_action"},
                   "instance");
    auto& s = cfg.instance;
    read(in, "kind", s.kind);
    read(in, "path", s.path);
    read(in, "renormalize", s.renormalize);
    read(in, "S", s.S);
    read(in, "A", s.A);
    read(in, "H", s.H);
    read(in, "N", s.N);
    read(in, "seed", s.seed);
    read(in, "unique_solution", s.unique_solution);
    read(in, "duplicate_action", s.duplicate_action);
    if (s.kind == "grid" && !in.contains("H")) s.H = 6;
  }
  read(doc, "algorithm", cfg.algorithm);

  auto& p = cfg.pri;
  p = schedule_for(cfg.instance.kind);
  read_count(doc, "K", p.K);
  read(doc, "eps", p.eps);
  read(doc, "eps_prime", p.eps_prime);
  read(doc, "c_rad", p.c_rad);
  read(doc, "radius_log_sqrt_k", p.radius_log_sqrt_k);
  read_count(doc, "prune_episodes", p.prune_episodes);
  read_count(doc, "refine_rounds", p.refine_rounds);
  read_count(doc, "refine_episodes", p.refine_episodes);
  read_count(doc, "identify_rounds", p.identify_rounds);
  read_count(doc, "identify_episodes", p.identify_episodes);
  read(doc, "identify", p.identify);
  read_count(doc, "probe_episodes", p.probe_episodes);
  read(doc, "greedy_cap", p.greedy_cap);
  read(doc, "multi_prune", p.multi_prune);
  if (doc.contains("triple_q")) {
    const json& tq = doc.at("triple_q");
    if (!tq.is_object()) throw ConfigError("'triple_q' must be an object");
    reject_unknown(tq, {"bonus_scale", "lr_offset", "eta", "delta", "delta_scale", "queue_step", "frame_exponent",
                        "frame_length", "min_frames", "reset_each_frame"},
                   "triple_q");
    auto& t = p.triple_q;
    read(tq, "bonus_scale", t.bonus_scale);
    read(tq, "lr_offset", t.lr_offset);
    read(tq, "eta", t.eta);
    read(tq, "delta", t.delta);
    read(tq, "delta_scale", t.delta_scale);
    read(tq, "queue_step", t.queue_step);
    read(tq, "frame_exponent", t.frame_exponent);
    read_count(tq, "frame_length", t.frame_length);
    read_count(tq, "min_frames", t.min_frames);
    read(tq, "reset_each_frame", t.reset_each_frame);
  }
  read_count(doc, "tq_episodes", cfg.tq_episodes);
  read(doc, "seeds", cfg.seeds);
  read(doc, "threads", cfg.threads);
  read(doc, "out", cfg.out_dir);
  read_count(doc, "bucket", cfg.bucket);
  read_count(doc, "csv_stride", cfg.csv_stride);
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  static const std::set<std::string> kinds = {"toy", "synthetic", "file", "random", "grid"};
  static const std::set<std::string> algorithms = {"pri", "tripleq", "lp-solve"};
  if (!kinds.count(cfg.instance.kind)) throw ConfigError("unknown instance kind '" + cfg.instance.kind + "'");
  if (!algorithms.count(cfg.algorithm)) throw ConfigError("unknown algorithm '" + cfg.algorithm + "'");
  if (cfg.instance.kind == "file" && cfg.instance.path.empty()) throw ConfigError("file instance needs 'path'");
  if (cfg.pri.K < 4) throw ConfigError("K must be at least 4");
  if (!(cfg.pri.eps > 0.0 && cfg.pri.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (!(cfg.pri.eps_prime > 0.0 && cfg.pri.eps_prime < 1.0)) throw ConfigError("eps_prime must lie in (0, 1)");
  if (!(cfg.pri.c_rad >= 0.0)) throw ConfigError("c_rad must be nonnegative");
  if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.csv_stride < 1) throw ConfigError("csv_stride must be at least 1");
  if (cfg.pri.greedy_cap < 1) throw ConfigError("greedy_cap must be positive");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  const auto& p = cfg.pri;
  const auto& t = p.triple_q;
  const auto& s = cfg.instance;
  json doc;
  doc["name"] = cfg.name;
  doc["instance"] = {{"kind", s.kind},         {"path", s.path}, {"renormalize", s.renormalize},
                     {"S", s.S},               {"A", s.A},       {"H", s.H},
                     {"N", s.N},               {"seed", s.seed}, {"unique_solution", s.unique_solution},
                     {"duplicate_action", s.duplicate_action}};
  doc["algorithm"] = cfg.algorithm;
  doc["K"] = p.K;
  doc["eps"] = p.eps;
  doc["eps_prime"] = p.eps_prime;
  doc["c_rad"] = p.c_rad;
  doc["radius_log_sqrt_k"] = p.radius_log_sqrt_k;
  doc["prune_episodes"] = p.prune_episodes;
  doc["refine_rounds"] = p.refine_rounds;
  doc["refine_episodes"] = p.refine_episodes;
  doc["identify_rounds"] = p.identify_rounds;
  doc["identify_episodes"] = p.identify_episodes;
  doc["identify"] = p.identify;
  doc["probe_episodes"] = p.probe_episodes;
  doc["greedy_cap"] = p.greedy_cap;
  doc["multi_prune"] = p.multi_prune;
  doc["triple_q"] = {{"bonus_scale", t.bonus_scale}, {"lr_offset", t.lr_offset},
                     {"eta", t.eta},                 {"delta", t.delta},
                     {"delta_scale", t.delta_scale}, {"queue_step", t.queue_step},
                     {"frame_exponent", t.frame_exponent}, {"frame_length", t.frame_length},
                     {"min_frames", t.min_frames},   {"reset_each_frame", t.reset_each_frame}};
  doc["tq_episodes"] = cfg.tq_episodes;
  doc["seeds"] = cfg.seeds;
  doc["threads"] = cfg.threads;
  doc["out"] = cfg.out_dir;
  doc["bucket"] = cfg.bucket;
  doc["csv_stride"] = cfg.csv_stride;
  return doc;
}

TabularCmdp make_instance(const InstanceSpec& spec) {
  auto build = [&]() -> TabularCmdp {
    if (spec.kind == "toy") return toy_cmdp();
    if (spec.kind == "synthetic") return synthetic_cmdp();
    if (spec.kind == "file") return load_cmdp(spec.path, spec.renormalize);
    if (spec.kind == "random") {
      RngStream rng(spec.seed);
      RandomCmdpOptions opts;
      opts.unique_solution = spec.unique_solution;
      return random_cmdp(spec.S, spec.A, spec.H, spec.N, rng, opts);
    }
    if (spec.kind == "grid") {
      if (spec.path.empty()) return gridworld_cmdp(default_grid_map(), spec.H);
      std::ifstream in(spec.path);
      if (!in) throw ParseError("cannot open map file " + spec.path);
      std::stringstream ss;
      ss << in.rdbuf();
      return gridworld_cmdp(ss.str(), spec.H);
    }
    throw ConfigError("unknown instance kind '" + spec.kind + "'");
  };
  TabularCmdp cmdp = build();
  if (spec.duplicate_action >= 0) return with_duplicated_action(cmdp, spec.duplicate_action);
  return cmdp;
}

std::int64_t pri_schedule_length(const PriParams& p) {
  const std::int64_t root = sqrt_budget(p.K);
  auto pick = [&](int v) -> std::int64_t { return v > 0 ? v : root; };
  std::int64_t total = pick(p.prune_episodes) + pick(p.refine_rounds) * pick(p.refine_episodes);
  if (p.identify) total += pick(p.identify_rounds) * pick(p.identify_episodes);
  return total;
}

}  // namespace cmdp
