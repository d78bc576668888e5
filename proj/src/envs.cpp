#include "cmdp/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cmdp/errors.hpp"
#include "cmdp/lp_oracle.hpp"

namespace cmdp {

using nlohmann::json;

namespace {

std::string index_path(const std::string& name, const std::vector<int>& idx) {
  std::string s = name;
  for (int i : idx) s += "[" + std::to_string(i) + "]";
  return s;
}

// Flattens a nested array of the given shape in row-major order.
void read_tensor(const json& node, const std::string& name, const std::vector<int>& shape, std::size_t depth,
                 std::vector<int>& idx, std::vector<double>& out) {
  if (depth == shape.size()) {
    if (!node.is_number()) throw ParseError(index_path(name, idx) + " is not a number");
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || node.size() != static_cast<std::size_t>(shape[depth])) {
    throw ParseError(index_path(name, idx) + " must be an array of length " + std::to_string(shape[depth]));
  }
  for (int i = 0; i < shape[depth]; ++i) {
    idx.push_back(i);
    read_tensor(node[i], name, shape, depth + 1, idx, out);
    idx.pop_back();
  }
}

std::vector<double> tensor(const json& doc, const std::string& key, const std::vector<int>& shape) {
  if (!doc.contains(key)) throw ParseError("missing field '" + key + "'");
  std::vector<double> out;
  std::vector<int> idx;
  read_tensor(doc.at(key), key, shape, 0, idx, out);
  return out;
}

int integer(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ParseError("missing field '" + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw ParseError("field '" + key + "' must be an integer");
  return v.get<int>();
}

json nest(const std::vector<double>& flat, const std::vector<int>& shape, std::size_t depth, std::size_t& pos) {
  if (depth == shape.size()) return flat[pos++];
  json arr = json::array();
  for (int i = 0; i < shape[depth]; ++i) arr.push_back(nest(flat, shape, depth + 1, pos));
  return arr;
}

json nest(const std::vector<double>& flat, const std::vector<int>& shape) {
  std::size_t pos = 0;
  return nest(flat, shape, 0, pos);
}

// Backward induction for the greedy policy maximizing sum_k weight[k] * signal_k,
// where signal 0 is the reward and signal n+1 is utility n.
GreedyPolicy best_response(const TabularCmdp& cmdp, const std::vector<double>& weight) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions();
  std::vector<double> v_next(S, 0.0), v(S, 0.0);
  std::vector<int> actions(cmdp.num_decisions(), 0);
  for (int h = H - 1; h >= 0; --h) {
    for (int x = 0; x < S; ++x) {
      double best = -1e300;
      for (int a = 0; a < A; ++a) {
        double q = weight[0] * cmdp.reward(h, x, a);
        for (int n = 0; n < cmdp.num_constraints(); ++n) q += weight[n + 1] * cmdp.utility(n, h, x, a);
        if (h + 1 < H)
          for (const auto& t : cmdp.successors(h, x, a)) q += t.prob * v_next[t.next];
        if (q > best) {
          best = q;
          actions[cmdp.decision_index(h, x)] = a;
        }
      }
      v[x] = best;
    }
    std::swap(v, v_next);
  }
  return GreedyPolicy(H, S, A, std::move(actions));
}

}  // namespace

TabularCmdp cmdp_from_json(const json& doc, bool renormalize) {
  if (!doc.is_object()) throw ParseError("CMDP document must be an object");
  CmdpTables t;
  t.num_states = integer(doc, "S");
  t.num_actions = integer(doc, "A");
  t.horizon = integer(doc, "H");
  t.num_constraints = doc.contains("N") ? integer(doc, "N") : 0;
  t.initial_state = doc.contains("x_ini") ? integer(doc, "x_ini") : 0;
  const int H = t.horizon, S = t.num_states, A = t.num_actions, N = t.num_constraints;
  if (H <= 0 || S <= 0 || A <= 0 || N < 0) throw ParseError("S, A, H must be positive and N nonnegative");
  if (doc.contains("renormalize")) {
    if (!doc.at("renormalize").is_boolean()) throw ParseError("field 'renormalize' must be a boolean");
    renormalize = renormalize || doc.at("renormalize").get<bool>();
  }

  t.transitions = tensor(doc, "P", {H, S, A, S});
  t.rewards = tensor(doc, "r", {H, S, A});
  t.utilities = N > 0 ? tensor(doc, "g", {N, H, S, A}) : std::vector<double>{};
  t.thresholds = N > 0 ? tensor(doc, "rho", {N}) : std::vector<double>{};

  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < A; ++a) {
        double* row = &t.transitions[((static_cast<std::size_t>(h) * S + x) * A + a) * S];
        double sum = 0.0;
        for (int y = 0; y < S; ++y) sum += row[y];
        if (std::abs(sum - 1.0) <= kIdentityTol) continue;
        const std::string where = index_path("P", {h, x, a});
        if (!renormalize) {
          throw ParseError(where + " sums to " + std::to_string(sum) + " (enable renormalize to rescale)");
        }
        if (sum < 0.5 || sum > 2.0) {
          throw ParseError(where + " sums to " + std::to_string(sum) + ", outside the renormalizable range [0.5, 2]");
        }
        for (int y = 0; y < S; ++y) row[y] /= sum;
      }
    }
  }
  try {
    return TabularCmdp(std::move(t));
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

json cmdp_to_json(const TabularCmdp& cmdp) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions(), N = cmdp.num_constraints();
  const auto& t = cmdp.tables();
  json doc;
  doc["S"] = S;
  doc["A"] = A;
  doc["H"] = H;
  doc["N"] = N;
  doc["x_ini"] = cmdp.initial_state();
  doc["rho"] = t.thresholds;
  doc["P"] = nest(t.transitions, {H, S, A, S});
  doc["r"] = nest(t.rewards, {H, S, A});
  doc["g"] = N > 0 ? nest(t.utilities, {N, H, S, A}) : json::array();
  doc["renormalize"] = false;
  return doc;
}

TabularCmdp load_cmdp(const std::string& path, bool renormalize) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CMDP file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return cmdp_from_json(doc, renormalize);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_cmdp(const TabularCmdp& cmdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << cmdp_to_json(cmdp).dump(2) << '\n';
}

TabularCmdp toy_cmdp() {
  CmdpTables t;
  t.horizon = 1;
  t.num_states = 1;
  t.num_actions = 2;
  t.num_constraints = 1;
  t.transitions = {1.0, 1.0};
  t.rewards = {1.0, 0.0};
  t.utilities = {0.0, 1.0};
  t.thresholds = {0.5};
  return TabularCmdp(std::move(t));
}

namespace {

// Transition rows for states 1 and 2; row = (state, action), column = (step, next state).
constexpr std::array<std::array<double, 9>, 6> kSyntheticP = {{
    {0.3112981, 0.35107633, 0.27041442, 0.42626645, 0.04822746, 0.14663183, 0.4031534, 0.19783729, 0.39831431},
    {0.23314339, 0.32491141, 0.48360071, 0.24246185, 0.19021328, 0.43972054, 0.26457139, 0.21435897, 0.26256243},
    {0.45555851, 0.32401226, 0.24598487, 0.3312717, 0.76155926, 0.41364763, 0.33227521, 0.58780374, 0.33912326},
    {0.32676574, 0.35320112, 0.1300059, 0.35453348, 0.32114495, 0.40817113, 0.1762648, 0.30097191, 0.48437535},
    {0.11092341, 0.28034838, 0.45655888, 0.23441632, 0.2847394, 0.235718, 0.17239783, 0.37273618, 0.08000908},
    {0.56231085, 0.3664505, 0.41343525, 0.4110502, 0.39411565, 0.35611087, 0.65133738, 0.32629191, 0.43561556},
}};

// Row = step, column = (state, action).
constexpr std::array<std::array<double, 9>, 3> kSyntheticR = {{
    {0.5507979, 0.70814782, 0.29090474, 0.51082761, 0.89294695, 0.89629309, 0.12558531, 0.20724388, 0.0514672},
    {0.44080984, 0.02987621, 0.45683322, 0.64914405, 0.27848728, 0.6762549, 0.59086282, 0.02398188, 0.55885409},
    {0.25925245, 0.4151012, 0.28352508, 0.69313792, 0.44045372, 0.15686774, 0.54464902, 0.78031476, 0.30636353},
}};

constexpr std::array<std::array<double, 9>, 3> kSyntheticG = {{
    {0.22195788, 0.38797126, 0.93638365, 0.97599542, 0.67238368, 0.90283411, 0.84575087, 0.37799404, 0.09221701},
    {0.6534109, 0.55784076, 0.36156476, 0.2250545, 0.40651992, 0.46894025, 0.26923558, 0.29179277, 0.4576864},
    {0.86053391, 0.5862529, 0.28348786, 0.27797751, 0.45462208, 0.20541034, 0.20137871, 0.51403506, 0.08722937},
}};

}  // namespace

json synthetic_cmdp_json() {
  constexpr int H = 3, S = 3, A = 3;
  std::vector<double> P(H * S * A * S), r(H * S * A), g(H * S * A);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < A; ++a) {
        const int sa = (h * S + x) * A + a;
        for (int y = 0; y < S; ++y) P[sa * S + y] = x < 2 ? kSyntheticP[x * A + a][h * S + y] : 1.0 / 3.0;
        r[sa] = kSyntheticR[h][x * A + a];
        g[sa] = kSyntheticG[h][x * A + a];
      }
    }
  }
  json doc;
  doc["S"] = S;
  doc["A"] = A;
  doc["H"] = H;
  doc["N"] = 1;
  doc["x_ini"] = 0;
  doc["rho"] = {2.0};
  doc["P"] = nest(P, {H, S, A, S});
  doc["r"] = nest(r, {H, S, A});
  doc["g"] = json::array({nest(g, {H, S, A})});
  doc["renormalize"] = true;
  return doc;
}

TabularCmdp synthetic_cmdp() { return cmdp_from_json(synthetic_cmdp_json(), true); }

TabularCmdp random_cmdp(int S, int A, int H, int N, RngStream& rng, const RandomCmdpOptions& opts) {
  if (S < 1 || A < 1 || H < 1 || N < 0) throw ValidationError("random CMDP sizes must be positive");
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    CmdpTables t;
    t.horizon = H;
    t.num_states = S;
    t.num_actions = A;
    t.num_constraints = N;
    t.initial_state = 0;
    const std::size_t nsa = static_cast<std::size_t>(H) * S * A;
    t.transitions.resize(nsa * S);
    for (std::size_t i = 0; i < nsa; ++i) {
      double sum = 0.0;
      for (int y = 0; y < S; ++y) sum += t.transitions[i * S + y] = rng.exponential();
      for (int y = 0; y < S; ++y) t.transitions[i * S + y] /= sum;
    }
    t.rewards.resize(nsa);
    for (double& v : t.rewards) v = rng.uniform();
    t.utilities.resize(nsa * N);
    for (double& v : t.utilities) v = rng.uniform();
    t.thresholds.assign(N, 0.0);

    const TabularCmdp free(t);
    std::vector<double> wr(N + 1, 0.0);
    wr[0] = 1.0;
    const PolicyValue unconstrained = eval_greedy(free, best_response(free, wr));
    for (int n = 0; n < N; ++n) {
      std::vector<double> wg(N + 1, 0.0);
      wg[n + 1] = 1.0;
      const double w_max = eval_greedy(free, best_response(free, wg)).utilities[n];
      const double u = opts.rho_low + (opts.rho_high - opts.rho_low) * rng.uniform();
      t.thresholds[n] = unconstrained.utilities[n] + u * (w_max - unconstrained.utilities[n]);
    }

    try {
      // Positive slack: a slightly tighter instance must still be feasible.
      CmdpTables tight = t;
      for (double& rho : tight.thresholds) rho = std::min<double>(H, rho + 1e-3);
      solve_cmdp_exact(TabularCmdp(tight));

      if (opts.unique_solution) {
        for (double& v : t.rewards) v = std::clamp(v + opts.tie_noise * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
        const TabularCmdp base(t);
        const SupportMap ref = support_of(solve_cmdp_exact(base).occupancy, 1e-8);
        bool unique = true;
        for (int k = 0; k < 10 && unique; ++k) {
          CmdpTables jitter = t;
          for (double& v : jitter.rewards) {
            v = std::clamp(v + opts.tie_noise * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
          }
          unique = support_of(solve_cmdp_exact(TabularCmdp(jitter)).occupancy, 1e-8) == ref;
        }
        if (!unique) continue;
        return base;
      }
      return TabularCmdp(std::move(t));
    } catch (const InfeasibleError&) {
      continue;
    }
  }
  throw ValidationError("random CMDP rejection budget exhausted");
}

std::string_view default_grid_map() {
  return "S.#.G\n"
         "..#..\n"
         "..#..\n"
         ".....\n"
         ".....\n";
}

TabularCmdp gridworld_cmdp(std::string_view map_text, int H) {
  if (H < 1) throw ValidationError("grid horizon must be positive");
  std::vector<std::string> rows;
  std::istringstream in{std::string(map_text)};
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw ParseError("empty grid map");
  const int R = static_cast<int>(rows.size()), C = static_cast<int>(rows.front().size());
  int start = -1, goal = -1;
  for (int i = 0; i < R; ++i) {
    if (static_cast<int>(rows[i].size()) != C) {
      throw ParseError("grid map row " + std::to_string(i) + " has length " + std::to_string(rows[i].size()) +
                       ", expected " + std::to_string(C));
    }
    for (int j = 0; j < C; ++j) {
      const char ch = rows[i][j];
      if (ch == 'S') {
        if (start >= 0) throw ParseError("grid map has more than one 'S'");
        start = i * C + j;
      } else if (ch == 'G') {
        if (goal >= 0) throw ParseError("grid map has more than one 'G'");
        goal = i * C + j;
      } else if (ch != '#' && ch != '.') {
        throw ParseError(std::string("grid map has invalid character '") + ch + "' at row " + std::to_string(i) +
                         ", column " + std::to_string(j));
      }
    }
  }
  if (start < 0 || goal < 0) throw ParseError("grid map needs exactly one 'S' and one 'G'");

  const int S = R * C, A = 5;
  constexpr int dr[A] = {-1, 1, 0, 0, 0};
  constexpr int dc[A] = {0, 0, -1, 1, 0};
  const int gr = goal / C, gc = goal % C;
  auto dist = [&](int cell) { return std::hypot(cell / C - gr, cell % C - gc); };
  double dist_max = 0.0;
  for (int s = 0; s < S; ++s) dist_max = std::max(dist_max, dist(s));

  CmdpTables t;
  t.horizon = H;
  t.num_states = S;
  t.num_actions = A;
  t.num_constraints = 1;
  t.initial_state = start;
  const std::size_t nsa = static_cast<std::size_t>(H) * S * A;
  t.transitions.assign(nsa * S, 0.0);
  t.rewards.assign(nsa, 0.0);
  t.utilities.assign(nsa, 1.0);
  t.thresholds = {H - 0.5};
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const std::size_t i = (static_cast<std::size_t>(h) * S + s) * A + a;
        int dest = s;
        if (s != goal) {
          const int r2 = s / C + dr[a], c2 = s % C + dc[a];
          if (r2 >= 0 && r2 < R && c2 >= 0 && c2 < C) dest = r2 * C + c2;
        }
        t.transitions[i * S + dest] = 1.0;
        if (s == goal) continue;
        if (dest == goal) {
          t.rewards[i] = 1.0;
        } else if (h == H - 1) {
          t.rewards[i] = dist_max > 0.0 ? 1.0 - dist(dest) / dist_max : 0.0;
        }
        if (rows[dest / C][dest % C] == '#') t.utilities[i] = 0.0;
      }
    }
  }
  return TabularCmdp(std::move(t));
}

TabularCmdp with_duplicated_action(const TabularCmdp& cmdp, int action) {
  const int H = cmdp.horizon(), S = cmdp.num_states(), A = cmdp.num_actions(), N = cmdp.num_constraints();
  if (action < 0 || action >= A) throw ValidationError("duplicated action out of range");
  CmdpTables t;
  t.horizon = H;
  t.num_states = S;
  t.num_actions = A + 1;
  t.num_constraints = N;
  t.initial_state = cmdp.initial_state();
  t.thresholds = cmdp.tables().thresholds;
  const std::size_t nsa = static_cast<std::size_t>(H) * S * (A + 1);
  t.transitions.resize(nsa * S);
  t.rewards.resize(nsa);
  t.utilities.resize(nsa * N);
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a <= A; ++a) {
        const int src = a == A ? action : a;
        const std::size_t i = (static_cast<std::size_t>(h) * S + x) * (A + 1) + a;
        for (int y = 0; y < S; ++y) t.transitions[i * S + y] = cmdp.transition(h, x, src, y);
        t.rewards[i] = cmdp.reward(h, x, src);
        for (int n = 0; n < N; ++n) t.utilities[n * nsa + i] = cmdp.utility(n, h, x, src);
      }
    }
  }
  return TabularCmdp(std::move(t));
}

}  // namespace cmdp
