#include "cmdp/policy_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmdp/errors.hpp"

namespace cmdp {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool next_data_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

void write_policy(std::ostream& out, const MarkovPolicy& policy, const std::vector<std::string>& comments) {
  out << "# cmdp policy\n";
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "# rows: h x p(a=0) ... p(a=A-1)\n";
  out << policy.horizon() << ' ' << policy.num_states() << ' ' << policy.num_actions() << '\n';
  for (int h = 0; h < policy.horizon(); ++h) {
    for (int x = 0; x < policy.num_states(); ++x) {
      out << h << ' ' << x;
      for (double p : policy.row(h, x)) out << ' ' << num(p);
      out << '\n';
    }
  }
}

MarkovPolicy read_policy(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_data_line(in, line, lineno)) throw ParseError("policy file has no header line");
  int H = 0, S = 0, A = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> H >> S >> A) || H <= 0 || S <= 0 || A <= 0) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 'H S A'");
    }
  }
  std::vector<double> probs(static_cast<std::size_t>(H) * S * A, 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(H) * S, false);
  for (int row = 0; row < H * S; ++row) {
    if (!next_data_line(in, line, lineno)) {
      throw ParseError("policy file ends after " + std::to_string(row) + " of " + std::to_string(H * S) + " rows");
    }
    std::istringstream ss(line);
    int h = -1, x = -1;
    if (!(ss >> h >> x) || h < 0 || h >= H || x < 0 || x >= S) {
      throw ParseError("line " + std::to_string(lineno) + ": bad (h, x) index");
    }
    const std::size_t d = static_cast<std::size_t>(h) * S + x;
    if (seen[d]) throw ParseError("line " + std::to_string(lineno) + ": duplicate row for (h, x)");
    seen[d] = true;
    for (int a = 0; a < A; ++a) {
      if (!(ss >> probs[d * A + a])) {
        throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(A) + " probabilities");
      }
    }
  }
  try {
    return MarkovPolicy(H, S, A, std::move(probs));
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

void save_policy(const MarkovPolicy& policy, const std::string& path, const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_policy(out, policy, comments);
}

MarkovPolicy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open policy file " + path);
  try {
    return read_policy(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_greedy_mix(std::ostream& out, const GreedyMix& mix, double l1_error) {
  out << "# greedy decomposition\n";
  out << "# members " << mix.policies.size() << '\n';
  out << "# l1_error " << num(l1_error) << '\n';
  for (std::size_t m = 0; m < mix.policies.size(); ++m) {
    const auto& g = mix.policies[m];
    out << "# member " << m << " weight " << num(mix.weights[m]) << '\n';
    for (int h = 0; h < g.horizon(); ++h)
      for (int x = 0; x < g.num_states(); ++x) out << h << ' ' << x << ' ' << g.action(h, x) << '\n';
  }
}

}  // namespace cmdp
