#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "cmdp/core.hpp"
#include "cmdp/rng.hpp"

namespace cmdp {

/// Parses the CMDP document (keys S, A, H, N, x_ini, rho, P, r, g, renormalize).
/// Rows are renormalized when the file or the caller asks for it and the row
/// sum lies in [0.5, 2]. Errors name the offending field and index.
TabularCmdp cmdp_from_json(const nlohmann::json& doc, bool renormalize = false);
nlohmann::json cmdp_to_json(const TabularCmdp& cmdp);

TabularCmdp load_cmdp(const std::string& path, bool renormalize = false);
void save_cmdp(const TabularCmdp& cmdp, const std::string& path);

/// H=1, S=1, A=2, r=(1,0), g=(0,1), rho=0.5.
TabularCmdp toy_cmdp();

/// The 3x3x3 single-constraint benchmark with rho = 2. Rows for the third
/// state are uniform and every row is renormalized.
TabularCmdp synthetic_cmdp();
/// The same data before renormalization, as the bundled JSON document.
nlohmann::json synthetic_cmdp_json();

struct RandomCmdpOptions {
  /// Position of rho between the unconstrained optimum's utility and the
  /// maximum achievable utility.
  double rho_low = 0.2;
  double rho_high = 0.8;
  bool unique_solution = false;
  double tie_noise = 1e-6;
  int max_attempts = 200;
};

/// Dirichlet(1) transitions, uniform rewards and utilities. Throws
/// ValidationError when no acceptable instance is found within max_attempts.
TabularCmdp random_cmdp(int S, int A, int H, int N, RngStream& rng, const RandomCmdpOptions& opts = {});

/// Parses an ASCII map of S, G, # and '.' into a grid CMDP with five actions
/// (up, down, left, right, stay) and one obstacle constraint with rho = H - 0.5.
TabularCmdp gridworld_cmdp(std::string_view map_text, int H);

/// Five-by-five default map whose short route crosses an obstacle.
std::string_view default_grid_map();

/// Appends a copy of `action` as a new last action.
TabularCmdp with_duplicated_action(const TabularCmdp& cmdp, int action);

}  // namespace cmdp
