#pragma once

// Plain-text run configuration:
//
//   # comment            ; comment
//   [grid]     nx ny lx ly
//   [params]   nu1 nu2 theta theta0 chi alpha beta c0 gamma potential
//   [time]     dt t_end cfl_safety
//   [scenario] name noise phi_mean sigma_mean radius amplitude seed
//   [output]   cadence
//   [solver]   rel_tol max_iter mode newton_tol newton_max_iter
//   [stationary] rel_tol max_iter
//   [check]    tol
//
// Lines are `key = value`. Unknown sections or keys are errors; a repeated key
// keeps its last value and emits a warning. Overrides use `section.key=value`
// and are applied after the file.

#include <string>
#include <string_view>
#include <vector>

#include "chns/coupled.hpp"
#include "chns/stationary.hpp"

namespace chns {

struct AppConfig {
  RunConfig run{};
  StationaryConfig stationary{};
  double check_tol = 1e-10;
};

// Throws ConfigError (with the line number for syntax errors and the violated
// hypothesis for parameter constraints) or IoError.
AppConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});
AppConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides = {},
                            const std::string& origin = "<string>");

}  // namespace chns
