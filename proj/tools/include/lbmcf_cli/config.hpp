#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lbmcf/flow_engine.hpp"

namespace lbmcf::cli {

/// Raised for unreadable files, unknown keys and malformed values. The message
/// names the offending line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a subcommand needs. Parsed from a flat `key = value` file:
///
///   n = 16                       grid points per real dimension
///   scheme = rk4                 rk4 | euler | imex
///   cfl_sigma = 0.2
///   dt = 0                       0 selects the CFL step
///   t_max = 40
///   residual_tol = 1e-10         L2 dHYM residual stopping threshold
///   sample_interval = 0.0078125
///   seed = 1
///   hypercritical = true
///   alpha = 1 0 0 1              a11 re(a12) im(a12) a22
///   f_hat = 3 0 0 3              same layout
///   bump_amplitude = 0.1
///   bump_modes = s1:c0:s1:c0     comma separated mode list
///   init_amplitude = 0
///   init_modes =
///   init_noise = 0               amplitude of seeded band-limited noise
///   init_noise_kmax = 2
///   newton_tol = 1e-10
///
/// '#' starts a comment. Unknown or repeated keys are rejected.
struct RunConfig {
  FlowConfig flow;
  NewtonOptions newton;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Renders a config in the file format (round-trips through parse_config).
std::string format_config(const RunConfig& config);

}  // namespace lbmcf::cli
