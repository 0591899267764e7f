#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lbmcf_cli/config.hpp"

namespace lbmcf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTimeLimit = 2;

inline constexpr const char* kTraceHeader =
    "t,theta_min,theta_max,v_max,V,I,J,res_dhym_sup,res_dhym_l2,res_ma_sup,dissipation,dt_used";

/// Writes the trace as CSV with 17 significant digits per value.
void write_trace_csv(std::ostream& out, const FlowTrace& trace);

/// Integrates the flow and writes trace.csv, final.snap and summary.json into
/// `out_dir`. Nothing is written unless the run finishes. Returns 0 when the
/// residual tolerance was reached, 2 when t_max was hit, 1 on any error.
int cmd_flow(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log,
             std::ostream& err);

/// Solves the dHYM equation by Newton iteration from the configured initial
/// potential; writes newton.snap and newton.json.
int cmd_newton(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log,
               std::ostream& err);

struct BlowupParams {
  double m = 2.0;
  double L = 1.0;
  std::vector<double> s_values{0.0, 0.05, 0.1};
  double tol = 1e-14;
};

/// Prints the blowup-family table as CSV to `out` (and to blowup.csv when
/// out_dir is given).
int cmd_blowup(const BlowupParams& params, const std::optional<std::filesystem::path>& out_dir,
               std::ostream& out, std::ostream& err);

/// Runs the identity suite against the configured background; one line per
/// check, nonzero exit if any check fails.
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace lbmcf::cli
