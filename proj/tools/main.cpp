#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbmcf_cli/commands.hpp"
#include "lbmcf_cli/config.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<long long> seed;
  std::optional<int> n;
  std::optional<double> tol;
  std::optional<double> t_max;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_tol_and_time) {
  cmd->add_option("--config", o.config_path, "Configuration file (key = value)");
  cmd->add_option("--seed", o.seed, "Random seed override");
  cmd->add_option("--n", o.n, "Grid points per real dimension");
  if (with_tol_and_time) {
    cmd->add_option("--tol", o.tol, "Residual tolerance override");
    cmd->add_option("--t-max", o.t_max, "Final time override");
  }
}

lbmcf::cli::RunConfig resolve(const Overrides& o, bool newton) {
  using lbmcf::cli::ConfigError;
  lbmcf::cli::RunConfig cfg;
  if (!o.config_path.empty()) cfg = lbmcf::cli::load_config(o.config_path);
  if (o.seed) {
    if (*o.seed < 0) throw ConfigError("--seed must be non-negative");
    cfg.flow.seed = static_cast<std::uint64_t>(*o.seed);
  }
  if (o.n) cfg.flow.n = *o.n;
  if (o.tol) (newton ? cfg.newton.tol : cfg.flow.residual_tol) = *o.tol;
  if (o.t_max) cfg.flow.t_max = *o.t_max;
  // Re-validate after overrides.
  return lbmcf::cli::parse_config(lbmcf::cli::format_config(cfg));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line bundle mean curvature flow and dHYM tools on flat complex 2-tori"};
  app.require_subcommand(1);
  app.footer("Worker threads: set LBMCF_THREADS (default: all cores). Output does not depend on it.");

  Overrides flow_o;
  std::string flow_out = "out";
  auto* flow = app.add_subcommand("flow", "Integrate the flow; writes trace.csv, final.snap, summary.json");
  add_common(flow, flow_o, true);
  flow->add_option("--out", flow_out, "Output directory");

  Overrides newton_o;
  std::string newton_out = "out";
  auto* newton = app.add_subcommand("newton", "Solve the dHYM equation by damped Newton iteration");
  add_common(newton, newton_o, true);
  newton->add_option("--out", newton_out, "Output directory");

  lbmcf::cli::BlowupParams blow;
  std::string blow_out;
  auto* blowup = app.add_subcommand("blowup", "Print the blowup class-family table");
  blowup->add_option("--m", blow.m, "Multiple m of the curvature class");
  blowup->add_option("--L", blow.L, "Self-intersection L of the Kaehler class");
  blowup->add_option("--s", blow.s_values, "Comma separated s values")->delimiter(',');
  blowup->add_option("--tol", blow.tol, "Root tolerance for t(s)");
  blowup->add_option("--out", blow_out, "Also write blowup.csv into this directory");

  Overrides check_o;
  auto* check = app.add_subcommand("check", "Run the identity suite");
  add_common(check, check_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*flow) {
      return lbmcf::cli::cmd_flow(resolve(flow_o, false), flow_out, std::cout, std::cerr);
    }
    if (*newton) {
      return lbmcf::cli::cmd_newton(resolve(newton_o, true), newton_out, std::cout, std::cerr);
    }
    if (*blowup) {
      std::optional<std::filesystem::path> dir;
      if (!blow_out.empty()) dir = blow_out;
      return lbmcf::cli::cmd_blowup(blow, dir, std::cout, std::cerr);
    }
    if (*check) return lbmcf::cli::cmd_check(resolve(check_o, false), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lbmcf::cli::kExitError;
  }
  return lbmcf::cli::kExitError;
}
