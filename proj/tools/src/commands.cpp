#include "lbmcf_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lbmcf/errors.hpp"
#include "lbmcf/surface_classes.hpp"

namespace lbmcf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

json row_json(const TraceRow& r) {
  return json{{"t", r.t},
              {"theta_min", r.theta_min},
              {"theta_max", r.theta_max},
              {"v_max", r.v_max},
              {"V", r.V},
              {"I", r.I},
              {"J", r.J},
              {"res_dhym_sup", r.res_dhym_sup},
              {"res_dhym_l2", r.res_dhym_l2},
              {"res_ma_sup", r.res_ma_sup},
              {"dissipation", r.dissipation}};
}

}  // namespace

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    const double cols[] = {r.t,          r.theta_min,  r.theta_max,  r.v_max,
                           r.V,          r.I,          r.J,          r.res_dhym_sup,
                           r.res_dhym_l2, r.res_ma_sup, r.dissipation, r.dt_used};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out << ',';
      out << fmt(cols[i]);
    }
    out << '\n';
  }
}

int cmd_flow(const RunConfig& config, const fs::path& out_dir, std::ostream& log,
             std::ostream& err) {
  try {
    const RunResult result = run(config.flow);
    std::ostringstream csv;
    write_trace_csv(csv, result.trace);

    prepare_out_dir(out_dir);
    write_text(out_dir / "trace.csv", csv.str());
    write_snapshot(out_dir / "final.snap", result.final_state.phi, result.final_state.t);

    const bool converged = result.status == RunStatus::Converged;
    json summary{{"status", converged ? "converged" : "time_limit"},
                 {"scheme", scheme_name(config.flow.scheme)},
                 {"n", config.flow.n},
                 {"seed", config.flow.seed},
                 {"steps", result.steps},
                 {"samples", result.trace.rows.size()},
                 {"theta_hat", result.background.theta_hat},
                 {"z", {result.background.z.real(), result.background.z.imag()}},
                 {"final", row_json(result.trace.rows.back())}};
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");

    const TraceRow& last = result.trace.rows.back();
    log << (converged ? "converged" : "t_max reached") << " at t=" << fmt(last.t) << " after "
        << result.steps << " steps; res_dhym_sup=" << fmt(last.res_dhym_sup) << "\n";
    return converged ? kExitOk : kExitTimeLimit;
  } catch (const std::exception& e) {
    err << "flow: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_newton(const RunConfig& config, const fs::path& out_dir, std::ostream& log,
               std::ostream& err) {
  try {
    const GridSpec grid(config.flow.n, 4);
    const Background bg = make_background(grid, config.flow.background);
    const ScalarField phi0 = make_initial_potential(grid, config.flow.initial, config.flow.seed);
    const NewtonResult res = newton_dhym(phi0, bg, config.newton);
    const PhaseField pf = compute_phase_field(res.phi, bg);

    json history = json::array();
    for (const NewtonIterate& it : res.history) {
      history.push_back({{"iteration", it.iteration},
                         {"residual_sup", it.residual_sup},
                         {"residual_l2", it.residual_l2},
                         {"step_length", it.step_length},
                         {"linear_iterations", it.linear_iterations},
                         {"mu", it.mu}});
    }
    json summary{{"n", config.flow.n},
                 {"theta_hat", bg.theta_hat},
                 {"residual_sup", res.residual_sup},
                 {"ma_residual", ma_residual(pf, bg)},
                 {"iterations", res.history.size()},
                 {"history", history}};

    prepare_out_dir(out_dir);
    write_snapshot(out_dir / "newton.snap", res.phi, 0.0);
    write_text(out_dir / "newton.json", summary.dump(2) + "\n");
    log << "newton converged in " << res.history.size()
        << " iterations; sup|Theta - theta_hat| = " << fmt(res.residual_sup) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "newton: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_blowup(const BlowupParams& p, const std::optional<fs::path>& out_dir, std::ostream& out,
               std::ostream& err) {
  try {
    const BlowupLattice lat{p.L};
    lat.validate();
    constexpr double kSlopeStep = 1e-6;
    constexpr double kDeltaStep = 1e-4;
    std::ostringstream table;
    table << "s,t,dt_ds_fd,cot_theta,e_defect,h_coeff,M,N,S,cot_psi,psi_slope,psi_slope_fd\n";
    for (const double s : p.s_values) {
      const RayCheck rc = ray_check(s, p.m, p.L, p.tol);
      const double dt_ds = (solve_t_of_s(s + kSlopeStep, p.m, p.L, p.tol) - rc.t) / kSlopeStep;
      const BlowupFamily fam = blowup_family(s, rc.t, p.m, lat);
      const double cot_psi = perturbed_cot(0.0, fam.M, fam.N, fam.S);
      const double slope = perturbed_cot_slope(fam.M, fam.N, fam.S);
      const double slope_fd = (perturbed_cot(kDeltaStep, fam.M, fam.N, fam.S) -
                               perturbed_cot(-kDeltaStep, fam.M, fam.N, fam.S)) /
                              (2.0 * kDeltaStep);
      const double cols[] = {s,     rc.t,  dt_ds, rc.cot_theta, rc.e_defect, rc.h_coeff,
                             fam.M, fam.N, fam.S, cot_psi,      slope,       slope_fd};
      for (std::size_t i = 0; i < std::size(cols); ++i) {
        if (i) table << ',';
        table << fmt(cols[i]);
      }
      table << '\n';
    }
    if (out_dir) {
      prepare_out_dir(*out_dir);
      write_text(*out_dir / "blowup.csv", table.str());
    }
    out << table.str();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "blowup: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    bool ok = true;
    auto report = [&](const std::string& name, double value, double bound) {
      const bool pass = std::isfinite(value) && value < bound;
      ok = ok && pass;
      out << (pass ? "PASS " : "FAIL ") << name << " " << fmt(value) << " < " << bound << "\n";
    };
    std::mt19937_64 rng(config.flow.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto random_hermitian = [&](double scale) {
      const double a = scale * uni(rng);
      const double b = scale * uni(rng);
      const double re = scale * uni(rng);
      const double im = scale * uni(rng);
      return hermitian(a, b, Complex(re, im));
    };
    auto random_alpha = [&]() {
      const Mat2 h = random_hermitian(1.0);
      return hermitize(h * h.adjoint() + 0.5 * Mat2::Identity(), "alpha");
    };

    // Lagrangian phase against the argument of zeta.
    {
      double worst = 0.0;
      for (int k = 0; k < 10000; ++k) {
        const Mat2 alpha = random_alpha();
        const Mat2 f = random_hermitian(5.0);
        const PencilEigenvalues lam = pencil_eigenvalues(HermitianPair(alpha, f));
        worst = std::max(worst, std::abs(lagrangian_phase(lam) - phase_from_arg(zeta_v(lam).zeta)));
      }
      report("phase_identity", worst, 1e-12);
    }

    const int n = std::min(config.flow.n, 8);
    const GridSpec grid(n, 4);
    const Background bg = make_background(grid, config.flow.background);

    // Fourier Hessian of an analytic mode.
    {
      const double k2 = 4.0 * std::numbers::pi * std::numbers::pi;
      const ScalarField f = ScalarField::sample(grid, [](const std::array<double, 4>& x) {
        return std::sin(2.0 * std::numbers::pi * x[0]) * std::sin(2.0 * std::numbers::pi * x[2]);
      });
      const HermitianField h = complex_hessian(f);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.coordinates(i);
        const double s = std::sin(2.0 * std::numbers::pi * x[0]) * std::sin(2.0 * std::numbers::pi * x[2]);
        const double c = std::cos(2.0 * std::numbers::pi * x[0]) * std::cos(2.0 * std::numbers::pi * x[2]);
        const Mat2 exact = hermitian(-0.25 * k2 * s, -0.25 * k2 * s, Complex(0.25 * k2 * c, 0.0));
        worst = std::max(worst, (h[i] - exact).cwiseAbs().maxCoeff());
      }
      report("spectral_hessian", worst, 1e-10);
    }

    // Z is unchanged by exact perturbations of F.
    {
      double worst = 0.0;
      const Complex z0 = bg.z;
      for (int k = 0; k < 3; ++k) {
        const ScalarField phi = random_band_limited(grid, 2, 0.05, config.flow.seed + k);
        const Complex z = compute_z_and_theta_hat(bg.alpha(), bg.f_hat_const, bg.f_hat_bump + phi).z;
        worst = std::max(worst, std::abs(z - z0) / std::abs(z0));
      }
      report("stokes_invariance", worst, 1e-10);
    }

    // Class identities for Omega-hat.
    {
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const Mat2 alpha = random_alpha();
        const Mat2 f = random_hermitian(3.0);
        const ClassData c = class_data(alpha, f);
        if (std::abs(c.af) < 1e-3) continue;
        const OmegaIdentities id = omega_identities(c);
        worst = std::max(worst, std::abs(id.omega_sq - id.omega_sq_rhs) /
                                    std::max(1.0, std::abs(id.omega_sq_rhs)));
        worst = std::max(worst, std::abs(id.omega_dot_f - id.omega_dot_f_rhs) /
                                    std::max(1.0, std::abs(id.omega_dot_f_rhs)));
      }
      report("class_identities", worst, 1e-12);
    }

    // Pointwise identities on the configured background.
    {
      const PhaseField pf = compute_phase_field(ScalarField(grid), bg);
      report("ma_recombination", ma_recombination_defect(pf, bg), 1e-10);
      const bool drift_applies = bg.theta_hat > std::numbers::pi / 2 && bg.theta_hat < std::numbers::pi &&
                                 pf.first_non_hypercritical() == pf.size();
      if (drift_applies) {
        report("phase_drift_identity", phase_drift_identity(pf, bg), 1e-10);
      } else {
        out << "SKIP phase_drift_identity (background not hypercritical with theta_hat in (pi/2, pi))\n";
      }
    }

    // Blowup arithmetic and the gap function.
    {
      report("blowup_e_defect", std::abs(ray_check(0.1, 2.0, 1.0).e_defect), 1e-12);
      report("subsolution_gap_negated", -subsolution_gap(0.1, 0.1, 2.2, 50.0, 1e4, 1e-2), 0.0);
    }
    return ok ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    err << "check: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace lbmcf::cli
