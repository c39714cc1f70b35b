// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lambda_mb/lambda_mb.hpp"

using namespace lambda_mb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = seconds <= budget_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s; %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", id, title, out.detail.c_str(),
              seconds, budget_s, in_time ? "" : " OVER BUDGET");
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

ScenarioParams fig2_params(SolitonConstants a, Scenario tag = Scenario::two_soliton) {
  ScenarioParams sp;
  sp.tag = tag;
  sp.p.nu0 = 3.0;
  sp.p.delta = 0.0;
  sp.p.omega0 = 1.0;
  sp.s = SpectralData::from_eps(2.0, 1.0);
  sp.constants = a;
  return sp;
}

GridSpec reference_grid() {
  GridSpec g;
  g.tau_min = -20.0;
  g.tau_max = 20.0;
  g.n_tau = 101;
  g.zeta_min = 0.0;
  g.zeta_max = 8.0;
  g.n_zeta = 101;
  return g;
}

double fields_max(const SolutionGrid& a, const SolutionGrid& b) {
  return compare_solutions(a, b).details[0].second;
}

// worst audit over every analytic and dressed grid built below
double audit_worst = 0.0;
std::size_t audited_grids = 0;

void audit(const SolutionGrid& g) {
  audit_worst = std::max(audit_worst, audit_density(g).worst());
  ++audited_grids;
}

Outcome oracle_equivalence() {
  const GridSpec g = reference_grid();
  // reading 1: a = (1, 1, 1) mapped forward
  const ScenarioParams forward = fig2_params({1.0, 1.0});
  const DressConstants c_forward = map_constants(forward.a(), forward.s, forward.p.omega0);
  const auto closed = analytic_grid(forward, g);
  const auto dressed = dressing_grid(forward.p, forward.s, c_forward, g);
  // reading 2: c = (1, 1, 1) mapped back to a
  const ScenarioParams unit_c = fig2_params(unmap_constants({1.0, 1.0, 1.0}, forward.s, forward.p.omega0));
  const auto closed2 = analytic_grid(unit_c, g);
  const auto dressed2 = dressing_grid(unit_c.p, unit_c.s, {1.0, 1.0, 1.0}, g);
  for (const auto* grid : {&closed, &dressed, &closed2, &dressed2}) audit(*grid);
  const double d1 = fields_max(closed, dressed);
  const double d2 = fields_max(closed2, dressed2);
  return {d1 < 1e-9 && d2 < 1e-9,
          fmt("max|dOmega| %.2e (a = (1,1,1) -> c = (2, 0.5176, 1.9319)), %.2e (c = (1,1,1) -> a1 = %.6f)", d1, d2,
              unit_c.a().a1)};
}

Outcome reduction_limits() {
  const GridSpec g = reference_grid();
  double slow = 0.0;
  double fast = 0.0;
  const auto two_slow = fig2_params({1.0, 0.0});
  const auto one_slow = fig2_params({1.0, 0.0}, Scenario::slow);
  const auto two_fast = fig2_params({0.0, 1.0});
  const auto one_fast = fig2_params({0.0, 1.0}, Scenario::fast);
  for (std::size_t j = 0; j < g.n_zeta; ++j) {
    for (std::size_t i = 0; i < g.n_tau; ++i) {
      const double zeta = g.zeta(j);
      const double tau = g.tau(i);
      const FieldPair a = two_soliton_fields(two_slow, zeta, tau);
      const FieldPair b = slow_soliton(one_slow, zeta, tau).fields;
      slow = std::max({slow, std::abs(a.omega_a - b.omega_a), std::abs(a.omega_b - b.omega_b)});
      const FieldPair c = two_soliton_fields(two_fast, zeta, tau);
      const FieldPair d = fast_soliton(one_fast, tau);
      fast = std::max({fast, std::abs(c.omega_a - d.omega_a), std::abs(c.omega_b - d.omega_b)});
    }
  }
  return {slow < 1e-12 && fast < 1e-12, fmt("a3 = 0 vs slow %.2e, a1 = 0 vs fast %.2e", slow, fast)};
}

struct ResidualCase {
  std::string label;
  ScenarioParams sp;
  GridSpec grid;
};

Outcome pde_residuals() {
  std::vector<ResidualCase> cases;
  GridSpec base;
  base.n_tau = 401;
  base.n_zeta = 161;
  cases.push_back({"two_soliton", fig2_params({1.0, 1.0}), base});
  cases.push_back({"slow", fig2_params({1.0, 0.0}, Scenario::slow), base});
  cases.push_back({"fast", fig2_params({0.0, 1.0}, Scenario::fast), base});
  {
    ScenarioParams sp;
    sp.tag = Scenario::zero_background;
    sp.p.omega0 = 0.0;
    sp.s = SpectralData::from_eps(2.0, 0.0);
    sp.constants = DressConstants{1.0, 1.0, 1.0};
    GridSpec g = base;
    g.tau_min = -10.0;
    g.tau_max = 10.0;
    g.zeta_min = -4.0;
    g.zeta_max = 4.0;
    cases.push_back({"zero_background", sp, g});
  }
  {
    ScenarioParams sp;
    sp.tag = Scenario::exulton;
    sp.p.omega0 = 1.0;
    sp.s = SpectralData::from_eps(1.0, 1.0);
    sp.constants = DressConstants{1.0, 1.0, 1.0};
    GridSpec g = base;
    g.tau_min = -10.0;
    g.tau_max = 10.0;
    cases.push_back({"exulton", sp, g});
    sp.tag = Scenario::exulton_k;
    sp.p.k = 0.2;
    sp.constants = DressConstants{0.0, 0.0, 1.0};
    cases.push_back({"exulton_k", sp, g});
  }
  const std::vector<Complex> probes{{1.0, 1.0}, {0.0, 0.7}, {-2.0, 0.5}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& c : cases) {
    const auto coarse = analytic_grid(c.sp, c.grid);
    const auto fine = analytic_grid(c.sp, c.grid.refined());
    audit(coarse);
    audit(fine);
    std::vector<std::pair<ResidualReport, ResidualReport>> pairs;
    pairs.emplace_back(pde_residual(coarse, c.sp.p), pde_residual(fine, c.sp.p));
    for (const Complex& l : probes) {
      pairs.emplace_back(zero_curvature_residual(coarse, l, c.sp.p), zero_curvature_residual(fine, l, c.sp.p));
    }
    double lo = 1e300;
    double hi = -1e300;
    double largest = 0.0;
    bool roundoff = true;
    for (const auto& [a, b] : pairs) {
      largest = std::max({largest, a.max_abs, b.max_abs});
      if (a.max_abs >= 1e-12 || b.max_abs >= 1e-12) roundoff = false;
      const auto r = with_convergence_order(a, b);
      if (r.convergence_order) {
        lo = std::min(lo, *r.convergence_order);
        hi = std::max(hi, *r.convergence_order);
      }
    }
    detail << c.label << ' ';
    if (roundoff) {
      // exact solution on the grid: residuals sit at roundoff and carry no order
      detail << fmt("roundoff (max %.1e)", largest);
    } else {
      const bool case_ok = lo >= 1.8 && hi <= 2.2;
      ok = ok && case_ok;
      detail << fmt("order %.3f..%.3f", lo, hi);
    }
    detail << "; ";
  }
  std::string text = detail.str();
  text.resize(text.size() - 2);
  return {ok, text};
}

Outcome density_audit(double numeric_negativity, double numeric_trace) {
  const bool ok = audit_worst < 1e-8 && audited_grids > 0;
  return {ok, fmt("worst %.2e over %.0f analytic/dressed grids", audit_worst, static_cast<double>(audited_grids)) +
                  fmt("; numeric grid (criterion 5, RK4 band 1e-4, not asserted here): negativity %.2e, trace %.2e",
                      numeric_negativity, numeric_trace)};
}

struct NumericRun {
  double relative_error = 0.0;
  double negativity = 0.0;
  double trace = 0.0;
};

NumericRun numeric_two_soliton(std::size_t n_tau, std::size_t n_zeta) {
  const ScenarioParams sp = fig2_params({1.0, 1.0});
  GridSpec g = reference_grid();
  g.n_tau = n_tau;
  g.n_zeta = n_zeta;
  std::vector<FieldPair> initial(g.n_tau);
  for (std::size_t i = 0; i < g.n_tau; ++i) initial[i] = two_soliton_fields(sp, g.zeta_min, g.tau(i));
  const DressingEngine engine(sp.p, sp.s, dressing_constants(sp));
  PropagateOptions opts;
  opts.edge_reference = initial.front();
  opts.boundary_rho = [&](double zeta) { return engine.at(zeta, g.tau_min).rho; };
  NumericRun out;
  double diff = 0.0;
  double peak = 0.0;
  propagate_slices(initial, sp.p, g, opts, [&](std::size_t j, const SliceState& slice) {
    for (std::size_t i = 0; i < g.n_tau; ++i) {
      const FieldPair exact = two_soliton_fields(sp, g.zeta(j), g.tau(i));
      peak = std::max({peak, std::abs(exact.omega_a), std::abs(exact.omega_b)});
      diff = std::max({diff, std::abs(slice.fields[i].omega_a - exact.omega_a),
                       std::abs(slice.fields[i].omega_b - exact.omega_b)});
      out.negativity = std::max(out.negativity, -hermitian_eigenvalues(slice.rho[i])[0]);
      out.trace = std::max(out.trace, std::abs(slice.rho[i].trace() - 1.0));
    }
  });
  out.relative_error = diff / peak;
  return out;
}

NumericRun reference_run;

Outcome solver_tracking() {
  reference_run = numeric_two_soliton(2001, 801);
  const NumericRun fine = numeric_two_soliton(4001, 1601);
  const double ratio = reference_run.relative_error / fine.relative_error;
  return {reference_run.relative_error < 1e-3 && ratio >= 3.4 && ratio <= 4.6,
          fmt("max relative error %.3e at 2001x801, %.3e at 4001x1601, ratio %.2f", reference_run.relative_error,
              fine.relative_error, ratio)};
}

Outcome group_velocity() {
  const ScenarioConfig cfg = canned_scenario("slow_velocity");
  const ScenarioParams sp = cfg.scenario_params();
  const double formula = slow_group_velocity(sp.p, sp.s);
  const double measured = measure_velocity(analytic_grid(sp, cfg.grid), Tracker::min_of_Ia);
  const double deviation = std::abs(measured / formula - 1.0);

  const ScenarioConfig fig = canned_scenario("slow");
  const ScenarioParams fsp = fig.scenario_params();
  const double fig_measured = measure_velocity(analytic_grid(fsp, fig.grid), Tracker::min_of_Ia);
  return {deviation < 0.05,
          fmt("omega0 = 0.2: measured %.6f vs formula %.6f (1/150), deviation %.2f%%", measured, formula,
              100.0 * deviation) +
              fmt("; fig2 parameters: measured %.4f vs formula %.4f (reported only)", fig_measured,
                  slow_group_velocity(fsp.p, fsp.s))};
}

Outcome dark_transparency() {
  const ScenarioConfig cfg = canned_scenario("fast");
  const ScenarioParams sp = cfg.scenario_params();
  const GridSpec& g = cfg.grid;
  std::vector<FieldPair> initial(g.n_tau);
  for (std::size_t i = 0; i < g.n_tau; ++i) initial[i] = fast_soliton(sp, g.tau(i));
  PropagateOptions opts;
  opts.edge_reference = initial.front();
  double populations = 0.0;
  double shape = 0.0;
  propagate_slices(initial, sp.p, g, opts, [&](std::size_t j, const SliceState& slice) {
    for (std::size_t i = 0; i < g.n_tau; ++i) {
      populations = std::max({populations, std::abs(slice.rho[i](0, 0)), std::abs(slice.rho[i](2, 2))});
      if (j + 1 == g.n_zeta) {
        shape = std::max({shape, std::abs(slice.fields[i].omega_a - initial[i].omega_a),
                          std::abs(slice.fields[i].omega_b - initial[i].omega_b)});
      }
    }
  });
  return {populations < 1e-8 && shape < 1e-6,
          fmt("max P1, P3 %.2e; output vs input at zeta_max %.2e", populations, shape)};
}

Outcome stopped_polariton() {
  ScenarioParams sp;
  sp.tag = Scenario::zero_background;
  sp.p.omega0 = 0.0;
  sp.s = SpectralData::from_eps(2.0, 0.0);
  sp.constants = DressConstants{1.0, 1.0, 1.0};
  GridSpec g;
  g.tau_min = -12.0;
  g.tau_max = -6.0;
  g.n_tau = 61;
  g.zeta_min = -4.0;
  g.zeta_max = 4.0;
  g.n_zeta = 161;
  const auto grid = analytic_grid(sp, g);
  audit(grid);
  const double v = std::abs(measure_velocity(grid, Tracker::max_of_P1, Slicing::per_tau));

  sp.constants = DressConstants{0.0, 1.0, 1.0};
  GridSpec wide = g;
  wide.tau_min = -10.0;
  wide.tau_max = 10.0;
  const auto stored = analytic_grid(sp, wide);
  audit(stored);
  double field = 0.0;
  double drift = 0.0;
  double p1 = 0.0;
  for (std::size_t j = 0; j < wide.n_zeta; ++j) {
    for (std::size_t i = 0; i < wide.n_tau; ++i) {
      const GridNode& n = stored.at(j, i);
      field = std::max({field, std::abs(n.fields.omega_a), std::abs(n.fields.omega_b)});
      drift = std::max(drift, std::abs(n.obs.p1 - stored.at(j, 0).obs.p1));
      p1 = std::max(p1, n.obs.p1);
    }
  }
  return {v < 1e-6 && field == 0.0 && drift < 1e-12 && p1 > 0.1,
          fmt("P1 peak speed %.2e; c1 = 0: max |Omega| %.1e, ", v, field) +
              fmt("P1 tau-drift %.1e, max P1 %.3f", drift, p1)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome reproducibility() {
  const auto root = std::filesystem::temp_directory_path() / "lambda_mb_acceptance";
  std::filesystem::remove_all(root);
  std::size_t compared = 0;
  std::size_t differing = 0;
  std::size_t failed_runs = 0;
  for (const auto& [name, text] : canned_scenarios()) {
    std::vector<std::filesystem::path> dirs{root / (name + "_a"), root / (name + "_b")};
    std::vector<RunResult> runs;
    for (const auto& dir : dirs) {
      ScenarioConfig cfg = parse_config(text);
      cfg.output = dir.string();
      runs.push_back(run_scenario(cfg));
      if (runs.back().exit_code != 0) ++failed_runs;
    }
    for (const auto& path : runs[0].artifacts) {
      if (path.extension() != ".csv") continue;
      ++compared;
      if (slurp(path) != slurp(dirs[1] / path.filename())) ++differing;
    }
  }
  std::filesystem::remove_all(root);
  return {differing == 0 && compared > 0,
          fmt("%.0f CSV files from %.0f canned scenarios, %.0f differ", static_cast<double>(compared),
              static_cast<double>(canned_scenarios().size()), static_cast<double>(differing)) +
              fmt("; canned runs with failed checks: %.0f", static_cast<double>(failed_runs))};
}

}  // namespace

int main() {
  criterion(1, "oracle equivalence", 10.0, oracle_equivalence);
  criterion(2, "reduction limits", 5.0, reduction_limits);
  criterion(3, "pde and zero-curvature residual order", 60.0, pde_residuals);
  criterion(5, "numerical solver tracking", 300.0, solver_tracking);
  criterion(4, "density-matrix audit", 1.0,
            [] { return density_audit(reference_run.negativity, reference_run.trace); });
  criterion(6, "group velocity", 120.0, group_velocity);
  criterion(7, "dark-state transparency", 60.0, dark_transparency);
  criterion(8, "stopped polariton", 30.0, stopped_polariton);
  criterion(9, "reproducibility", 600.0, reproducibility);
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
