#pragma once

// Residual checks on sampled solutions: zero-curvature condition, the
// Maxwell-Bloch equations themselves, density-matrix invariants, grid
// comparison and feature tracking.
//
// Derivatives are second-order central differences on interior nodes only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lambda_mb/algebra.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/grid.hpp"
#include "lambda_mb/model.hpp"

namespace lambda_mb {

struct ResidualReport {
  double max_abs = 0.0;
  double l2 = 0.0;  ///< root mean square of the per-node residual
  double h_tau = 0.0;
  double h_zeta = 0.0;
  std::optional<Complex> lambda_probe;
  std::optional<double> convergence_order;
  std::vector<std::pair<std::string, double>> details;

  /// Structured `key: value` lines.
  std::string to_text() const {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific;
    os << "max_abs: " << max_abs << '\n' << "l2: " << l2 << '\n';
    os << "h_tau: " << h_tau << '\n' << "h_zeta: " << h_zeta << '\n';
    if (lambda_probe) os << "lambda_probe: " << *lambda_probe << '\n';
    if (convergence_order) os << "convergence_order: " << *convergence_order << '\n';
    for (const auto& [key, value] : details) os << key << ": " << value << '\n';
    return os.str();
  }
};

/// Copy of `fine` with the observed order log2(coarse / fine) attached.
/// Leaves the order unset when either residual is zero.
inline ResidualReport with_convergence_order(const ResidualReport& coarse, const ResidualReport& fine) {
  ResidualReport out = fine;
  if (coarse.max_abs > 0.0 && fine.max_abs > 0.0) {
    out.convergence_order = std::log2(coarse.max_abs / fine.max_abs);
  }
  return out;
}

namespace detail {

inline void require_interior(const GridSpec& g) {
  if (g.n_tau < 3 || g.n_zeta < 3) {
    throw Error(ErrorCode::GridMismatch, "residual checks need at least 3x3 nodes");
  }
}

/// Accumulates per-node residuals into a report.
class ResidualAccumulator {
 public:
  explicit ResidualAccumulator(const GridSpec& g) { report_.h_tau = g.h_tau(); report_.h_zeta = g.h_zeta(); }

  void add(double r) {
    report_.max_abs = std::max(report_.max_abs, r);
    sum_squares_ += r * r;
    ++count_;
  }

  ResidualReport finish() {
    report_.l2 = count_ > 0 ? std::sqrt(sum_squares_ / static_cast<double>(count_)) : 0.0;
    return report_;
  }

 private:
  ResidualReport report_;
  double sum_squares_ = 0.0;
  std::size_t count_ = 0;
};

inline ComplexMatrix3 node_hamiltonian(const SolutionGrid& s, std::size_t j, std::size_t i) {
  return interaction_hamiltonian(s.at(j, i).fields);
}

}  // namespace detail

/// Residual of U_zeta - V_tau + [U, V] at the probe lambda.
inline ResidualReport zero_curvature_residual(const SolutionGrid& s, Complex lambda, const LambdaParams& p) {
  const GridSpec& g = s.spec();
  detail::require_interior(g);
  if (std::abs(lambda - p.delta) <= kPoleGuard) {
    throw Error(ErrorCode::SpectralPole, "probe lambda coincides with the detuning");
  }
  auto u = [&](std::size_t j, std::size_t i) { return lax_u(lambda, detail::node_hamiltonian(s, j, i)); };
  auto v = [&](std::size_t j, std::size_t i) { return lax_v(lambda, s.at(j, i).rho, p); };
  const double hz = g.h_zeta();
  const double ht = g.h_tau();
  detail::ResidualAccumulator acc(g);
  for (std::size_t j = 1; j + 1 < g.n_zeta; ++j) {
    for (std::size_t i = 1; i + 1 < g.n_tau; ++i) {
      const ComplexMatrix3 du = (u(j + 1, i) - u(j - 1, i)) / (2.0 * hz);
      const ComplexMatrix3 dv = (v(j, i + 1) - v(j, i - 1)) / (2.0 * ht);
      acc.add((du - dv + commutator(u(j, i), v(j, i))).max_abs());
    }
  }
  ResidualReport r = acc.finish();
  r.lambda_probe = lambda;
  return r;
}

/// Residuals of H_zeta = i (nu0/4)[D, rho] and rho_tau = i[(delta/2) D - H, rho].
inline ResidualReport pde_residual(const SolutionGrid& s, const LambdaParams& p) {
  const GridSpec& g = s.spec();
  detail::require_interior(g);
  const double hz = g.h_zeta();
  const double ht = g.h_tau();
  detail::ResidualAccumulator acc(g);
  double maxwell = 0.0;
  double liouville = 0.0;
  for (std::size_t j = 1; j + 1 < g.n_zeta; ++j) {
    for (std::size_t i = 1; i + 1 < g.n_tau; ++i) {
      const ComplexMatrix3& rho = s.at(j, i).rho;
      const ComplexMatrix3 h = detail::node_hamiltonian(s, j, i);
      const ComplexMatrix3 dh =
          (detail::node_hamiltonian(s, j + 1, i) - detail::node_hamiltonian(s, j - 1, i)) / (2.0 * hz);
      const ComplexMatrix3 drho = (s.at(j, i + 1).rho - s.at(j, i - 1).rho) / (2.0 * ht);
      const double rm = (dh - (0.25 * kI * p.nu0) * commutator(kLevelSign, rho)).max_abs();
      const double rl = (drho - kI * commutator((0.5 * p.delta) * kLevelSign - h, rho)).max_abs();
      maxwell = std::max(maxwell, rm);
      liouville = std::max(liouville, rl);
      acc.add(std::max(rm, rl));
    }
  }
  ResidualReport r = acc.finish();
  r.details = {{"maxwell_max", maxwell}, {"liouville_max", liouville}};
  return r;
}

struct DensityAudit {
  double hermiticity = 0.0;  ///< max |rho - rho^dagger|
  double trace = 0.0;        ///< max |tr rho - 1|
  double negativity = 0.0;   ///< max negative-eigenvalue excess
  std::optional<double> purity;  ///< max | ||rho||_F^2 - 1 |, for pure-state grids

  double worst() const {
    return std::max({hermiticity, trace, negativity, purity.value_or(0.0)});
  }

  ResidualReport report(const GridSpec& g) const {
    ResidualReport r;
    r.max_abs = worst();
    r.l2 = worst();
    r.h_tau = g.h_tau();
    r.h_zeta = g.h_zeta();
    r.details = {{"hermiticity", hermiticity}, {"trace", trace}, {"negativity", negativity}};
    if (purity) r.details.emplace_back("purity", *purity);
    return r;
  }
};

inline DensityAudit audit_density(const SolutionGrid& s) {
  DensityAudit a;
  if (s.pure_states()) a.purity = 0.0;
  for (const GridNode& node : s.nodes()) {
    const ComplexMatrix3& rho = node.rho;
    a.hermiticity = std::max(a.hermiticity, hermiticity_defect(rho));
    a.trace = std::max(a.trace, std::abs(rho.trace() - 1.0));
    a.negativity = std::max(a.negativity, -hermitian_eigenvalues(rho)[0]);
    if (a.purity) a.purity = std::max(*a.purity, std::abs(rho.frobenius_squared() - 1.0));
  }
  return a;
}

enum class CompareMode {
  full,         ///< complex fields and density matrices
  gauge_aware,  ///< |omega_a|, |omega_b| and populations only
};

inline ResidualReport compare_solutions(const SolutionGrid& a, const SolutionGrid& b,
                                        CompareMode mode = CompareMode::full) {
  if (!(a.spec() == b.spec())) throw Error(ErrorCode::GridMismatch, "solution grids differ");
  ResidualReport r;
  r.h_tau = a.spec().h_tau();
  r.h_zeta = a.spec().h_zeta();
  double fields = 0.0;
  double states = 0.0;
  double sum_squares = 0.0;
  for (std::size_t n = 0; n < a.nodes().size(); ++n) {
    const GridNode& x = a.nodes()[n];
    const GridNode& y = b.nodes()[n];
    double df = 0.0;
    double ds = 0.0;
    if (mode == CompareMode::full) {
      df = std::max(std::abs(x.fields.omega_a - y.fields.omega_a), std::abs(x.fields.omega_b - y.fields.omega_b));
      ds = (x.rho - y.rho).max_abs();
    } else {
      df = std::max(std::abs(std::abs(x.fields.omega_a) - std::abs(y.fields.omega_a)),
                    std::abs(std::abs(x.fields.omega_b) - std::abs(y.fields.omega_b)));
      ds = std::max({std::abs(x.obs.p1 - y.obs.p1), std::abs(x.obs.p2 - y.obs.p2), std::abs(x.obs.p3 - y.obs.p3)});
    }
    fields = std::max(fields, df);
    states = std::max(states, ds);
    const double worst = std::max(df, ds);
    sum_squares += worst * worst;
  }
  r.max_abs = std::max(fields, states);
  r.l2 = std::sqrt(sum_squares / static_cast<double>(a.nodes().size()));
  r.details = {{"fields_max", fields}, {"state_max", states}};
  return r;
}

enum class Tracker { min_of_Ia, max_of_Ia, max_of_Ib, max_of_P1, max_of_P3 };

enum class Slicing {
  per_zeta,  ///< locate the feature in tau on every zeta slice
  per_tau,   ///< locate the feature in zeta on every tau slice
};

struct VelocityEstimate {
  double velocity = 0.0;  ///< lab-frame speed in units of c
  double slope = 0.0;     ///< d tau*/d zeta (per_zeta) or d zeta*/d tau (per_tau)
  std::vector<std::pair<double, double>> track;  ///< (slice coordinate, feature position)
};

inline constexpr double kFeatureProminence = 1e-3;

namespace detail {

inline double tracked_value(const Observables& o, Tracker t) {
  switch (t) {
    case Tracker::min_of_Ia: return -o.intensity_a;
    case Tracker::max_of_Ia: return o.intensity_a;
    case Tracker::max_of_Ib: return o.intensity_b;
    case Tracker::max_of_P1: return o.p1;
    case Tracker::max_of_P3: return o.p3;
  }
  return 0.0;
}

/// Sub-grid position (in index units) of the maximum of `y`.
inline double locate_peak(const std::vector<double>& y) {
  const std::size_t n = y.size();
  const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double span = *hi_it - *lo_it;
  const double scale = std::max(std::abs(*lo_it), std::abs(*hi_it));
  if (!(scale > 0.0) || span < kFeatureProminence * scale) {
    throw Error(ErrorCode::FeatureLost, "tracked feature is not prominent");
  }
  if (top == 0 || top + 1 == n) throw Error(ErrorCode::FeatureLost, "tracked feature sits on the grid edge");
  for (std::size_t k = 0; k < n; ++k) {
    const bool neighbour = k + 1 >= top && k <= top + 1;
    if (!neighbour && y[top] - y[k] <= 1e-12 * scale) {
      throw Error(ErrorCode::FeatureLost, "tracked feature is not unique");
    }
  }
  const double a = y[top - 1];
  const double b = y[top];
  const double c = y[top + 1];
  const double curvature = a - 2.0 * b + c;
  const double offset = curvature < 0.0 ? 0.5 * (a - c) / curvature : 0.0;
  return static_cast<double>(top) + offset;
}

inline double least_squares_slope(const std::vector<std::pair<double, double>>& pts) {
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

/// Tracks an extremum across the grid and converts its drift to a lab speed.
/// With t = tau + zeta and z = zeta (c = 1), a feature drifting by
/// m = d tau/d zeta moves at v = 1/(1 + m); a drift m' = d zeta/d tau gives
/// v = m'/(1 + m').
inline VelocityEstimate track_feature(const SolutionGrid& s, Tracker tracker, Slicing slicing = Slicing::per_zeta) {
  const GridSpec& g = s.spec();
  VelocityEstimate est;
  if (slicing == Slicing::per_zeta) {
    std::vector<double> y(g.n_tau);
    for (std::size_t j = 0; j < g.n_zeta; ++j) {
      for (std::size_t i = 0; i < g.n_tau; ++i) y[i] = detail::tracked_value(s.at(j, i).obs, tracker);
      est.track.emplace_back(g.zeta(j), g.tau_min + detail::locate_peak(y) * g.h_tau());
    }
    est.slope = detail::least_squares_slope(est.track);
    est.velocity = 1.0 / (1.0 + est.slope);
  } else {
    std::vector<double> y(g.n_zeta);
    for (std::size_t i = 0; i < g.n_tau; ++i) {
      for (std::size_t j = 0; j < g.n_zeta; ++j) y[j] = detail::tracked_value(s.at(j, i).obs, tracker);
      est.track.emplace_back(g.tau(i), g.zeta_min + detail::locate_peak(y) * g.h_zeta());
    }
    est.slope = detail::least_squares_slope(est.track);
    est.velocity = est.slope / (1.0 + est.slope);
  }
  return est;
}

inline double measure_velocity(const SolutionGrid& s, Tracker tracker, Slicing slicing = Slicing::per_zeta) {
  return track_feature(s, tracker, slicing).velocity;
}

}  // namespace lambda_mb
