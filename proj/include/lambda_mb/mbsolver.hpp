#pragma once

// Direct integration of the reduced Maxwell-Bloch system.
//
// Each zeta slice holds the fields and the density matrix over the tau grid.
// The density matrix is integrated along tau with classic RK4 starting from a
// boundary value at tau_min; the fields are marched in zeta with
//   d_zeta omega_a = i nu0 rho_31,  d_zeta omega_b = i nu0 rho_32.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lambda_mb/algebra.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/grid.hpp"
#include "lambda_mb/model.hpp"

namespace lambda_mb {

/// Liouville right-hand side i[(delta/2) D - H, rho].
inline ComplexMatrix3 bloch_rhs(const ComplexMatrix3& rho, const FieldPair& f, double delta) {
  const ComplexMatrix3 generator = (0.5 * delta) * kLevelSign - interaction_hamiltonian(f);
  return kI * commutator(generator, rho);
}

inline constexpr double kEigenvalueBand = 1e-4;

namespace detail {

inline FieldPair midpoint(const FieldPair& a, const FieldPair& b) {
  return {0.5 * (a.omega_a + b.omega_a), 0.5 * (a.omega_b + b.omega_b)};
}

inline FieldPair weighted(const std::vector<FieldPair>& f, std::size_t first, const std::array<double, 4>& w) {
  FieldPair out{0.0, 0.0};
  for (std::size_t m = 0; m < 4; ++m) {
    out.omega_a += w[m] * f[first + m].omega_a;
    out.omega_b += w[m] * f[first + m].omega_b;
  }
  return out;
}

/// Cubic Lagrange value between nodes i and i+1, one-sided at the ends.
inline FieldPair cubic_midpoint(const std::vector<FieldPair>& f, std::size_t i) {
  const std::size_t n = f.size();
  if (n < 4) return midpoint(f[i], f[i + 1]);
  if (i == 0) return weighted(f, 0, {5.0 / 16, 15.0 / 16, -5.0 / 16, 1.0 / 16});
  if (i + 2 == n) return weighted(f, n - 4, {1.0 / 16, -5.0 / 16, 15.0 / 16, 5.0 / 16});
  return weighted(f, i - 1, {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16});
}

inline void check_spectrum(const ComplexMatrix3& rho, double tau) {
  const auto ev = hermitian_eigenvalues(rho);
  if (ev[0] < -kEigenvalueBand || ev[2] > 1.0 + kEigenvalueBand) {
    throw Error(ErrorCode::StepUnstable,
                "density matrix eigenvalue left [0, 1] at tau = " + std::to_string(tau));
  }
}

}  // namespace detail

enum class TauInterpolation {
  linear,  ///< second order in h_tau
  cubic,   ///< four-point Lagrange, keeps RK4 at fourth order
};

/// RK4 along tau with the fields interpolated to half steps.
/// Returns rho at every tau node; rho is re-symmetrized after each step.
inline std::vector<ComplexMatrix3> integrate_bloch_slice(const std::vector<FieldPair>& fields,
                                                         const ComplexMatrix3& rho_initial, double delta,
                                                         const GridSpec& grid,
                                                         TauInterpolation interp = TauInterpolation::cubic) {
  if (fields.size() != grid.n_tau) {
    throw Error(ErrorCode::GridMismatch, "field slice length differs from n_tau");
  }
  const double h = grid.h_tau();
  std::vector<ComplexMatrix3> out(grid.n_tau);
  ComplexMatrix3 rho = 0.5 * (rho_initial + adjoint(rho_initial));
  out[0] = rho;
  for (std::size_t i = 0; i + 1 < grid.n_tau; ++i) {
    const FieldPair& f0 = fields[i];
    const FieldPair& f1 = fields[i + 1];
    const FieldPair fm =
        interp == TauInterpolation::cubic ? detail::cubic_midpoint(fields, i) : detail::midpoint(f0, f1);
    const ComplexMatrix3 k1 = bloch_rhs(rho, f0, delta);
    const ComplexMatrix3 k2 = bloch_rhs(rho + (0.5 * h) * k1, fm, delta);
    const ComplexMatrix3 k3 = bloch_rhs(rho + (0.5 * h) * k2, fm, delta);
    const ComplexMatrix3 k4 = bloch_rhs(rho + h * k3, f1, delta);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + adjoint(rho));
    detail::check_spectrum(rho, grid.tau(i + 1));
    out[i + 1] = rho;
  }
  return out;
}

enum class MaxwellScheme {
  euler,  ///< first order, for convergence studies
  heun,   ///< predictor-corrector, second order
};

/// Fields and density matrix over the tau grid at one zeta.
struct SliceState {
  std::vector<FieldPair> fields;
  std::vector<ComplexMatrix3> rho;
};

namespace detail {

inline std::vector<FieldPair> advance_fields(const std::vector<FieldPair>& base,
                                             const std::vector<ComplexMatrix3>& rho, double nu0, double h) {
  std::vector<FieldPair> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    out[i].omega_a = base[i].omega_a + h * kI * nu0 * rho[i](2, 0);
    out[i].omega_b = base[i].omega_b + h * kI * nu0 * rho[i](2, 1);
  }
  return out;
}

}  // namespace detail

/// One step in zeta. Heun predicts the fields with the current rho,
/// re-integrates the Bloch equation on the predicted slice and averages the
/// two derivatives. The returned slice carries rho integrated on the new fields.
inline SliceState maxwell_step(const SliceState& current, const ComplexMatrix3& next_boundary_rho,
                               const LambdaParams& p, const GridSpec& grid, double h_zeta,
                               MaxwellScheme scheme = MaxwellScheme::heun,
                               TauInterpolation interp = TauInterpolation::cubic) {
  if (current.fields.size() != grid.n_tau || current.rho.size() != grid.n_tau) {
    throw Error(ErrorCode::GridMismatch, "slice length differs from n_tau");
  }
  SliceState next;
  next.fields = detail::advance_fields(current.fields, current.rho, p.nu0, h_zeta);
  if (scheme == MaxwellScheme::heun) {
    const auto predicted_rho = integrate_bloch_slice(next.fields, next_boundary_rho, p.delta, grid, interp);
    for (std::size_t i = 0; i < grid.n_tau; ++i) {
      const Complex da = current.rho[i](2, 0) + predicted_rho[i](2, 0);
      const Complex db = current.rho[i](2, 1) + predicted_rho[i](2, 1);
      next.fields[i].omega_a = current.fields[i].omega_a + 0.5 * h_zeta * kI * p.nu0 * da;
      next.fields[i].omega_b = current.fields[i].omega_b + 0.5 * h_zeta * kI * p.nu0 * db;
    }
  }
  next.rho = integrate_bloch_slice(next.fields, next_boundary_rho, p.delta, grid, interp);
  return next;
}

struct PropagateOptions {
  /// rho at tau_min for each zeta; the dark state of the background when unset.
  std::function<ComplexMatrix3(double zeta)> boundary_rho;
  /// Expected fields at (zeta_min, tau_min); the background when unset.
  std::optional<FieldPair> edge_reference;
  double edge_tolerance = 1e-4;
  MaxwellScheme scheme = MaxwellScheme::heun;
  TauInterpolation interpolation = TauInterpolation::cubic;
};

using SliceObserver = std::function<void(std::size_t i_zeta, const SliceState& slice)>;

/// Marches the initial field profile across the grid, handing every slice
/// (including the first) to `observer`. Keeps only two slices in memory.
inline void propagate_slices(const std::vector<FieldPair>& initial_fields, const LambdaParams& p,
                             const GridSpec& grid, const PropagateOptions& options,
                             const SliceObserver& observer) {
  grid.validate();
  p.validate();
  if (initial_fields.size() != grid.n_tau) {
    throw Error(ErrorCode::GridMismatch, "initial field profile length differs from n_tau");
  }
  const FieldPair reference = options.edge_reference.value_or(background_fields(p, grid.zeta_min));
  const FieldPair& edge = initial_fields.front();
  const double mismatch =
      std::max(std::abs(edge.omega_a - reference.omega_a), std::abs(edge.omega_b - reference.omega_b));
  if (mismatch > options.edge_tolerance) {
    throw Error(ErrorCode::BoundaryMismatch,
                "initial fields at tau_min differ from the reference by " + std::to_string(mismatch));
  }
  auto boundary = [&](double zeta) {
    if (options.boundary_rho) return options.boundary_rho(zeta);
    const ComplexVector3 d = dark_state(p.eta);
    return outer(d, d);
  };

  SliceState slice;
  slice.fields = initial_fields;
  slice.rho = integrate_bloch_slice(slice.fields, boundary(grid.zeta(0)), p.delta, grid, options.interpolation);
  observer(0, slice);
  const double h = grid.h_zeta();
  for (std::size_t j = 1; j < grid.n_zeta; ++j) {
    slice = maxwell_step(slice, boundary(grid.zeta(j)), p, grid, h, options.scheme, options.interpolation);
    observer(j, slice);
  }
}

inline SolutionGrid propagate(const std::vector<FieldPair>& initial_fields, const LambdaParams& p,
                              const GridSpec& grid, const PropagateOptions& options = {}) {
  SolutionGrid out(grid);
  propagate_slices(initial_fields, p, grid, options, [&](std::size_t j, const SliceState& slice) {
    for (std::size_t i = 0; i < grid.n_tau; ++i) out.set(j, i, slice.fields[i], slice.rho[i]);
  });
  return out;
}

}  // namespace lambda_mb
