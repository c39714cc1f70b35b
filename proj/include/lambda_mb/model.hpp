#pragma once

// Physical vocabulary of the three-level Lambda system in the rotating frame:
// parameters, field pairs, atomic states and the Lax pair (U, V).
//
// Units are dimensionless with hbar = c = 1; zeta = z/c and tau = t - z/c.

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "lambda_mb/algebra.hpp"
#include "lambda_mb/error.hpp"

namespace lambda_mb {

struct LambdaParams {
  double nu0 = 3.0;     ///< coupling constant (equal in both channels)
  double delta = 0.0;   ///< detuning
  double omega0 = 1.0;  ///< background Rabi amplitude
  double eta = 0.0;     ///< background mixing angle between channels a and b
  double k = 0.0;       ///< background phase wavenumber along zeta

  // Informational only; never used in computation.
  double omega12_over_2pi_hz = 1772e6;
  double optical_wavelength_nm = 589.0;

  void validate() const {
    if (!(nu0 > 0.0)) throw Error(ErrorCode::ParameterGuard, "nu0 must be positive");
    if (!(omega0 >= 0.0)) throw Error(ErrorCode::ParameterGuard, "omega0 must be non-negative");
    if (!(eta >= 0.0 && eta <= std::numbers::pi / 2)) {
      throw Error(ErrorCode::ParameterGuard, "eta must lie in [0, pi/2]");
    }
    if (!std::isfinite(delta) || !std::isfinite(k)) {
      throw Error(ErrorCode::ParameterGuard, "delta and k must be finite");
    }
  }
};

/// Discrete eigenvalue lambda0 = i*eps0 and the root s = sqrt(eps0^2 - omega0^2).
///
/// The root is sqrt(-lambda0^2 - omega0^2) on the principal branch: positive
/// real for eps0 > omega0, zero at eps0 = omega0 and +i*sqrt(omega0^2 - eps0^2)
/// below that.
struct SpectralData {
  Complex lambda0;
  double eps0 = 0.0;
  Complex root;

  static SpectralData from_eps(double eps0, double omega0) {
    if (!(eps0 > 0.0)) throw Error(ErrorCode::ParameterGuard, "eps0 must be positive");
    SpectralData s;
    s.eps0 = eps0;
    s.lambda0 = Complex(0.0, eps0);
    s.root = std::sqrt(Complex(eps0 * eps0 - omega0 * omega0, 0.0));
    return s;
  }
};

struct FieldPair {
  Complex omega_a;
  Complex omega_b;

  friend bool operator==(const FieldPair&, const FieldPair&) = default;
};

/// Either a pure state over (|1>, |2>, |3>) or a density matrix.
class AtomState {
 public:
  AtomState(const ComplexVector3& pure) : state_(pure) {}  // NOLINT
  AtomState(const ComplexMatrix3& density) : state_(density) {}  // NOLINT

  bool is_pure() const { return std::holds_alternative<ComplexVector3>(state_); }

  const ComplexVector3& pure() const { return std::get<ComplexVector3>(state_); }

  ComplexMatrix3 density() const {
    if (is_pure()) {
      const auto& v = pure();
      return outer(v, v);
    }
    return std::get<ComplexMatrix3>(state_);
  }

 private:
  std::variant<ComplexVector3, ComplexMatrix3> state_;
};

/// H = -1/2 (omega_a |3><1| + omega_b |3><2|) + h.c.
inline ComplexMatrix3 interaction_hamiltonian(const FieldPair& f) {
  ComplexMatrix3 h;
  h(0, 2) = -0.5 * std::conj(f.omega_a);
  h(1, 2) = -0.5 * std::conj(f.omega_b);
  h(2, 0) = -0.5 * f.omega_a;
  h(2, 1) = -0.5 * f.omega_b;
  return h;
}

inline constexpr double kLambdaStructureTolerance = 1e-8;

/// Inverse of interaction_hamiltonian. Rejects matrices that are not
/// Hermitian or that couple anything other than the ground levels to |3>.
inline FieldPair extract_fields(const ComplexMatrix3& h) {
  const double tol = kLambdaStructureTolerance;
  if (hermiticity_defect(h) > tol) {
    throw Error(ErrorCode::NotLambdaStructured, "Hamiltonian is not Hermitian");
  }
  if (std::abs(h(0, 0)) > tol || std::abs(h(1, 1)) > tol || std::abs(h(2, 2)) > tol ||
      std::abs(h(0, 1)) > tol) {
    throw Error(ErrorCode::NotLambdaStructured, "Hamiltonian has diagonal or |1><2| entries");
  }
  return {-2.0 * h(2, 0), -2.0 * h(2, 1)};
}

/// U(lambda) = (i/2) lambda D - i H
inline ComplexMatrix3 lax_u(Complex lambda, const ComplexMatrix3& h) {
  return (0.5 * kI * lambda) * kLevelSign - kI * h;
}

inline constexpr double kPoleGuard = 1e-9;

/// V(lambda) = i nu0 rho / (2 (lambda - delta))
inline ComplexMatrix3 lax_v(Complex lambda, const ComplexMatrix3& rho, const LambdaParams& p) {
  const Complex gap = lambda - p.delta;
  if (std::abs(gap) <= kPoleGuard) {
    throw Error(ErrorCode::SpectralPole, "V(lambda) evaluated at its pole lambda = delta");
  }
  return (kI * p.nu0 / (2.0 * gap)) * rho;
}

/// cos(eta)|2> - sin(eta)|1>
inline ComplexVector3 dark_state(double eta) {
  if (!(eta >= 0.0 && eta <= std::numbers::pi / 2)) {
    throw Error(ErrorCode::ParameterGuard, "eta must lie in [0, pi/2]");
  }
  return {{-std::sin(eta), std::cos(eta), 0.0}};
}

/// |psi><psi|. States within 1e-4 of unit norm are renormalized first.
inline ComplexMatrix3 density_from_pure(const ComplexVector3& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-4) {
    throw Error(ErrorCode::NotNormalized, "state norm " + std::to_string(n) + " is not 1");
  }
  const ComplexVector3 u = std::abs(n - 1.0) > 1e-8 ? psi / n : psi;
  return outer(u, u);
}

/// Plotted quantities: field intensities and level populations.
struct Observables {
  double intensity_a = 0.0;
  double intensity_b = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
};

inline Observables observe(const FieldPair& f, const ComplexMatrix3& rho) {
  return {std::norm(f.omega_a), std::norm(f.omega_b), rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real()};
}

/// (cos(eta), sin(eta)) * omega0 * exp(i k zeta)
inline FieldPair background_fields(const LambdaParams& p, double zeta) {
  const Complex omega = p.omega0 * std::exp(kI * (p.k * zeta));
  return {std::cos(p.eta) * omega, std::sin(p.eta) * omega};
}

}  // namespace lambda_mb
