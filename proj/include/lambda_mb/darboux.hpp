#pragma once

// Darboux-Baecklund dressing of the constant-background seed.
//
// Pipeline per space-time point:
//   seed fundamental matrix Phi0 -> partner (Phi0^-1)^dagger -> Psi1
//   -> sigma1 = Psi1 (L1 - shift) Psi1^-1 -> dressed (H, rho).
//
// The seed fundamental matrix is kept in factored form, structure * diag(exp(E)),
// so that the exponential growth of individual columns can be divided out
// before Psi1 is assembled. sigma1 only depends on the column spans of Psi1,
// which makes the rescaling exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "lambda_mb/algebra.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/model.hpp"

namespace lambda_mb {

/// Real dressing constants weighting the three seed columns in psi3.
struct DressConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;

  bool all_zero() const { return c1 == 0.0 && c2 == 0.0 && c3 == 0.0; }
  friend bool operator==(const DressConstants&, const DressConstants&) = default;
};

/// Position constants of the two-soliton family; a2 is fixed to one.
struct SolitonConstants {
  double a1 = 1.0;  ///< slow soliton position
  double a3 = 1.0;  ///< fast soliton position
  static constexpr double a2 = 1.0;

  friend bool operator==(const SolitonConstants&, const SolitonConstants&) = default;
};

/// Diagonal matrix spectral parameter diag(l1, l2, l3).
struct SpectralMatrixL {
  Complex l1;
  Complex l2;
  Complex l3;

  /// L1 = diag(conj(lambda0), conj(lambda0), lambda0)
  static SpectralMatrixL for_eigenvalue(Complex lambda0) {
    return {std::conj(lambda0), std::conj(lambda0), lambda0};
  }

  ComplexMatrix3 matrix() const { return ComplexMatrix3::diagonal(l1, l2, l3); }
};

struct FactoredFundamental {
  ComplexMatrix3 structure;
  std::array<Complex, 3> exponents{};

  ComplexMatrix3 matrix() const {
    return structure * ComplexMatrix3::diagonal(std::exp(exponents[0]), std::exp(exponents[1]),
                                                std::exp(exponents[2]));
  }
};

enum class SeedKind {
  regular,     ///< eps0 != omega0: three exponential columns
  degenerate,  ///< eps0 == omega0: columns 2 and 3 form a Jordan pair
};

inline constexpr double kDegenerateSeedTolerance = 1e-8;

namespace detail {

inline ComplexVector3 bright_vector(double eta) { return {{std::cos(eta), std::sin(eta), 0.0}}; }

inline ComplexVector3 excited_vector() { return {{0.0, 0.0, 1.0}}; }

/// diag(e^{-ik zeta/2}, e^{-ik zeta/2}, e^{ik zeta/2}); carries the background
/// phase e^{ik zeta} onto the |3><1|, |3><2| couplings.
inline ComplexMatrix3 background_gauge(double k, double zeta) {
  const Complex half = std::exp(-0.5 * kI * (k * zeta));
  return ComplexMatrix3::diagonal(half, half, std::conj(half));
}

inline Complex checked_gap(Complex lambda, double delta) {
  const Complex gap = lambda - delta;
  if (std::abs(gap) <= kPoleGuard) {
    throw Error(ErrorCode::SpectralPole, "lambda0 coincides with the detuning");
  }
  return gap;
}

inline ComplexVector3 normalized(const ComplexVector3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::DegeneratePsi, "Psi1 column vanished");
  }
  return v / n;
}

}  // namespace detail

/// Incoherent admixture of the bright subspace in the seed density matrix.
/// Zero for k = 0; for k != 0 it is the smallest value keeping the seed
/// density matrix positive semidefinite.
inline double seed_mixing(const LambdaParams& p) {
  const double r = std::hypot(p.delta, p.omega0);
  return std::abs(p.k) * r / p.nu0;
}

/// Seed Hamiltonian: the constant background fields.
inline ComplexMatrix3 seed_hamiltonian(const LambdaParams& p, double zeta) {
  return interaction_hamiltonian(background_fields(p, zeta));
}

/// Stationary seed density matrix compatible with the background fields.
///
/// For k = 0 this is the dark-state projector. For k != 0 the Maxwell
/// equation forces rho_31 = k omega0 cos(eta) e^{ik zeta} / nu0, which is
/// supplied by a component along the bright-block generator, plus the
/// minimal bright admixture that keeps the matrix positive.
inline ComplexMatrix3 seed_density(const LambdaParams& p, double zeta) {
  const ComplexVector3 d = dark_state(p.eta);
  if (p.k == 0.0) return outer(d, d);

  const double mix = seed_mixing(p);
  if (mix > 0.5) {
    throw Error(ErrorCode::ParameterGuard,
                "|k| sqrt(delta^2 + omega0^2) / nu0 exceeds 1/2; no positive seed exists");
  }
  const ComplexVector3 b = detail::bright_vector(p.eta);
  const ComplexVector3 e3 = detail::excited_vector();
  const ComplexMatrix3 dark = outer(d, d);
  const ComplexMatrix3 bright = ComplexMatrix3::identity() - dark;
  const ComplexMatrix3 generator =
      (0.5 * p.delta) * (outer(b, b) - outer(e3, e3)) + (0.5 * p.omega0) * (outer(e3, b) + outer(b, e3));
  const ComplexMatrix3 rotated = (1.0 - 2.0 * mix) * dark + mix * bright + (2.0 * p.k / p.nu0) * generator;
  const ComplexMatrix3 g = detail::background_gauge(p.k, zeta);
  return g * rotated * adjoint(g);
}

/// Fundamental matrix of the Lax pair at lambda0 over the background seed.
///
/// For k = 0 it reproduces the closed form column by column:
///   col1 = (-tan eta, 1, 0) e^{mu1}
///   col2 = (omega0 cos eta / (-lambda0 + iR), omega0 sin eta / (...), 1) e^{-mu2}
///   col3 = (-omega0 cos eta / (lambda0 + iR), ..., 1) e^{mu2}
/// with R = sqrt(-lambda0^2 - omega0^2). For k != 0 the structure matrix is
/// additionally rotated by the background gauge and the exponents carry the
/// seed density's ζ-evolution. At omega0 = 0 column 2 is replaced by its
/// rescaled limit, the bright vector.
inline FactoredFundamental seed_fundamental_factored(const LambdaParams& p, const SpectralData& s,
                                                     double zeta, double tau) {
  const Complex lambda = s.lambda0;
  const Complex gap = detail::checked_gap(lambda, p.delta);
  if (std::abs(s.eps0 - p.omega0) < kDegenerateSeedTolerance) {
    throw Error(ErrorCode::DegenerateSeed, "eps0 == omega0: columns 2 and 3 coincide");
  }
  if (p.eta > std::numbers::pi / 2 - 1e-12) {
    throw Error(ErrorCode::DegenerateSeed, "eta == pi/2: dark column is unbounded");
  }
  const double mix = seed_mixing(p);
  const Complex root = std::sqrt(-lambda * lambda - p.omega0 * p.omega0);
  const Complex shifted_tau = tau + p.k * zeta / gap;
  const double ce = std::cos(p.eta);
  const double se = std::sin(p.eta);

  FactoredFundamental f;
  f.structure.set_column(0, {{-std::tan(p.eta), 1.0, 0.0}});
  if (p.omega0 > 0.0) {
    // omega0 / (-lambda + iR) == (lambda + iR) / omega0, without cancellation
    const Complex x2 = (lambda + kI * root) / p.omega0;
    f.structure.set_column(1, {{x2 * ce, x2 * se, 1.0}});
  } else {
    f.structure.set_column(1, detail::bright_vector(p.eta));
  }
  const Complex x3 = -p.omega0 / (lambda + kI * root);
  f.structure.set_column(2, {{x3 * ce, x3 * se, 1.0}});
  f.structure = detail::background_gauge(p.k, zeta) * f.structure;

  const Complex bright_phase = kI * p.nu0 * mix * zeta / (2.0 * gap);
  f.exponents[0] = 0.5 * kI * lambda * tau +
                   zeta * (0.5 * kI * p.k + kI * p.nu0 * (1.0 - 2.0 * mix) / (2.0 * gap));
  f.exponents[1] = -0.5 * root * shifted_tau + bright_phase;
  f.exponents[2] = 0.5 * root * shifted_tau + bright_phase;
  return f;
}

inline ComplexMatrix3 seed_fundamental(const LambdaParams& p, const SpectralData& s, double zeta,
                                       double tau) {
  return seed_fundamental_factored(p, s, zeta, tau).matrix();
}

/// Fundamental matrix at the degenerate point eps0 == omega0 > 0, lambda0 = i omega0.
/// The bright block of U is nilpotent there, so column 3 grows linearly:
///   col2 = (i cos eta, i sin eta, 1),  col3 = (i(T omega0 - 1) cos eta, ..., 1 + T omega0)
/// with T = tau + k zeta / (lambda0 - delta).
inline FactoredFundamental degenerate_seed_fundamental_factored(const LambdaParams& p,
                                                                const SpectralData& s,
                                                                double zeta, double tau) {
  if (!(p.omega0 > 0.0) || std::abs(s.eps0 - p.omega0) >= kDegenerateSeedTolerance) {
    throw Error(ErrorCode::ParameterGuard, "degenerate seed requires eps0 == omega0 > 0");
  }
  if (p.eta > std::numbers::pi / 2 - 1e-12) {
    throw Error(ErrorCode::DegenerateSeed, "eta == pi/2: dark column is unbounded");
  }
  const Complex lambda = s.lambda0;
  const Complex gap = detail::checked_gap(lambda, p.delta);
  const double mix = seed_mixing(p);
  const double w = p.omega0;
  const Complex shifted_tau = tau + p.k * zeta / gap;
  const double ce = std::cos(p.eta);
  const double se = std::sin(p.eta);

  FactoredFundamental f;
  f.structure.set_column(0, {{-std::tan(p.eta), 1.0, 0.0}});
  f.structure.set_column(1, {{kI * ce, kI * se, 1.0}});
  const Complex top = kI * (shifted_tau * w - 1.0);
  f.structure.set_column(2, {{top * ce, top * se, 1.0 + shifted_tau * w}});
  f.structure = detail::background_gauge(p.k, zeta) * f.structure;

  const Complex bright_phase = kI * p.nu0 * mix * zeta / (2.0 * gap);
  f.exponents[0] = 0.5 * kI * lambda * tau +
                   zeta * (0.5 * kI * p.k + kI * p.nu0 * (1.0 - 2.0 * mix) / (2.0 * gap));
  f.exponents[1] = bright_phase;
  f.exponents[2] = bright_phase;
  return f;
}

inline SeedKind seed_kind(const LambdaParams& p, const SpectralData& s) {
  return std::abs(s.eps0 - p.omega0) < kDegenerateSeedTolerance ? SeedKind::degenerate
                                                                 : SeedKind::regular;
}

inline FactoredFundamental seed_fundamental_for(SeedKind kind, const LambdaParams& p,
                                                const SpectralData& s, double zeta, double tau) {
  return kind == SeedKind::degenerate ? degenerate_seed_fundamental_factored(p, s, zeta, tau)
                                      : seed_fundamental_factored(p, s, zeta, tau);
}

/// (Phi0^-1)^dagger; its columns are biorthonormal to those of Phi0 and it
/// solves the Lax pair at conj(lambda0).
inline ComplexMatrix3 biorthogonal_partner(const ComplexMatrix3& phi0) {
  return adjoint(inverse(phi0));
}

namespace detail {

inline void check_psi1(const ComplexMatrix3& psi1) {
  ComplexMatrix3 unit_columns;
  for (std::size_t j = 0; j < 3; ++j) {
    const ComplexVector3 col = psi1.column(j);
    const double n = col.norm();
    if (!(n > 0.0)) throw Error(ErrorCode::DegeneratePsi, "Psi1 has a zero column");
    unit_columns.set_column(j, col / n);
  }
  if (!(std::abs(unit_columns.determinant()) > 1e-12)) {
    throw Error(ErrorCode::DegeneratePsi, "Psi1 columns are linearly dependent");
  }
}

}  // namespace detail

/// Psi1 = (psi1, psi2, psi3) with
///   psi3 = c1 Phi0^(1) + c2 Phi0^(2) + c3 Phi0^(3)
///   psi1 = (c2 + c3)* Pbar^(1) - c1* (Pbar^(2) + Pbar^(3))
///   psi2 = c3* Pbar^(2) - c2* Pbar^(3)
/// where Pbar is the biorthogonal partner of Phi0.
inline ComplexMatrix3 build_psi1(const ComplexMatrix3& phi0, const DressConstants& c) {
  if (c.all_zero()) throw Error(ErrorCode::DegenerateConstants, "all dressing constants vanish");
  const ComplexMatrix3 partner = biorthogonal_partner(phi0);
  const ComplexVector3 psi3 = c.c1 * phi0.column(0) + c.c2 * phi0.column(1) + c.c3 * phi0.column(2);
  const ComplexVector3 psi1 =
      (c.c2 + c.c3) * partner.column(0) - c.c1 * (partner.column(1) + partner.column(2));
  const ComplexVector3 psi2 = c.c3 * partner.column(1) - c.c2 * partner.column(2);
  const ComplexMatrix3 out = ComplexMatrix3::from_columns(psi1, psi2, psi3);
  detail::check_psi1(out);
  return out;
}

/// Overflow-safe psi3 from a factored seed, scaled to unit norm.
inline ComplexVector3 build_psi3_factored(const FactoredFundamental& seed, const DressConstants& c) {
  if (c.all_zero()) throw Error(ErrorCode::DegenerateConstants, "all dressing constants vanish");
  const std::array<double, 3> weights{c.c1, c.c2, c.c3};
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < 3; ++j) {
    if (weights[j] != 0.0) top = std::max(top, seed.exponents[j].real());
  }
  ComplexVector3 psi3;
  for (std::size_t j = 0; j < 3; ++j) {
    if (weights[j] != 0.0) {
      psi3 = psi3 + (weights[j] * std::exp(seed.exponents[j] - top)) * seed.structure.column(j);
    }
  }
  return detail::normalized(psi3);
}

/// Overflow-safe Psi1 from a factored seed. Columns come back with unit norm;
/// each one is the exact Psi1 column divided by a positive scalar.
inline ComplexMatrix3 build_psi1_factored(const FactoredFundamental& seed, const DressConstants& c) {
  const ComplexVector3 psi3 = build_psi3_factored(seed, c);
  const auto& ex = seed.exponents;
  // Partner columns scale as exp(-conj(E_j)).
  const ComplexMatrix3 partner_structure = adjoint(inverse(seed.structure));
  auto partner_combination = [&](const std::array<double, 3>& coef) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 3; ++j) {
      if (coef[j] != 0.0) peak = std::max(peak, -ex[j].real());
    }
    ComplexVector3 v;
    for (std::size_t j = 0; j < 3; ++j) {
      if (coef[j] != 0.0) {
        v = v + (coef[j] * std::exp(-std::conj(ex[j]) - peak)) * partner_structure.column(j);
      }
    }
    return v;
  };
  const ComplexVector3 psi1 = partner_combination({c.c2 + c.c3, -c.c1, -c.c1});
  const ComplexVector3 psi2 = partner_combination({0.0, c.c3, -c.c2});
  const ComplexMatrix3 out =
      ComplexMatrix3::from_columns(detail::normalized(psi1), detail::normalized(psi2), psi3);
  detail::check_psi1(out);
  return out;
}

/// sigma1(shift) = Psi1 (L - shift) Psi1^-1
inline ComplexMatrix3 sigma1(const ComplexMatrix3& psi1, const SpectralMatrixL& l, Complex shift) {
  const ComplexMatrix3 shifted = ComplexMatrix3::diagonal(l.l1 - shift, l.l2 - shift, l.l3 - shift);
  return psi1 * shifted * inverse(psi1);
}

struct DressedPair {
  ComplexMatrix3 h;
  ComplexMatrix3 rho;
};

namespace detail {

inline DressedPair dress_with(const ComplexMatrix3& seed_h, const ComplexMatrix3& seed_rho,
                              const ComplexMatrix3& at_zero, const ComplexMatrix3& at_delta,
                              const ComplexMatrix3& at_delta_inverse) {
  DressedPair out;
  out.h = seed_h - 0.5 * commutator(kLevelSign, at_zero);
  out.rho = at_delta * seed_rho * at_delta_inverse;
  (void)extract_fields(out.h);
  return out;
}

}  // namespace detail

/// H~ = H - 1/2 [D, sigma1(0)],  rho~ = sigma1(delta) rho sigma1(delta)^-1.
/// Throws NotLambdaStructured if the dressed Hamiltonian lost its shape.
inline DressedPair dress(const ComplexMatrix3& seed_h, const ComplexMatrix3& seed_rho,
                         const ComplexMatrix3& psi1, const SpectralMatrixL& l1, double delta) {
  const ComplexMatrix3 at_zero = sigma1(psi1, l1, 0.0);
  const ComplexMatrix3 at_delta = delta == 0.0 ? at_zero : sigma1(psi1, l1, delta);
  return detail::dress_with(seed_h, seed_rho, at_zero, at_delta, inverse(at_delta));
}

/// With L1 = diag(conj(l0), conj(l0), l0) and psi1, psi2 orthogonal to psi3,
/// sigma1(shift) = (conj(l0) - shift)(1 - P) + (l0 - shift) P, where P
/// projects onto psi3. Returns sigma1 and its inverse.
inline std::pair<ComplexMatrix3, ComplexMatrix3> sigma1_projector(const ComplexVector3& psi3,
                                                                  Complex lambda0, Complex shift) {
  const ComplexMatrix3 p = outer(psi3, psi3) / psi3.norm_squared();
  const ComplexMatrix3 q = ComplexMatrix3::identity() - p;
  const Complex below = std::conj(lambda0) - shift;
  const Complex above = lambda0 - shift;
  if (std::abs(below) <= kPoleGuard) {
    throw Error(ErrorCode::SpectralPole, "sigma1 is singular: lambda0 coincides with the shift");
  }
  return {below * q + above * p, q / below + p / above};
}

/// a -> c for the two-soliton family (eps0 > omega0):
///   c1 = a1 sqrt(2 eps0), c2 = sqrt(eps0 - s), c3 = a3 sqrt(eps0 + s).
inline DressConstants map_constants(const SolitonConstants& a, const SpectralData& s, double omega0) {
  if (!(s.eps0 > omega0)) {
    throw Error(ErrorCode::DegenerateMapping, "a -> c mapping requires eps0 > omega0");
  }
  const double root = std::sqrt(s.eps0 * s.eps0 - omega0 * omega0);
  const double lower = omega0 * omega0 / (s.eps0 + root);  // eps0 - root
  return {a.a1 * std::sqrt(2.0 * s.eps0), SolitonConstants::a2 * std::sqrt(lower),
          a.a3 * std::sqrt(s.eps0 + root)};
}

/// Inverse of map_constants up to the overall scale of c, which the dressing
/// ignores; the result is normalized to a2 = 1.
inline SolitonConstants unmap_constants(const DressConstants& c, const SpectralData& s, double omega0) {
  if (!(s.eps0 > omega0) || !(omega0 > 0.0)) {
    throw Error(ErrorCode::DegenerateMapping, "c -> a mapping requires eps0 > omega0 > 0");
  }
  if (c.c2 == 0.0) throw Error(ErrorCode::DegenerateConstants, "c2 = 0 cannot be normalized to a2 = 1");
  const double root = std::sqrt(s.eps0 * s.eps0 - omega0 * omega0);
  const double lower = omega0 * omega0 / (s.eps0 + root);
  const double a2 = c.c2 / std::sqrt(lower);
  return {c.c1 / std::sqrt(2.0 * s.eps0) / a2, c.c3 / std::sqrt(s.eps0 + root) / a2};
}

struct SeedResidual {
  double tau = 0.0;   ///< max |d_tau Phi0 - U Phi0| / max |Phi0|
  double zeta = 0.0;  ///< max |d_zeta Phi0 - V Phi0| / max |Phi0|
};

/// Central-difference residual of the seed fundamental matrix against the
/// Lax pair built from seed_hamiltonian and seed_density.
inline SeedResidual verify_seed(SeedKind kind, const LambdaParams& p, const SpectralData& s,
                                double zeta, double tau, double h = 1e-4) {
  auto phi = [&](double z, double t) { return seed_fundamental_for(kind, p, s, z, t).matrix(); };
  const ComplexMatrix3 centre = phi(zeta, tau);
  const double scale = centre.max_abs();
  const ComplexMatrix3 d_tau = (phi(zeta, tau + h) - phi(zeta, tau - h)) / (2.0 * h);
  const ComplexMatrix3 d_zeta = (phi(zeta + h, tau) - phi(zeta - h, tau)) / (2.0 * h);
  const ComplexMatrix3 u = lax_u(s.lambda0, seed_hamiltonian(p, zeta));
  const ComplexMatrix3 v = lax_v(s.lambda0, seed_density(p, zeta), p);
  return {(d_tau - u * centre).max_abs() / scale, (d_zeta - v * centre).max_abs() / scale};
}

inline constexpr double kSeedGateTolerance = 1e-6;

struct DressedPoint {
  FieldPair fields;
  ComplexMatrix3 h;
  ComplexMatrix3 rho;
};

/// Pointwise dressing of the background seed with fixed constants.
class DressingEngine {
 public:
  DressingEngine(const LambdaParams& p, const SpectralData& s, const DressConstants& c)
      : p_(p), s_(s), c_(c) {
    p_.validate();
    if (c_.all_zero()) throw Error(ErrorCode::DegenerateConstants, "all dressing constants vanish");
    kind_ = seed_kind(p_, s_);
    if (p_.k != 0.0) run_seed_gate();
  }

  SeedKind kind() const { return kind_; }
  const LambdaParams& params() const { return p_; }
  const SpectralData& spectral() const { return s_; }
  const DressConstants& constants() const { return c_; }

  DressedPoint at(double zeta, double tau) const {
    const FactoredFundamental seed = seed_fundamental_for(kind_, p_, s_, zeta, tau);
    const ComplexVector3 psi3 = build_psi3_factored(seed, c_);
    const auto [at_zero, unused] = sigma1_projector(psi3, s_.lambda0, 0.0);
    const auto [at_delta, at_delta_inverse] = sigma1_projector(psi3, s_.lambda0, p_.delta);
    const DressedPair pair =
        detail::dress_with(seed_hamiltonian(p_, zeta), seed_density(p_, zeta), at_zero, at_delta, at_delta_inverse);
    return {extract_fields(pair.h), pair.h, pair.rho};
  }

 private:
  void run_seed_gate() const {
    constexpr std::array<std::array<double, 2>, 3> probes{{{0.0, 0.0}, {1.0, 0.5}, {-0.7, 1.3}}};
    for (const auto& [zeta, tau] : probes) {
      const SeedResidual r = verify_seed(kind_, p_, s_, zeta, tau);
      if (r.tau > kSeedGateTolerance || r.zeta > kSeedGateTolerance) {
        throw Error(ErrorCode::UnverifiedSeed,
                    "seed fundamental matrix fails the Lax residual check (tau " +
                        std::to_string(r.tau) + ", zeta " + std::to_string(r.zeta) + ")");
      }
    }
  }

  LambdaParams p_;
  SpectralData s_;
  DressConstants c_;
  SeedKind kind_ = SeedKind::regular;
};

}  // namespace lambda_mb
