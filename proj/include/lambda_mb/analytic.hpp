#pragma once

// Closed-form solutions over the constant background: the slow/fast
// two-soliton family, its reductions, the zero-background (stored light)
// solution and the degenerate eps0 == omega0 family.
//
// Exponentials are combined in log space and divided by the largest one
// before summation, so every evaluator stays finite for arbitrary |tau|.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string_view>
#include <variant>

#include "lambda_mb/algebra.hpp"
#include "lambda_mb/darboux.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/model.hpp"

namespace lambda_mb {

enum class Scenario { two_soliton, slow, fast, zero_background, exulton, exulton_k };

inline constexpr std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::two_soliton: return "two_soliton";
    case Scenario::slow: return "slow";
    case Scenario::fast: return "fast";
    case Scenario::zero_background: return "zero_background";
    case Scenario::exulton: return "exulton";
    case Scenario::exulton_k: return "exulton_k";
  }
  return "unknown";
}

struct ScenarioParams {
  Scenario tag = Scenario::two_soliton;
  LambdaParams p;
  SpectralData s = SpectralData::from_eps(2.0, 1.0);
  std::variant<SolitonConstants, DressConstants> constants = SolitonConstants{};

  bool has_soliton_constants() const { return std::holds_alternative<SolitonConstants>(constants); }
  const SolitonConstants& a() const;
  const DressConstants& c() const;
};

struct AnalyticPoint {
  FieldPair fields;
  AtomState state;
};

namespace detail {

inline void guard(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ParameterGuard, what);
}

inline bool is_degenerate_point(const ScenarioParams& sp) {
  return std::abs(sp.s.eps0 - sp.p.omega0) < kDegenerateSeedTolerance;
}

inline double largest(std::initializer_list<double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  return m;
}

/// coef * exp(x - m), exactly zero for a vanishing coefficient even when the
/// exponential alone would overflow.
inline double weighted_exp(double coef, double x, double m) { return coef == 0.0 ? 0.0 : coef * std::exp(x - m); }

inline double strict_root(double eps0, double omega0) { return std::sqrt(eps0 * eps0 - omega0 * omega0); }

/// eps0 - sqrt(eps0^2 - omega0^2) without cancellation.
inline double lower_gap(double eps0, double omega0) {
  return omega0 * omega0 / (eps0 + strict_root(eps0, omega0));
}

/// sqrt((delta + i eps)/(delta - i eps)) == (delta + i eps)/|delta + i eps|
inline Complex detuning_phase(double delta, double eps0) {
  return Complex(delta, eps0) / std::hypot(delta, eps0);
}

inline void require_two_soliton_regime(const ScenarioParams& sp) {
  guard(sp.p.omega0 > 0.0 && sp.s.eps0 > sp.p.omega0, "requires eps0 > omega0 > 0");
  guard(sp.p.k == 0.0 && sp.p.eta == 0.0, "requires k = 0 and eta = 0");
  guard(sp.has_soliton_constants(), "requires soliton constants (a1, a3)");
}

inline FieldPair slow_fields(const LambdaParams& p, double eps0, double a1, double zeta, double tau);

}  // namespace detail

inline const SolitonConstants& ScenarioParams::a() const {
  detail::guard(has_soliton_constants(), "scenario expects soliton constants (a1, a3)");
  return std::get<SolitonConstants>(constants);
}

inline const DressConstants& ScenarioParams::c() const {
  detail::guard(!has_soliton_constants(), "scenario expects dressing constants (c1, c2, c3)");
  return std::get<DressConstants>(constants);
}

/// Phase of the slow soliton:
///   zeta eps0 nu0 / (2(delta^2 + eps0^2)) - tau (eps0 - s)/2 + ln|a1|
inline double slow_phase(const LambdaParams& p, double eps0, double a1, double zeta, double tau) {
  const double lower = detail::lower_gap(eps0, p.omega0);
  return zeta * eps0 * p.nu0 / (2.0 * (p.delta * p.delta + eps0 * eps0)) - 0.5 * tau * lower +
         std::log(std::abs(a1));
}

/// Dressing constants that reproduce the scenario through DressingEngine.
inline DressConstants dressing_constants(const ScenarioParams& sp) {
  switch (sp.tag) {
    case Scenario::two_soliton:
    case Scenario::slow:
    case Scenario::fast: {
      SolitonConstants a = sp.a();
      if (sp.tag == Scenario::slow) a.a3 = 0.0;
      if (sp.tag == Scenario::fast) a.a1 = 0.0;
      return map_constants(a, sp.s, sp.p.omega0);
    }
    case Scenario::zero_background: {
      // the constants label the excited, dark and bright columns
      const DressConstants& c = sp.c();
      return {c.c2, c.c3, c.c1};
    }
    case Scenario::exulton:
    case Scenario::exulton_k: return sp.c();
  }
  return sp.c();
}

/// Fields of the slow + fast soliton pair on the background (eps0 > omega0 > 0).
inline FieldPair two_soliton_fields(const ScenarioParams& sp, double zeta, double tau) {
  detail::require_two_soliton_regime(sp);
  const auto& p = sp.p;
  const double eps = sp.s.eps0;
  const double w = p.omega0;
  const double root = detail::strict_root(eps, w);
  const double lower = detail::lower_gap(eps, w);
  const double a1 = sp.a().a1;
  const double a3 = sp.a().a3;
  const double r2 = p.delta * p.delta + eps * eps;

  // log-exponents of the denominator terms
  const double x_fast = tau * root;
  const double x_slow = -tau * eps + zeta * p.nu0 * eps / r2;
  const double m = detail::largest({a3 != 0.0 ? x_fast : -HUGE_VAL, -x_fast,
                                    a3 != 0.0 ? 0.0 : -HUGE_VAL, a1 != 0.0 ? x_slow : -HUGE_VAL});
  using detail::weighted_exp;
  const double e_back = std::exp(-x_fast - m);
  const double den = weighted_exp(a3 * a3, x_fast, m) + e_back + weighted_exp(2.0 * a3 * w / eps, 0.0, m) +
                     weighted_exp(a1 * a1, x_slow, m);
  const double num_a =
      weighted_exp(a3 * a3 * w, x_fast, m) + w * e_back + weighted_exp(2.0 * a3 * eps, 0.0, m);
  FieldPair f;
  f.omega_a = w - 2.0 * num_a / den;
  if (a1 != 0.0) {
    const Complex phase = std::exp(kI * (zeta * p.nu0 * p.delta / (2.0 * r2)));
    const double mix = weighted_exp(a3 * std::sqrt(eps + root), 0.5 * (x_slow + x_fast), m) +
                       std::exp(0.5 * (x_slow - x_fast) - m) * std::sqrt(lower);
    f.omega_b = -2.0 * kI * std::sqrt(2.0 * eps) * a1 * phase * mix / den;
  }
  return f;
}

/// Slow + fast soliton pair with the atom state taken from the dressing.
inline AnalyticPoint two_soliton(const ScenarioParams& sp, double zeta, double tau) {
  const FieldPair f = two_soliton_fields(sp, zeta, tau);
  const DressingEngine engine(sp.p, sp.s, map_constants(sp.a(), sp.s, sp.p.omega0));
  return {f, AtomState(engine.at(zeta, tau).rho)};
}

namespace detail {

inline FieldPair slow_fields(const LambdaParams& p, double eps0, double a1, double zeta, double tau) {
  const double phi = slow_phase(p, eps0, a1, zeta, tau);
  const double r2 = p.delta * p.delta + eps0 * eps0;
  const double lower = lower_gap(eps0, p.omega0);
  const Complex phase = std::exp(kI * (zeta * p.nu0 * p.delta / (2.0 * r2)));
  return {p.omega0 * std::tanh(phi), -kI * phase * std::sqrt(2.0 * eps0 * lower) / std::cosh(phi)};
}

}  // namespace detail

/// Slow soliton (a3 = 0) with its pure atomic state. Requires a1 > 0.
inline AnalyticPoint slow_soliton(const ScenarioParams& sp, double zeta, double tau) {
  detail::require_two_soliton_regime(sp);
  const double a1 = sp.a().a1;
  detail::guard(a1 > 0.0, "slow soliton requires a1 > 0");
  const auto& p = sp.p;
  const double eps = sp.s.eps0;
  const FieldPair f = detail::slow_fields(p, eps, a1, zeta, tau);

  const double r = std::hypot(p.delta, eps);
  const double upper = eps + detail::strict_root(eps, p.omega0);
  // sqrt(upper / lower) == upper / omega0
  ComplexVector3 psi;
  psi[0] = kI * f.omega_b * upper / (p.omega0 * 2.0 * r);
  psi[1] = p.delta / r - kI * (eps / (p.omega0 * r)) * f.omega_a;
  psi[2] = f.omega_b / (2.0 * r);
  return {f, AtomState(psi)};
}

/// Group velocity of the slow soliton for eps0 >> omega0, in units of c.
inline double slow_group_velocity(const LambdaParams& p, const SpectralData& s) {
  const double eps = s.eps0;
  return p.omega0 * p.omega0 * (p.delta * p.delta + eps * eps) / (2.0 * eps * eps * p.nu0);
}

/// Fast soliton (a1 = 0), travelling at the speed of light. Requires a3 > 0.
inline FieldPair fast_soliton(const ScenarioParams& sp, double tau) {
  detail::require_two_soliton_regime(sp);
  const double a3 = sp.a().a3;
  detail::guard(a3 > 0.0, "fast soliton requires a3 > 0");
  const double eps = sp.s.eps0;
  const double w = sp.p.omega0;
  const double phi = tau * detail::strict_root(eps, w) + std::log(a3);
  // (cosh + eps/w) / (cosh + w/eps), scaled by e^{-|phi|}
  const double scale = std::exp(-std::abs(phi));
  const double ch = 0.5 * (1.0 + scale * scale);
  const double ratio = (ch + eps / w * scale) / (ch + w / eps * scale);
  return {w * (1.0 - 2.0 * ratio), 0.0};
}

/// Zero background (omega0 = 0): light stored in the ground-state coherence.
inline AnalyticPoint zero_background(const ScenarioParams& sp, double zeta, double tau) {
  const auto& p = sp.p;
  detail::guard(p.omega0 == 0.0, "zero background requires omega0 = 0");
  detail::guard(p.k == 0.0 && p.eta == 0.0, "requires k = 0 and eta = 0");
  const DressConstants& c = sp.c();
  if (c.c3 == 0.0) throw Error(ErrorCode::DegenerateConstants, "c3 = 0 leaves the soliton phase undefined");
  if (c.all_zero()) throw Error(ErrorCode::DegenerateConstants, "all dressing constants vanish");
  const double eps = sp.s.eps0;
  const double r2 = p.delta * p.delta + eps * eps;
  const double r = std::sqrt(r2);
  const double q = zeta * eps * p.nu0 / (2.0 * r2);

  // 2 c2 c3 cosh(q + ln(c2/c3)) == c2^2 e^q + c3^2 e^-q
  const double m = detail::largest({c.c2 != 0.0 ? q : -HUGE_VAL, -q, c.c1 != 0.0 ? 2.0 * eps * tau - q : -HUGE_VAL});
  using detail::weighted_exp;
  const double den = weighted_exp(c.c2 * c.c2, q, m) + c.c3 * c.c3 * std::exp(-q - m) +
                     weighted_exp(c.c1 * c.c1, 2.0 * eps * tau - q, m);
  const Complex phase = std::exp(kI * (zeta * p.nu0 * p.delta / (2.0 * r2)));
  const Complex core = -4.0 * kI * eps / den;

  FieldPair f;
  f.omega_a = core * weighted_exp(c.c1 * c.c3, eps * tau - q, m);
  f.omega_b = core * phase * weighted_exp(c.c1 * c.c2, eps * tau, m);

  ComplexVector3 psi;
  psi[0] = core * phase * weighted_exp(c.c2 * c.c3, 0.0, m) / (2.0 * r);
  psi[1] = detail::detuning_phase(p.delta, eps) + core * weighted_exp(c.c2 * c.c2, q, m) / (2.0 * r);
  psi[2] = f.omega_b / (2.0 * r);
  return {f, AtomState(psi)};
}

/// Degenerate family eps0 == omega0: slow soliton plus the rational exulton.
inline AnalyticPoint exulton(const ScenarioParams& sp, double zeta, double tau) {
  const auto& p = sp.p;
  detail::guard(p.omega0 > 0.0 && detail::is_degenerate_point(sp), "exulton requires eps0 = omega0 > 0");
  detail::guard(p.k == 0.0 && p.eta == 0.0, "exulton requires k = 0 and eta = 0");
  const DressConstants& c = sp.c();
  if (c.all_zero()) throw Error(ErrorCode::DegenerateConstants, "all dressing constants vanish");
  const double w = p.omega0;
  const double r2 = p.delta * p.delta + w * w;
  const double r = std::sqrt(r2);
  const double phi = zeta * w * p.nu0 / (2.0 * r2) - 0.5 * tau * w;
  const double x = c.c2 + c.c3 * tau * w;
  const double y = x + c.c3;

  const double m = c.c1 != 0.0 ? std::abs(phi) : -phi;
  const double up = detail::weighted_exp(1.0, c.c1 != 0.0 ? phi : -HUGE_VAL, m);
  const double down = std::exp(-phi - m);
  const double den = c.c1 * c.c1 * up + 2.0 * down * (x * x + c.c3 * c.c3);
  if (!(den > 0.0)) throw Error(ErrorCode::DegenerateConstants, "exulton denominator vanished");
  const Complex phase = std::exp(kI * (zeta * p.nu0 * p.delta / (2.0 * r2)));
  const Complex core = -4.0 * kI * w * c.c1 * phase * std::exp(-m) / den;  // omega_b / y

  FieldPair f;
  f.omega_a = w * (c.c1 * c.c1 * up - 2.0 * down * (x * x - 3.0 * c.c3 * c.c3)) / den;
  f.omega_b = core * y;

  ComplexVector3 psi;
  psi[0] = core * kI * (c.c2 - c.c3 + c.c3 * tau * w) / (2.0 * r);
  psi[1] = detail::detuning_phase(p.delta, w) - 4.0 * kI * w * c.c1 * c.c1 * up / den / (2.0 * r);
  psi[2] = f.omega_b / (2.0 * r);
  return {f, AtomState(psi)};
}

/// Pure exulton (c1 = c2 = 0) on a background with phase wavenumber k.
/// The background phase e^{ik zeta} multiplies the whole bracket, so that
/// |omega_a| -> omega0 for |tau| -> infinity.
inline FieldPair exulton_k(const ScenarioParams& sp, double zeta, double tau) {
  const auto& p = sp.p;
  detail::guard(p.omega0 > 0.0 && detail::is_degenerate_point(sp), "exulton requires eps0 = omega0 > 0");
  detail::guard(p.k != 0.0, "exulton_k requires k != 0");
  detail::guard(p.eta == 0.0, "exulton_k requires eta = 0");
  const DressConstants& c = sp.c();
  detail::guard(c.c1 == 0.0 && c.c2 == 0.0 && c.c3 != 0.0, "exulton_k requires c1 = c2 = 0, c3 != 0");
  const double w = p.omega0;
  const double d = p.delta;
  const double kz = p.k * zeta;
  const Complex left = kI * d * (1.0 + tau * w) + w * (Complex(1.0 + tau * w, -kz));
  const Complex right = kI * d * (1.0 - tau * w) + w * (Complex(-1.0 + tau * w, kz));
  const double den = d * d + (1.0 + (kz - d * tau) * (kz - d * tau)) * w * w + tau * tau * w * w * w * w;
  return {w * std::exp(kI * kz) * (1.0 - 2.0 * left * right / den), 0.0};
}

/// Fields and atom state for any scenario. States without a closed form
/// (two-soliton, exulton_k) come from the dressing; the fast soliton leaves
/// the atoms in the dark state.
inline AnalyticPoint evaluate(const ScenarioParams& sp, double zeta, double tau) {
  switch (sp.tag) {
    case Scenario::two_soliton: return two_soliton(sp, zeta, tau);
    case Scenario::slow: return slow_soliton(sp, zeta, tau);
    case Scenario::fast: return {fast_soliton(sp, tau), AtomState(dark_state(0.0))};
    case Scenario::zero_background: return zero_background(sp, zeta, tau);
    case Scenario::exulton: return exulton(sp, zeta, tau);
    case Scenario::exulton_k: {
      const FieldPair f = exulton_k(sp, zeta, tau);
      const DressingEngine engine(sp.p, sp.s, sp.c());
      return {f, AtomState(engine.at(zeta, tau).rho)};
    }
  }
  throw Error(ErrorCode::ParameterGuard, "unknown scenario");
}

inline Observables intensities_and_populations(const FieldPair& f, const AtomState& st) {
  return observe(f, st.density());
}

}  // namespace lambda_mb
