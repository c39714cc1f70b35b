#pragma once

// Uniform (zeta, tau) grids and per-node solution storage.
//
// Nodes are stored row-major: all tau samples of the first zeta slice, then
// the next slice.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "lambda_mb/analytic.hpp"
#include "lambda_mb/darboux.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/model.hpp"

namespace lambda_mb {

struct GridSpec {
  double tau_min = -20.0;
  double tau_max = 20.0;
  std::size_t n_tau = 101;
  double zeta_min = 0.0;
  double zeta_max = 8.0;
  std::size_t n_zeta = 101;

  void validate() const {
    if (n_tau < 3) throw Error(ErrorCode::ParameterGuard, "n_tau must be at least 3");
    if (n_zeta < 2) throw Error(ErrorCode::ParameterGuard, "n_zeta must be at least 2");
    if (!(tau_max > tau_min)) throw Error(ErrorCode::ParameterGuard, "tau_max must exceed tau_min");
    if (!(zeta_max > zeta_min)) throw Error(ErrorCode::ParameterGuard, "zeta_max must exceed zeta_min");
  }

  double h_tau() const { return (tau_max - tau_min) / static_cast<double>(n_tau - 1); }
  double h_zeta() const { return (zeta_max - zeta_min) / static_cast<double>(n_zeta - 1); }

  // endpoints are hit exactly
  double tau(std::size_t i) const {
    return i + 1 == n_tau ? tau_max : tau_min + static_cast<double>(i) * h_tau();
  }
  double zeta(std::size_t j) const {
    return j + 1 == n_zeta ? zeta_max : zeta_min + static_cast<double>(j) * h_zeta();
  }

  std::size_t size() const { return n_tau * n_zeta; }

  /// Same domain with every step halved.
  GridSpec refined() const {
    GridSpec g = *this;
    g.n_tau = 2 * n_tau - 1;
    g.n_zeta = 2 * n_zeta - 1;
    return g;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GridNode {
  FieldPair fields;
  ComplexMatrix3 rho;
  Observables obs;
};

class SolutionGrid {
 public:
  /// `pure_states` records that every node claims a pure atomic state; the
  /// density audit then also checks purity.
  explicit SolutionGrid(const GridSpec& spec, bool pure_states = false)
      : spec_(spec), pure_states_(pure_states) {
    spec_.validate();
    nodes_.resize(spec_.size());
  }

  const GridSpec& spec() const { return spec_; }
  bool pure_states() const { return pure_states_; }

  std::size_t index(std::size_t i_zeta, std::size_t i_tau) const { return i_zeta * spec_.n_tau + i_tau; }

  const GridNode& at(std::size_t i_zeta, std::size_t i_tau) const { return nodes_[index(i_zeta, i_tau)]; }

  void set(std::size_t i_zeta, std::size_t i_tau, const FieldPair& f, const ComplexMatrix3& rho) {
    nodes_[index(i_zeta, i_tau)] = {f, rho, observe(f, rho)};
  }

  const std::vector<GridNode>& nodes() const { return nodes_; }

 private:
  GridSpec spec_;
  bool pure_states_ = false;
  std::vector<GridNode> nodes_;
};

using PointEvaluator = std::function<std::pair<FieldPair, ComplexMatrix3>(double zeta, double tau)>;

inline SolutionGrid fill_grid(const GridSpec& spec, const PointEvaluator& eval, bool pure_states) {
  SolutionGrid grid(spec, pure_states);
  for (std::size_t j = 0; j < spec.n_zeta; ++j) {
    const double zeta = spec.zeta(j);
    for (std::size_t i = 0; i < spec.n_tau; ++i) {
      const auto [f, rho] = eval(zeta, spec.tau(i));
      grid.set(j, i, f, rho);
    }
  }
  return grid;
}

/// Closed-form evaluators sampled on the grid.
inline SolutionGrid analytic_grid(const ScenarioParams& sp, const GridSpec& spec) {
  const bool pure = sp.tag != Scenario::exulton_k;
  if (sp.tag == Scenario::two_soliton || sp.tag == Scenario::exulton_k) {
    // these states come from the dressing; build the engine once
    const DressingEngine engine(sp.p, sp.s, dressing_constants(sp));
    return fill_grid(
        spec,
        [&](double zeta, double tau) {
          const FieldPair f = sp.tag == Scenario::two_soliton ? two_soliton_fields(sp, zeta, tau)
                                                              : exulton_k(sp, zeta, tau);
          return std::make_pair(f, engine.at(zeta, tau).rho);
        },
        pure);
  }
  return fill_grid(
      spec,
      [&](double zeta, double tau) {
        const AnalyticPoint pt = evaluate(sp, zeta, tau);
        return std::make_pair(pt.fields, pt.state.density());
      },
      pure);
}

/// Dressed solution sampled on the grid.
inline SolutionGrid dressing_grid(const LambdaParams& p, const SpectralData& s, const DressConstants& c,
                                  const GridSpec& spec) {
  const DressingEngine engine(p, s, c);
  return fill_grid(
      spec,
      [&](double zeta, double tau) {
        const DressedPoint pt = engine.at(zeta, tau);
        return std::make_pair(pt.fields, pt.rho);
      },
      p.k == 0.0);
}

}  // namespace lambda_mb
