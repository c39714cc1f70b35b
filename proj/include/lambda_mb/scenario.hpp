#pragma once

// Scenario configuration and runner behind the command-line tool.
//
// Config files are flat `key = value` lines; `#` starts a comment. Every
// omitted key takes its default, which is the canned fig2 parameter set.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lambda_mb/analytic.hpp"
#include "lambda_mb/darboux.hpp"
#include "lambda_mb/error.hpp"
#include "lambda_mb/grid.hpp"
#include "lambda_mb/mbsolver.hpp"
#include "lambda_mb/model.hpp"
#include "lambda_mb/verify.hpp"

namespace lambda_mb {

enum class Engine { analytic, dressing, numeric, all };

struct Tolerances {
  double compare = 1e-9;  ///< analytic vs dressing, max |difference|
  double audit = 1e-8;    ///< density-matrix invariants
  double numeric = 1e-3;  ///< numeric vs analytic, max relative field error
  double order = 0.0;     ///< allowed |order - 2| of residuals; 0 disables the check
};

struct ScenarioConfig {
  std::string name = "scenario";
  Scenario scenario = Scenario::two_soliton;
  LambdaParams params;
  double eps0 = 2.0;
  std::variant<SolitonConstants, DressConstants> constants = DressConstants{1.0, 1.0, 1.0};
  GridSpec grid;
  Engine engine = Engine::all;
  std::string output = "out";
  std::vector<Complex> probes{{1.0, 1.0}, {0.0, 0.7}, {-2.0, 0.5}};
  Tolerances tol;
  std::optional<Tracker> track;
  Slicing track_slicing = Slicing::per_zeta;

  /// Physics-level parameters. Two-soliton family scenarios given in c-form
  /// are converted to a-form with unmap_constants.
  ScenarioParams scenario_params() const {
    ScenarioParams sp;
    sp.tag = scenario;
    sp.p = params;
    sp.s = SpectralData::from_eps(eps0, params.omega0);
    sp.constants = constants;
    const bool family = scenario == Scenario::two_soliton || scenario == Scenario::slow || scenario == Scenario::fast;
    if (family && std::holds_alternative<DressConstants>(constants)) {
      sp.constants = unmap_constants(std::get<DressConstants>(constants), sp.s, params.omega0);
    }
    return sp;
  }
};

inline bool operator==(const LambdaParams& a, const LambdaParams& b) {
  return a.nu0 == b.nu0 && a.delta == b.delta && a.omega0 == b.omega0 && a.eta == b.eta && a.k == b.k &&
         a.omega12_over_2pi_hz == b.omega12_over_2pi_hz && a.optical_wavelength_nm == b.optical_wavelength_nm;
}

inline bool operator==(const Tolerances& a, const Tolerances& b) {
  return a.compare == b.compare && a.audit == b.audit && a.numeric == b.numeric && a.order == b.order;
}

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.name == b.name && a.scenario == b.scenario && a.params == b.params && a.eps0 == b.eps0 &&
         a.constants == b.constants && a.grid == b.grid && a.engine == b.engine && a.output == b.output &&
         a.probes == b.probes && a.tol == b.tol && a.track == b.track && a.track_slicing == b.track_slicing;
}

namespace detail {

template <typename Enum>
struct NamedValue {
  std::string_view name;
  Enum value;
};

inline constexpr NamedValue<Scenario> kScenarioNames[] = {
    {"two_soliton", Scenario::two_soliton}, {"slow", Scenario::slow},       {"fast", Scenario::fast},
    {"zero_background", Scenario::zero_background}, {"exulton", Scenario::exulton}, {"exulton_k", Scenario::exulton_k},
};

inline constexpr NamedValue<Engine> kEngineNames[] = {
    {"analytic", Engine::analytic}, {"dressing", Engine::dressing}, {"numeric", Engine::numeric}, {"all", Engine::all},
};

inline constexpr NamedValue<Tracker> kTrackerNames[] = {
    {"min_of_Ia", Tracker::min_of_Ia}, {"max_of_Ia", Tracker::max_of_Ia}, {"max_of_Ib", Tracker::max_of_Ib},
    {"max_of_P1", Tracker::max_of_P1}, {"max_of_P3", Tracker::max_of_P3},
};

inline constexpr NamedValue<Slicing> kSlicingNames[] = {
    {"per_zeta", Slicing::per_zeta}, {"per_tau", Slicing::per_tau},
};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const NamedValue<Enum> (&table)[N], std::string_view name) {
  for (const auto& entry : table) {
    if (entry.name == name) return entry.value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const NamedValue<Enum> (&table)[N], Enum value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "unknown";
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(Complex z) {
  return "(" + format_double(z.real()) + "," + format_double(z.imag()) + ")";
}

class ConfigReader {
 public:
  ConfigReader(std::size_t line, std::size_t column) : line_(line), column_(column) {}

  [[noreturn]] void fail(const std::string& what) const { throw ConfigParseError(line_, column_, what); }

  double real(std::string_view v) const {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
      fail("expected a number, got '" + std::string(v) + "'");
    }
    return x;
  }

  std::size_t count(std::string_view v) const {
    std::size_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      fail("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return x;
  }

  /// Whitespace-separated list of "(re,im)" pairs.
  std::vector<Complex> complex_list(std::string_view v) const {
    std::vector<Complex> out;
    while (!(v = trim(v)).empty()) {
      if (v.front() != '(') fail("expected '(re,im)' in complex list");
      const auto close = v.find(')');
      const auto comma = v.find(',');
      if (close == std::string_view::npos || comma == std::string_view::npos || comma > close) {
        fail("malformed complex number '" + std::string(v) + "'");
      }
      out.emplace_back(real(trim(v.substr(1, comma - 1))), real(trim(v.substr(comma + 1, close - comma - 1))));
      v.remove_prefix(close + 1);
    }
    if (out.empty()) fail("probe list is empty");
    return out;
  }

  template <typename Enum, std::size_t N>
  Enum named(const NamedValue<Enum> (&table)[N], std::string_view v) const {
    if (auto e = lookup(table, v)) return *e;
    fail("unknown value '" + std::string(v) + "'");
  }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace detail

inline Engine engine_from_name(std::string_view name) {
  if (auto e = detail::lookup(detail::kEngineNames, name)) return *e;
  throw Error(ErrorCode::ParseError, "unknown engine '" + std::string(name) + "'");
}

/// Parses a config text. Unknown keys, repeated keys, malformed values and
/// parameter guard violations raise ConfigParseError.
inline ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  SolitonConstants a;
  DressConstants c;
  bool have_a = false;
  bool have_c = false;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> seen;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    const auto hash = raw.find('#');
    const std::string_view body = raw.substr(0, hash);
    if (detail::trim(body).empty()) continue;

    const std::size_t key_col = body.find_first_not_of(" \t") + 1;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigParseError(line_no, key_col, "expected 'key = value'");
    const std::string key(detail::trim(body.substr(0, eq)));
    const std::string_view value = detail::trim(body.substr(eq + 1));
    const std::size_t value_col = value.empty() ? eq + 2 : static_cast<std::size_t>(value.data() - raw.data()) + 1;
    if (key.empty()) throw ConfigParseError(line_no, key_col, "missing key");
    if (value.empty()) throw ConfigParseError(line_no, value_col, "missing value for '" + key + "'");
    if (!seen.emplace(key, std::make_pair(line_no, key_col)).second) {
      throw ConfigParseError(line_no, key_col, "repeated key '" + key + "'");
    }
    const detail::ConfigReader r(line_no, value_col);

    if (key == "name") cfg.name = std::string(value);
    else if (key == "scenario") cfg.scenario = r.named(detail::kScenarioNames, value);
    else if (key == "engine") cfg.engine = r.named(detail::kEngineNames, value);
    else if (key == "output") cfg.output = std::string(value);
    else if (key == "nu0") cfg.params.nu0 = r.real(value);
    else if (key == "delta") cfg.params.delta = r.real(value);
    else if (key == "omega0") cfg.params.omega0 = r.real(value);
    else if (key == "eta") cfg.params.eta = r.real(value);
    else if (key == "k") cfg.params.k = r.real(value);
    else if (key == "omega12_over_2pi_hz") cfg.params.omega12_over_2pi_hz = r.real(value);
    else if (key == "optical_wavelength_nm") cfg.params.optical_wavelength_nm = r.real(value);
    else if (key == "eps0") cfg.eps0 = r.real(value);
    else if (key == "a1") { a.a1 = r.real(value); have_a = true; }
    else if (key == "a3") { a.a3 = r.real(value); have_a = true; }
    else if (key == "c1") { c.c1 = r.real(value); have_c = true; }
    else if (key == "c2") { c.c2 = r.real(value); have_c = true; }
    else if (key == "c3") { c.c3 = r.real(value); have_c = true; }
    else if (key == "tau_min") cfg.grid.tau_min = r.real(value);
    else if (key == "tau_max") cfg.grid.tau_max = r.real(value);
    else if (key == "n_tau") cfg.grid.n_tau = r.count(value);
    else if (key == "zeta_min") cfg.grid.zeta_min = r.real(value);
    else if (key == "zeta_max") cfg.grid.zeta_max = r.real(value);
    else if (key == "n_zeta") cfg.grid.n_zeta = r.count(value);
    else if (key == "probes") cfg.probes = r.complex_list(value);
    else if (key == "tol_compare") cfg.tol.compare = r.real(value);
    else if (key == "tol_audit") cfg.tol.audit = r.real(value);
    else if (key == "tol_numeric") cfg.tol.numeric = r.real(value);
    else if (key == "tol_order") cfg.tol.order = r.real(value);
    else if (key == "track") cfg.track = r.named(detail::kTrackerNames, value);
    else if (key == "track_slicing") cfg.track_slicing = r.named(detail::kSlicingNames, value);
    else throw ConfigParseError(line_no, key_col, "unknown key '" + key + "'");
  }

  auto fail_at = [&](std::string_view key, const std::string& what) {
    const auto it = seen.find(key);
    if (it == seen.end()) throw ConfigParseError(0, 0, what);
    throw ConfigParseError(it->second.first, it->second.second, what);
  };
  if (have_a && have_c) fail_at(seen.count("a1") ? "a1" : "a3", "mix of a- and c-form constants");
  if (have_a) cfg.constants = a;
  if (have_c) cfg.constants = c;

  if (!(cfg.params.nu0 > 0.0)) fail_at("nu0", "nu0 must be positive");
  if (!(cfg.params.omega0 >= 0.0)) fail_at("omega0", "omega0 must be non-negative");
  if (!(cfg.params.eta >= 0.0 && cfg.params.eta <= std::numbers::pi / 2)) fail_at("eta", "eta must lie in [0, pi/2]");
  if (!(cfg.eps0 > 0.0)) fail_at("eps0", "eps0 must be positive");
  try {
    cfg.grid.validate();
  } catch (const Error& e) {
    const char* key = cfg.grid.n_tau < 3 ? "n_tau" : cfg.grid.n_zeta < 2 ? "n_zeta"
                      : !(cfg.grid.tau_max > cfg.grid.tau_min) ? "tau_max" : "zeta_max";
    fail_at(key, e.what());
  }
  for (double t : {cfg.tol.compare, cfg.tol.audit, cfg.tol.numeric, cfg.tol.order}) {
    if (!(t >= 0.0)) throw ConfigParseError(0, 0, "tolerances must be non-negative");
  }
  return cfg;
}

/// Emits every field as `key = value`; parse_config(to_manifest(c)) == c.
inline std::string to_manifest(const ScenarioConfig& cfg) {
  using detail::format_double;
  std::ostringstream os;
  os << "name = " << cfg.name << '\n';
  os << "scenario = " << scenario_name(cfg.scenario) << '\n';
  os << "engine = " << detail::name_of(detail::kEngineNames, cfg.engine) << '\n';
  os << "output = " << cfg.output << '\n';
  os << "nu0 = " << format_double(cfg.params.nu0) << '\n';
  os << "delta = " << format_double(cfg.params.delta) << '\n';
  os << "omega0 = " << format_double(cfg.params.omega0) << '\n';
  os << "eta = " << format_double(cfg.params.eta) << '\n';
  os << "k = " << format_double(cfg.params.k) << '\n';
  os << "omega12_over_2pi_hz = " << format_double(cfg.params.omega12_over_2pi_hz) << '\n';
  os << "optical_wavelength_nm = " << format_double(cfg.params.optical_wavelength_nm) << '\n';
  os << "eps0 = " << format_double(cfg.eps0) << '\n';
  if (const auto* a = std::get_if<SolitonConstants>(&cfg.constants)) {
    os << "a1 = " << format_double(a->a1) << '\n' << "a3 = " << format_double(a->a3) << '\n';
  } else {
    const auto& c = std::get<DressConstants>(cfg.constants);
    os << "c1 = " << format_double(c.c1) << '\n' << "c2 = " << format_double(c.c2) << '\n'
       << "c3 = " << format_double(c.c3) << '\n';
  }
  os << "tau_min = " << format_double(cfg.grid.tau_min) << '\n';
  os << "tau_max = " << format_double(cfg.grid.tau_max) << '\n';
  os << "n_tau = " << cfg.grid.n_tau << '\n';
  os << "zeta_min = " << format_double(cfg.grid.zeta_min) << '\n';
  os << "zeta_max = " << format_double(cfg.grid.zeta_max) << '\n';
  os << "n_zeta = " << cfg.grid.n_zeta << '\n';
  os << "probes =";
  for (const Complex& z : cfg.probes) os << ' ' << detail::format_complex(z);
  os << '\n';
  os << "tol_compare = " << format_double(cfg.tol.compare) << '\n';
  os << "tol_audit = " << format_double(cfg.tol.audit) << '\n';
  os << "tol_numeric = " << format_double(cfg.tol.numeric) << '\n';
  os << "tol_order = " << format_double(cfg.tol.order) << '\n';
  if (cfg.track) {
    os << "track = " << detail::name_of(detail::kTrackerNames, *cfg.track) << '\n';
    os << "track_slicing = " << detail::name_of(detail::kSlicingNames, cfg.track_slicing) << '\n';
  }
  return os.str();
}

/// Built-in scenarios, also shipped as files under scenarios/.
inline const std::map<std::string, std::string, std::less<>>& canned_scenarios() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"fig2",
       "# Slow and fast soliton on the background; the fast one knocks the slow one down\n"
       "name = fig2\nscenario = two_soliton\nnu0 = 3\ndelta = 0\nomega0 = 1\neps0 = 2\n"
       "c1 = 1\nc2 = 1\nc3 = 1\n"
       "tau_min = -20\ntau_max = 20\nn_tau = 401\nzeta_min = 0\nzeta_max = 8\nn_zeta = 161\n"
       "engine = all\ntol_numeric = 2e-2\n"},
      {"fig3",
       "# Zero background: light stored in the ground-state coherence\n"
       "name = fig3\nscenario = zero_background\nnu0 = 3\ndelta = 0\nomega0 = 0\neps0 = 2\n"
       "c1 = 1\nc2 = 1\nc3 = 1\n"
       "tau_min = -10\ntau_max = 10\nn_tau = 401\nzeta_min = -4\nzeta_max = 4\nn_zeta = 161\n"
       "engine = all\ntol_numeric = 2e-2\n"},
      {"fig4",
       "# Degenerate point eps0 = omega0: slow soliton and exulton\n"
       "name = fig4\nscenario = exulton\nnu0 = 3\ndelta = 0\nomega0 = 1\neps0 = 1\n"
       "c1 = 1\nc2 = 1\nc3 = 1\n"
       "tau_min = -10\ntau_max = 10\nn_tau = 401\nzeta_min = 0\nzeta_max = 8\nn_zeta = 161\n"
       "engine = all\ntol_compare = 1e-8\ntol_numeric = 2e-2\n"},
      {"slow",
       "# Slow soliton alone (a3 = 0)\n"
       "name = slow\nscenario = slow\nnu0 = 3\ndelta = 0\nomega0 = 1\neps0 = 2\na1 = 1\na3 = 0\n"
       "tau_min = -20\ntau_max = 60\nn_tau = 801\nzeta_min = 0\nzeta_max = 8\nn_zeta = 161\n"
       "engine = analytic\ntrack = min_of_Ia\n"},
      {"fast",
       "# Fast soliton alone (a1 = 0): travels at the speed of light\n"
       "name = fast\nscenario = fast\nnu0 = 3\ndelta = 0\nomega0 = 1\neps0 = 2\na1 = 0\na3 = 1\n"
       "tau_min = -20\ntau_max = 20\nn_tau = 401\nzeta_min = 0\nzeta_max = 8\nn_zeta = 161\n"
       "engine = analytic\ntrack = max_of_Ia\n"},
      {"exulton_k",
       "# Exulton on a background with phase wavenumber k\n"
       "name = exulton_k\nscenario = exulton_k\nnu0 = 3\ndelta = 0\nomega0 = 1\neps0 = 1\nk = 0.2\n"
       "c1 = 0\nc2 = 0\nc3 = 1\n"
       "tau_min = -10\ntau_max = 10\nn_tau = 401\nzeta_min = 0\nzeta_max = 8\nn_zeta = 161\n"
       "engine = analytic\ntol_compare = 1e-8\n"},
      {"slow_velocity",
       "# Slow soliton at eps0/omega0 = 10 for the group-velocity measurement\n"
       "name = slow_velocity\nscenario = slow\nnu0 = 3\ndelta = 0\nomega0 = 0.2\neps0 = 2\na1 = 1\na3 = 0\n"
       "tau_min = -1000\ntau_max = 2200\nn_tau = 3201\nzeta_min = 0\nzeta_max = 8\nn_zeta = 41\n"
       "engine = analytic\ntrack = min_of_Ia\n"},
  };
  return table;
}

inline ScenarioConfig canned_scenario(std::string_view name) {
  const auto& table = canned_scenarios();
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorCode::ParameterGuard, "unknown canned scenario '" + std::string(name) + "'");
  return parse_config(it->second);
}

/// CSV with header zeta,tau,re_Oa,im_Oa,re_Ob,im_Ob,Ia,Ib,P1,P2,P3; 12 significant digits.
inline void write_csv(std::ostream& os, const SolutionGrid& s) {
  os << "zeta,tau,re_Oa,im_Oa,re_Ob,im_Ob,Ia,Ib,P1,P2,P3\n";
  char buf[512];
  const GridSpec& g = s.spec();
  for (std::size_t j = 0; j < g.n_zeta; ++j) {
    for (std::size_t i = 0; i < g.n_tau; ++i) {
      const GridNode& n = s.at(j, i);
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                    g.zeta(j), g.tau(i), n.fields.omega_a.real(), n.fields.omega_a.imag(),
                    n.fields.omega_b.real(), n.fields.omega_b.imag(), n.obs.intensity_a, n.obs.intensity_b,
                    n.obs.p1, n.obs.p2, n.obs.p3);
      os << buf;
    }
  }
}

struct RunOptions {
  bool write_files = true;  ///< false for verification-only runs
};

struct RunResult {
  int exit_code = 0;
  std::string report;
  std::vector<std::filesystem::path> artifacts;
};

namespace detail {

class ReportWriter {
 public:
  void section(const std::string& title) { os_ << "[" << title << "]\n"; }

  void value(const std::string& key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    os_ << key << ": " << buf << '\n';
  }

  void text(const std::string& key, const std::string& v) { os_ << key << ": " << v << '\n'; }

  void check(const std::string& key, double v, double tol) {
    value(key, v);
    const bool ok = v <= tol;
    text(key + "_status", ok ? "pass" : "fail");
    if (!ok) failed_ = true;
  }

  void fail(const std::string& key, const std::string& why) {
    text(key, why);
    failed_ = true;
  }

  void raw(const std::string& block) { os_ << block; }

  bool failed() const { return failed_; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool failed_ = false;
};

inline void residual_checks(ReportWriter& w, const std::string& label, const ScenarioConfig& cfg,
                            const ScenarioParams& sp, const SolutionGrid& grid) {
  const ResidualReport pde = pde_residual(grid, sp.p);
  std::optional<ResidualReport> pde_fine;
  std::optional<SolutionGrid> fine;
  if (cfg.tol.order > 0.0) {
    fine.emplace(analytic_grid(sp, cfg.grid.refined()));
    pde_fine = with_convergence_order(pde, pde_residual(*fine, sp.p));
  }
  w.section(label + " pde_residual");
  w.raw((pde_fine ? *pde_fine : pde).to_text());
  auto order_check = [&](const ResidualReport& r, const std::string& key) {
    if (!r.convergence_order) return;
    w.check(key + "_order_deviation", std::abs(*r.convergence_order - 2.0), cfg.tol.order);
  };
  if (pde_fine) order_check(*pde_fine, "pde");
  for (const Complex& lambda : cfg.probes) {
    const ResidualReport zc = zero_curvature_residual(grid, lambda, sp.p);
    w.section(label + " zero_curvature " + format_complex(lambda));
    if (fine) {
      const ResidualReport zc_fine = with_convergence_order(zc, zero_curvature_residual(*fine, lambda, sp.p));
      w.raw(zc_fine.to_text());
      order_check(zc_fine, "zero_curvature");
    } else {
      w.raw(zc.to_text());
    }
  }
}

inline void audit_check(ReportWriter& w, const std::string& label, const SolutionGrid& grid, double tol) {
  const DensityAudit audit = audit_density(grid);
  w.section(label + " density_audit");
  w.value("hermiticity", audit.hermiticity);
  w.value("trace", audit.trace);
  w.value("negativity", audit.negativity);
  if (audit.purity) w.value("purity", *audit.purity);
  w.check("audit_max", audit.worst(), tol);
}

inline std::vector<FieldPair> initial_profile(const ScenarioParams& sp, const GridSpec& g) {
  std::vector<FieldPair> out(g.n_tau);
  for (std::size_t i = 0; i < g.n_tau; ++i) out[i] = evaluate(sp, g.zeta_min, g.tau(i)).fields;
  return out;
}

}  // namespace detail

/// Runs the configured engines, writes CSV grids, a report and a manifest
/// into cfg.output, and returns 0 when every check passes, 1 otherwise.
/// Engine errors are reported by their error name and also yield 1.
inline RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {}) {
  RunResult result;
  detail::ReportWriter w;
  w.section("run");
  w.text("name", cfg.name);
  w.text("scenario", std::string(scenario_name(cfg.scenario)));
  w.text("engine", std::string(detail::name_of(detail::kEngineNames, cfg.engine)));

  std::filesystem::path dir(cfg.output);
  auto emit = [&](const std::string& file, const auto& writer) {
    if (!opts.write_files) return;
    std::filesystem::create_directories(dir);
    const auto path = dir / file;
    std::ofstream out(path, std::ios::binary);
    writer(out);
    result.artifacts.push_back(path);
  };

  std::string manifest = to_manifest(cfg);
  try {
    const ScenarioParams sp = cfg.scenario_params();
    if (const auto* a = std::get_if<SolitonConstants>(&sp.constants);
        a && std::holds_alternative<DressConstants>(cfg.constants)) {
      manifest += "# derived a1 = " + detail::format_double(a->a1) + "\n";
      manifest += "# derived a3 = " + detail::format_double(a->a3) + "\n";
    }
    const bool want_analytic = cfg.engine != Engine::dressing;
    const bool want_dressing = cfg.engine == Engine::dressing || cfg.engine == Engine::all;
    const bool want_numeric = cfg.engine == Engine::numeric || cfg.engine == Engine::all;

    std::optional<SolutionGrid> analytic;
    if (want_analytic) {
      analytic.emplace(analytic_grid(sp, cfg.grid));
      emit(cfg.name + "_analytic.csv", [&](std::ostream& os) { write_csv(os, *analytic); });
      detail::residual_checks(w, "analytic", cfg, sp, *analytic);
      detail::audit_check(w, "analytic", *analytic, cfg.tol.audit);
      if (cfg.track) {
        const VelocityEstimate v = track_feature(*analytic, *cfg.track, cfg.track_slicing);
        w.section("analytic velocity");
        w.text("tracker", std::string(detail::name_of(detail::kTrackerNames, *cfg.track)));
        w.value("slope", v.slope);
        w.value("velocity", v.velocity);
        if (cfg.scenario == Scenario::slow) w.value("formula_velocity", slow_group_velocity(sp.p, sp.s));
      }
    }
    if (want_dressing) {
      const SolutionGrid dressed = dressing_grid(sp.p, sp.s, dressing_constants(sp), cfg.grid);
      emit(cfg.name + "_dressing.csv", [&](std::ostream& os) { write_csv(os, dressed); });
      detail::audit_check(w, "dressing", dressed, cfg.tol.audit);
      if (analytic) {
        const ResidualReport cmp = compare_solutions(*analytic, dressed);
        w.section("dressing vs analytic");
        w.raw(cmp.to_text());
        w.check("fields_difference", cmp.details[0].second, cfg.tol.compare);
      }
    }
    if (want_numeric) {
      if (!analytic) analytic.emplace(analytic_grid(sp, cfg.grid));
      const auto initial = detail::initial_profile(sp, cfg.grid);
      PropagateOptions po;
      po.edge_reference = initial.front();
      po.boundary_rho = [&](double zeta) { return evaluate(sp, zeta, cfg.grid.tau_min).state.density(); };
      const SolutionGrid numeric = propagate(initial, sp.p, cfg.grid, po);
      emit(cfg.name + "_numeric.csv", [&](std::ostream& os) { write_csv(os, numeric); });
      double peak = 0.0;
      for (const GridNode& n : analytic->nodes()) {
        peak = std::max({peak, std::abs(n.fields.omega_a), std::abs(n.fields.omega_b)});
      }
      const ResidualReport cmp = compare_solutions(*analytic, numeric);
      w.section("numeric vs analytic");
      w.raw(cmp.to_text());
      w.check("relative_field_error", cmp.details[0].second / std::max(peak, 1e-300), cfg.tol.numeric);
      // RK4 is not exactly unitary: eigenvalues are held to the solver's band
      const DensityAudit audit = audit_density(numeric);
      w.section("numeric density_audit");
      w.check("hermiticity", audit.hermiticity, cfg.tol.audit);
      w.check("trace", audit.trace, cfg.tol.audit);
      w.check("negativity", audit.negativity, kEigenvalueBand);
    }
  } catch (const Error& e) {
    w.section("error");
    w.fail("error", e.what());
  }
  w.section("result");
  w.text("status", w.failed() ? "fail" : "pass");
  result.exit_code = w.failed() ? 1 : 0;
  result.report = w.str();
  emit(cfg.name + "_report.txt", [&](std::ostream& os) { os << result.report; });
  emit(cfg.name + "_manifest.txt", [&](std::ostream& os) { os << manifest; });
  return result;
}

}  // namespace lambda_mb
