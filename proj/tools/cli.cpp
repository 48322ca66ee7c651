#include "qsl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsl/asymptotics.hpp"
#include "qsl/continuum.hpp"
#include "qsl/errors.hpp"
#include "qsl/specfun.hpp"
#include "qsl/spectral_sum.hpp"

namespace qsl::cli {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// ---- parameter registry -------------------------------------------------------
// Every option is bound to a variable and remembered here, so the effective
// configuration can be echoed and a JSON config can be turned back into flags.

struct Param {
  enum class Type { Int, Real, Text, Flag };
  std::string name;
  Type type;
  void* target;
  CLI::Option* option;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<Param> params;

  CLI::Option* add(const std::string& name, int& v, const std::string& help) {
    auto* o = app->add_option("--" + name, v, help)->capture_default_str();
    params.push_back({name, Param::Type::Int, &v, o});
    return o;
  }
  CLI::Option* add(const std::string& name, double& v, const std::string& help) {
    auto* o = app->add_option("--" + name, v, help)->capture_default_str();
    params.push_back({name, Param::Type::Real, &v, o});
    return o;
  }
  CLI::Option* add(const std::string& name, std::string& v, const std::string& help) {
    auto* o = app->add_option("--" + name, v, help)->capture_default_str();
    params.push_back({name, Param::Type::Text, &v, o});
    return o;
  }
  CLI::Option* flag(const std::string& name, bool& v, const std::string& help) {
    auto* o = app->add_flag("--" + name, v, help);
    params.push_back({name, Param::Type::Flag, &v, o});
    return o;
  }
  const Param* find(const std::string& name) const {
    for (const auto& p : params)
      if (p.name == name) return &p;
    return nullptr;
  }
  bool given(const std::string& name) const {
    const auto* p = find(name);
    return p && p->option->count() > 0;
  }
  json echo() const {
    json j = json::object();
    j["command"] = app->get_name();
    for (const auto& p : params) {
      if (p.name == "out") continue;
      switch (p.type) {
        case Param::Type::Int: j[p.name] = *static_cast<int*>(p.target); break;
        case Param::Type::Real: j[p.name] = *static_cast<double*>(p.target); break;
        case Param::Type::Text: j[p.name] = *static_cast<std::string*>(p.target); break;
        case Param::Type::Flag: j[p.name] = *static_cast<bool*>(p.target); break;
      }
    }
    return j;
  }
};

// Config documents are either plain JSON objects or one of our own CSV outputs,
// whose "# config: " line carries the echo.
json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string tag = "# config: ";
  json j;
  try {
    auto pos = text.find(tag);
    if (!text.empty() && text[0] == '#' && pos != std::string::npos) {
      auto end = text.find('\n', pos);
      j = json::parse(text.substr(pos + tag.size(), end == std::string::npos ? std::string::npos : end - pos - tag.size()));
    } else {
      j = json::parse(text);
    }
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  return j;
}

std::vector<std::string> config_tokens(const json& cfg, const Command& cmd) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    const Param* p = cmd.find(key);
    if (!p || key == "config") throw ValidationError("unknown config key '" + key + "' for command " + cmd.app->get_name());
    if (p->type == Param::Type::Flag) {
      if (!value.is_boolean()) throw ValidationError("config key '" + key + "' must be a boolean");
      if (value.get<bool>()) out.push_back("--" + key);
      continue;
    }
    out.push_back("--" + key);
    if (value.is_string()) {
      out.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      if (p->type == Param::Type::Int && !value.is_number_integer())
        throw ValidationError("config key '" + key + "' must be an integer");
      out.push_back(value.is_number_float() ? format_number(value.get<double>()) : value.dump());
    } else {
      throw ValidationError("config key '" + key + "' must be a number or string");
    }
  }
  return out;
}

// ---- shared parsing helpers -------------------------------------------------------

UnitSystem make_units(const std::string& s) { return s == "si" ? UnitSystem::si() : UnitSystem::natural(); }

Dispersion make_dispersion(const std::string& kind, double mass) {
  if (kind == "massive") return Dispersion::massive(mass);
  if (kind == "relativistic") return Dispersion::relativistic(mass);
  return Dispersion::massless();
}

SumKind make_kind(const std::string& s) {
  if (s == "lp") return SumKind::LP;
  if (s == "entropy") return SumKind::Entropy;
  if (s == "energy") return SumKind::Energy;
  return SumKind::Number;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse '" + s + "' in " + what);
  }
}

/// START:RATIO:COUNT geometric grid.
std::vector<double> parse_beta_grid(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3) throw ValidationError("beta grid must be START:RATIO:COUNT");
  double start = parse_real(parts[0], "beta grid");
  double ratio = parse_real(parts[1], "beta grid");
  double count = parse_real(parts[2], "beta grid");
  if (!(start > 0.0)) throw ValidationError("beta grid START must be > 0");
  if (!(ratio > 0.0)) throw ValidationError("beta grid RATIO must be > 0");
  if (count < 0 || count != std::floor(count)) throw ValidationError("beta grid COUNT must be a non-negative integer");
  return geometric_grid(start, ratio, static_cast<int>(count));
}

/// START:STOP:COUNT linear grid.
std::vector<double> parse_linear_grid(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3) throw ValidationError("z grid must be START:STOP:COUNT");
  double start = parse_real(parts[0], "z grid");
  double stop = parse_real(parts[1], "z grid");
  double count = parse_real(parts[2], "z grid");
  if (count < 0 || count != std::floor(count)) throw ValidationError("z grid COUNT must be a non-negative integer");
  if (stop < start) throw ValidationError("z grid requires START <= STOP");
  std::vector<double> g;
  const int n = static_cast<int>(count);
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? start : start + (stop - start) * i / (n - 1));
  return g;
}

void write_metadata(std::ostream& os, const Command& cmd) {
  os << "# qsl " << cmd.app->get_name() << " version " << kVersion << "\n";
  os << "# config: " << cmd.echo().dump() << "\n";
}

std::string rational_string(const Rational& r) {
  return numerator(r).str() + (denominator(r) == 1 ? "" : "/" + denominator(r).str());
}

// ---- expansion cases -----------------------------------------------------------------

struct CaseParams {
  std::string name = "massless-1d";
  int d = 1;
  double L = 1.0;
  double R = 1.0;
  double mass = 1.0;
  double q = 0.0;
  double z = 1.0;
  std::string units = "natural";
  int order = 5;
  int bits = 256;
  bool conjectural = false;
};

const std::vector<std::string> kCases = {"massive-torus", "massless-torus-leading", "massless-1d", "massless-1d-q0",
                                         "massive-1d-theta", "sphere-massive", "sphere-massless", "anzaf",
                                         "relativistic"};

void register_case(Command& cmd, CaseParams& p) {
  cmd.add("case", p.name, "expansion case")->check(CLI::IsMember(kCases));
  cmd.add("d", p.d, "torus dimension");
  cmd.add("L", p.L, "torus side");
  cmd.add("R", p.R, "sphere radius");
  cmd.add("mass", p.mass, "particle mass (massive cases)");
  cmd.add("q", p.q, "deformation parameter in [-1, 1]");
  cmd.add("z", p.z, "activity");
  cmd.add("units", p.units, "unit system")->check(CLI::IsMember({"natural", "si"}));
  cmd.add("order", p.order, "highest power kept (series cases)");
  cmd.add("precision-bits", p.bits, "working precision of coefficients and exact sums");
  cmd.flag("conjectural", p.conjectural, "accept cases whose remainder is not established");
}

struct CaseSetup {
  AsymptoticExpansion expansion;
  std::optional<std::string> warning;
  /// Exact value and its floor at beta.
  std::function<ExactPoint(double)> exact;
};

CaseSetup build_case(const CaseParams& p, double tol) {
  const UnitSystem units = make_units(p.units);
  const ThermoState state(1.0, p.z, p.q);
  if (p.bits < 64 || p.bits > 4096) throw ValidationError("precision-bits must lie in [64, 4096]");
  if (p.order < 0) throw ValidationError("order must be >= 0");
  CaseSetup cs;

  const double high_tol = tol > 0 ? tol : std::ldexp(1.0, -p.bits) * 1e3;
  const double double_tol = tol > 0 ? tol : 1e-10;
  auto high_exact = [&](DiscreteSpectrum sp) {
    const int bits = p.bits;
    return [sp = std::move(sp), state, units, high_tol, bits](double beta) {
      auto r = spectral_action_high(SumKind::Number, sp, state.with_beta(beta), units, high_tol, bits);
      const double v = to_double(r.value);
      return ExactPoint{beta, r.value, precision_floor(r.tail_bound, v, bits)};
    };
  };
  auto double_exact = [&](DiscreteSpectrum sp) {
    return [sp = std::move(sp), state, units, double_tol](double beta) {
      auto r = spectral_action(SumKind::Number, sp, state.with_beta(beta), units, double_tol);
      return ExactPoint{beta, HighReal(r.value), precision_floor(r.tail_bound, r.value, 53)};
    };
  };
  auto require_q0 = [&] {
    if (p.q != 0.0) throw ValidationError("case " + p.name + " requires q = 0");
  };
  auto require_conjectural = [&] {
    if (p.q > 0.0 && !p.conjectural)
      throw ValidationError("case " + p.name + " with q > 0 is conjectural; pass --conjectural");
  };

  if (p.name == "massive-torus") {
    cs.expansion = massive_torus_expansion({p.d, p.L}, p.mass, state, units, p.bits);
    cs.exact = high_exact(DiscreteSpectrum::torus({p.d, p.L}, Dispersion::massive(p.mass), units));
  } else if (p.name == "massless-torus-leading") {
    cs.expansion = massless_torus_leading({p.d, p.L}, state, units, p.bits);
    auto sp = DiscreteSpectrum::torus({p.d, p.L}, Dispersion::massless(), units);
    cs.exact = p.d == 1 ? std::function<ExactPoint(double)>(high_exact(sp)) : double_exact(sp);
  } else if (p.name == "massless-1d") {
    require_conjectural();
    cs.expansion = massless_1d_zeta_expansion(p.L, state, units, p.order, p.bits);
    cs.exact = high_exact(DiscreteSpectrum::torus({1, p.L}, Dispersion::massless(), units));
  } else if (p.name == "massless-1d-q0") {
    require_q0();
    cs.expansion = massless_1d_q0_exact(p.z, p.L, units, (p.order + 1) / 2);
    cs.exact = high_exact(DiscreteSpectrum::torus({1, p.L}, Dispersion::massless(), units));
  } else if (p.name == "massive-1d-theta") {
    require_q0();
    cs.expansion = massive_1d_q0_theta(p.z, p.L, p.mass, units).leading;
    cs.exact = high_exact(DiscreteSpectrum::torus({1, p.L}, Dispersion::massive(p.mass), units));
  } else if (p.name == "sphere-massive") {
    cs.expansion = sphere_massive_expansion(state, p.R, p.mass, units, p.bits);
    cs.exact = high_exact(DiscreteSpectrum::sphere3({p.R}, Dispersion::massive(p.mass), units));
  } else if (p.name == "sphere-massless") {
    require_conjectural();
    cs.expansion = sphere_massless_expansion(state, p.R, units, p.order, p.bits);
    cs.exact = high_exact(DiscreteSpectrum::sphere3({p.R}, Dispersion::massless(), units));
  } else if (p.name == "anzaf") {
    cs.expansion = conjecture_anzaf(p.d, p.L, state, units, p.order, p.bits);
    if (!p.conjectural) cs.warning = "conjectured expansion: the remainder is not established";
    auto sp = DiscreteSpectrum::torus({p.d, p.L}, Dispersion::massless(), units);
    cs.exact = p.d == 1 ? std::function<ExactPoint(double)>(high_exact(sp)) : double_exact(sp);
  } else if (p.name == "relativistic") {
    // m = c = h = L = 1 normalisation
    if (p.d < 1) throw ValidationError("relativistic case requires d >= 1");
    cs.expansion = relativistic_leading(p.d, {}, double_tol).expansion;
    const int d = p.d;
    cs.exact = [d, double_tol](double beta) {
      auto r = relativistic_sum(d, beta, double_tol);
      return ExactPoint{beta, HighReal(r.value), precision_floor(r.tail_bound, r.value, 53)};
    };
  } else {
    throw ValidationError("unknown case " + p.name);
  }
  return cs;
}

json expansion_json(const AsymptoticExpansion& e) {
  json terms = json::array();
  const auto pr = e.pruned();
  for (const auto& [tp, t] : pr.terms()) {
    json term;
    term["power"] = tp / 2.0;
    term["coefficient"] = t.as_double();
    if (t.exact) term["exact"] = rational_string(*t.exact);
    terms.push_back(term);
  }
  json j;
  j["terms"] = terms;
  j["remainder_class"] = to_string(e.remainder());
  if (auto rp = e.remainder_twice_power()) j["remainder_power"] = *rp / 2.0;
  j["provenance"] = e.provenance();
  return j;
}

// ---- output plumbing ------------------------------------------------------------------

class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ValidationError("cannot open output file " + path);
    }
    os_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& os() { return *os_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

int exit_code_for(const Error& e) {
  if (dynamic_cast<const TailBoundFailure*>(&e) || dynamic_cast<const PrecisionExhausted*>(&e) ||
      dynamic_cast<const DegenerateFit*>(&e))
    return kNumeric;
  return kValidation;
}

// ---- commands -------------------------------------------------------------------------------

struct SumParams {
  std::string geometry = "torus";
  int d = 1;
  double L = 1.0;
  double R = 1.0;
  std::string dispersion = "massless";
  double mass = 1.0;
  double q = 0.0;
  double z = 1.0;
  double beta = 1.0;
  std::string beta_grid;
  double tol = 1e-12;
  std::string units = "natural";
  std::string kind = "number";
  std::string method = "auto";
  std::string out;
  std::string format = "csv";
};

int cmd_sum(const Command& cmd, const SumParams& p, std::ostream& out, std::ostream& err) {
  const UnitSystem units = make_units(p.units);
  const Dispersion disp = make_dispersion(p.dispersion, p.mass);
  const DiscreteSpectrum sp = p.geometry == "sphere3" ? DiscreteSpectrum::sphere3({p.R}, disp, units)
                                                      : DiscreteSpectrum::torus({p.d, p.L}, disp, units);
  const ThermoState state(p.beta, p.z, p.q);
  if (!(p.tol > 0.0)) throw ValidationError("tol must be > 0");
  const std::vector<double> grid = p.beta_grid.empty() ? std::vector<double>{p.beta} : parse_beta_grid(p.beta_grid);
  const SumKind kind = make_kind(p.kind);
  const SumMethod method =
      p.method == "direct" ? SumMethod::Direct : p.method == "transform" ? SumMethod::Transform : SumMethod::Auto;

  struct Row {
    double beta;
    std::optional<SumResult> r;
    std::string error;
    int code = 0;
  };
  std::vector<Row> rows;
  int code = kOk;
  for (double beta : grid) {
    Row row{beta, std::nullopt, "", 0};
    try {
      row.r = spectral_action(kind, sp, state.with_beta(beta), units, p.tol, method);
    } catch (const Error& e) {
      // a single point fails the command; a grid records it and goes on
      if (grid.size() == 1) throw;
      row.error = e.what();
      row.code = exit_code_for(e);
      err << "error at beta=" << format_number(beta) << ": " << e.what() << "\n";
    }
    code = std::max(code, row.code);
    rows.push_back(row);
  }

  Sink sink(p.out, out);
  auto& os = sink.os();
  if (p.format == "json") {
    json j;
    j["version"] = kVersion;
    j["config"] = cmd.echo();
    j["rows"] = json::array();
    for (const auto& row : rows) {
      json r;
      r["beta"] = row.beta;
      if (row.r) {
        r["value"] = row.r->value;
        r["tail_bound"] = row.r->tail_bound;
        r["terms_used"] = row.r->terms_used;
        r["method"] = row.r->method;
      } else {
        r["error"] = row.error;
      }
      j["rows"].push_back(r);
    }
    os << j.dump(2) << "\n";
  } else {
    write_metadata(os, cmd);
    os << "beta,value,tail_bound,terms_used,method\n";
    for (const auto& row : rows) {
      if (!row.r) {
        os << "# error beta=" << format_number(row.beta) << ": " << row.error << "\n";
        continue;
      }
      os << format_number(row.beta) << "," << format_number(row.r->value) << "," << format_number(row.r->tail_bound)
         << "," << row.r->terms_used << "," << row.r->method << "\n";
    }
  }
  return code;
}

int cmd_expand(const Command& cmd, const CaseParams& p, const std::string& out_path, std::ostream& out) {
  const CaseSetup cs = build_case(p, 0.0);
  json j = expansion_json(cs.expansion);
  j["case"] = p.name;
  j["version"] = kVersion;
  j["config"] = cmd.echo();
  if (cs.warning) j["warning"] = *cs.warning;
  Sink sink(out_path, out);
  sink.os() << j.dump(2) << "\n";
  return kOk;
}

struct CompareParams {
  std::string beta_grid = "0.125:0.5:6";
  double truncate = 1000.0;
  double scale_power = 0.0;
  double tol = 0.0;
};

int cmd_compare(const Command& cmd, const CaseParams& p, const CompareParams& c, const std::string& out_path,
                std::ostream& out) {
  const auto grid = parse_beta_grid(c.beta_grid);
  const CaseSetup cs = build_case(p, c.tol);
  std::vector<ExactPoint> exact;
  for (double beta : grid) exact.push_back(cs.exact(beta));
  const auto res = residuals(exact, cs.expansion, c.truncate);

  Sink sink(out_path, out);
  auto& os = sink.os();
  write_metadata(os, cmd);
  os << "# provenance: " << cs.expansion.provenance() << " remainder=" << to_string(cs.expansion.remainder()) << "\n";
  if (cs.warning) os << "# warning: " << *cs.warning << "\n";
  os << "beta,exact,predicted,residual,scaled_residual,floor\n";
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double beta = res[i].beta;
    os << format_number(beta) << "," << format_number(to_double(exact[i].value)) << ","
       << format_number(cs.expansion.evaluate_truncated(beta, c.truncate)) << "," << format_number(res[i].residual)
       << "," << format_number(res[i].residual * std::pow(beta, -c.scale_power)) << "," << format_number(res[i].floor)
       << "\n";
  }
  if (!res.empty()) {
    try {
      const auto f = order_fit(res);
      os << "# fit: slope=" << format_number(f.slope) << " intercept=" << format_number(f.intercept)
         << " r_squared=" << format_number(f.r_squared) << " points_used=" << f.points_used
         << " points_at_floor=" << f.points_at_floor << " flagged=" << (f.flagged ? "true" : "false") << "\n";
    } catch (const DegenerateFit& e) {
      os << "# fit: none reason=\"" << e.what() << "\"\n";
    }
  }
  return kOk;
}

struct CondenseParams {
  int d = 3;
  std::string dispersion = "massless";
  double q = 1.0;
  std::string z_grid;
  double tol = 1e-12;
  std::string out;
};

int cmd_condense(const Command& cmd, const CondenseParams& p, std::ostream& out) {
  if (p.d < 1) throw ValidationError("dimension d must be >= 1");
  if (!(p.q > 0.0 && p.q <= 1.0)) throw ValidationError("condense requires 0 < q <= 1");
  const Dispersion disp = make_dispersion(p.dispersion, 1.0);
  const double z_max = 1.0 / p.q;
  const auto grid = parse_linear_grid(p.z_grid);
  if (!grid.empty() && (grid.front() < 0.0 || grid.back() > z_max))
    throw ValidationError("z grid must lie in [0, 1/q]");
  const int alpha = disp.alpha();

  Sink sink(p.out, out);
  auto& os = sink.os();
  write_metadata(os, cmd);
  os << "z,density,verdict\n";
  for (double z : grid) {
    if (z * p.q >= 1.0) continue;  // the endpoint row below covers it
    const double v = z == 0.0 ? 0.0 : bose_fermi_integral(p.d, p.q, z, alpha, p.tol);
    os << format_number(z) << "," << format_number(v) << ",Subcritical\n";
  }
  // at zq = 1 the integrand is y^{d-1} / (q (e^{y^alpha} - 1))
  const auto crit = critical_density(p.d, disp, p.tol);
  os << format_number(z_max) << ","
     << format_number(crit.finite ? crit.value / p.q : std::numeric_limits<double>::infinity()) << ","
     << (crit.finite ? "Finite" : "Divergent") << "\n";
  return kOk;
}

struct FigureParams {
  double q = 0.5;
  double z = 1.0;
  double scale = 1.0;
  int max_n = 40;
  int bits = 256;
  double min_digits = 8.0;
  std::string out;
};

int cmd_figure(const Command& cmd, const FigureParams& p, std::ostream& out) {
  if (p.max_n < 0) throw ValidationError("max-n must be >= 0");
  if (p.bits < 64 || p.bits > 8192) throw ValidationError("precision-bits must lie in [64, 8192]");
  if (p.q < -1.0 || p.q > 1.0) throw ValidationError("deformation parameter q violates -1 <= q <= 1");
  std::vector<GrowthPoint> pts;
  if (p.max_n > 0) {
    try {
      pts = derivative_growth_sequence(p.q, p.z, p.scale, p.max_n, p.bits, p.min_digits);
    } catch (const PrecisionExhausted& e) {
      throw PrecisionExhausted(std::string(e.what()) + " (failing n=" + std::to_string(e.failing_index()) + ")",
                               e.failing_index());
    }
  }
  Sink sink(p.out, out);
  auto& os = sink.os();
  write_metadata(os, cmd);
  if (!pts.empty()) {
    auto worst = std::min_element(pts.begin(), pts.end(), [](const GrowthPoint& a, const GrowthPoint& b) {
      return a.significant_digits < b.significant_digits;
    });
    os << "# precision: bits=" << p.bits << " min_significant_digits=" << format_number(worst->significant_digits)
       << " at_n=" << worst->n << "\n";
  }
  os << "n,growth\n";
  for (const auto& g : pts) os << g.n << "," << format_number(g.growth) << "\n";
  return kOk;
}

struct ProbeParams {
  int d = 2;
  double L = 1.0;
  double q = -1.0;
  double z = 1.0;
  std::string units = "natural";
  std::string beta_grid = "0.0625:0.5:6";
  std::string out;
};

int cmd_probe(const Command& cmd, const ProbeParams& p, std::ostream& out) {
  const auto grid = parse_beta_grid(p.beta_grid);
  if (grid.size() < 3) throw ValidationError("probe needs at least 3 beta points");
  const auto probe = probe_anzaf(p.d, p.L, ThermoState(1.0, p.z, p.q), make_units(p.units), grid);
  json j;
  j["version"] = kVersion;
  j["config"] = cmd.echo();
  j["report"] = json::parse(probe.report);
  j["within_5_percent"] = probe.within_5_percent;
  j["status"] = probe.within_5_percent ? "consistent" : "discrepancy";
  Sink sink(p.out, out);
  sink.os() << j.dump(2) << "\n";
  return kOk;
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return "";
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral sums and small-beta expansions for free q-particle gases"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  std::map<std::string, Command> commands;
  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", config_path, "JSON config (flags win on conflict)");
    return c;
  };

  SumParams sp;
  {
    auto& c = make("sum", "evaluate a spectral sum");
    c.add("geometry", sp.geometry, "torus or sphere3")->check(CLI::IsMember({"torus", "sphere3"}));
    c.add("d", sp.d, "torus dimension");
    c.add("L", sp.L, "torus side");
    c.add("R", sp.R, "sphere radius");
    c.add("dispersion", sp.dispersion, "dispersion relation")
        ->check(CLI::IsMember({"massless", "massive", "relativistic"}));
    c.add("mass", sp.mass, "particle mass");
    c.add("q", sp.q, "deformation parameter in [-1, 1]");
    c.add("z", sp.z, "activity");
    c.add("beta", sp.beta, "inverse temperature");
    c.add("beta-grid", sp.beta_grid, "START:RATIO:COUNT geometric grid (overrides --beta)");
    c.add("tol", sp.tol, "absolute tail tolerance");
    c.add("units", sp.units, "unit system")->check(CLI::IsMember({"natural", "si"}));
    c.add("kind", sp.kind, "summand")->check(CLI::IsMember({"number", "lp", "entropy", "energy"}));
    c.add("method", sp.method, "summation route")->check(CLI::IsMember({"auto", "direct", "transform"}));
    c.add("format", sp.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    c.add("out", sp.out, "output path (default stdout)");
  }
  CaseParams ep;
  std::string expand_out;
  {
    auto& c = make("expand", "print the coefficients of a small-beta expansion");
    register_case(c, ep);
    c.add("out", expand_out, "output path (default stdout)");
  }
  CaseParams cp;
  CompareParams cc;
  std::string compare_out;
  {
    auto& c = make("compare", "exact sums against a truncated expansion");
    register_case(c, cp);
    c.add("beta-grid", cc.beta_grid, "START:RATIO:COUNT geometric grid");
    c.add("truncate", cc.truncate, "keep terms with power <= this");
    c.add("scale-power", cc.scale_power, "p in the residual*beta^-p column (default: --truncate)");
    c.add("tol", cc.tol, "tail tolerance of the exact sums (0: automatic)");
    c.add("out", compare_out, "output path (default stdout)");
  }
  CondenseParams kp;
  {
    auto& c = make("condense", "density integral as z approaches 1/q");
    c.add("d", kp.d, "dimension");
    c.add("dispersion", kp.dispersion, "massless or massive")->check(CLI::IsMember({"massless", "massive"}));
    c.add("q", kp.q, "deformation parameter in (0, 1]");
    c.add("z-grid", kp.z_grid, "START:STOP:COUNT linear grid (default 0:0.99/q:100)");
    c.add("tol", kp.tol, "integration tolerance");
    c.add("out", kp.out, "output path (default stdout)");
  }
  FigureParams fp;
  {
    auto& c = make("figure-derivatives", "growth of the even derivatives of the occupation at the origin");
    c.add("q", fp.q, "deformation parameter");
    c.add("z", fp.z, "activity");
    c.add("scale", fp.scale, "scale a in 1/(z^-1 e^{a x} - q)");
    c.add("max-n", fp.max_n, "largest n (derivative order 2n)");
    c.add("precision-bits", fp.bits, "ball arithmetic precision");
    c.add("min-digits", fp.min_digits, "required significant digits");
    c.add("out", fp.out, "output path (default stdout)");
  }
  ProbeParams pp;
  {
    auto& c = make("probe", "numeric probe of the conjectured massless torus expansion");
    c.add("d", pp.d, "torus dimension (>= 2)");
    c.add("L", pp.L, "torus side");
    c.add("q", pp.q, "deformation parameter");
    c.add("z", pp.z, "activity");
    c.add("units", pp.units, "unit system")->check(CLI::IsMember({"natural", "si"}));
    c.add("beta-grid", pp.beta_grid, "START:RATIO:COUNT geometric grid");
    c.add("out", pp.out, "output path (default stdout)");
  }

  try {
    // splice config tokens right after the subcommand so explicit flags, parsed later, win
    std::vector<std::string> args = args_in;
    const std::string cfg_path = find_config_path(args);
    if (!cfg_path.empty()) {
      const json cfg = load_config(cfg_path);
      auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return commands.count(a) > 0; });
      if (sub_it == args.end()) {
        if (!cfg.contains("command") || !cfg["command"].is_string() || !commands.count(cfg["command"].get<std::string>()))
          throw ValidationError("no command given on the command line or in the config");
        args.insert(args.begin(), cfg["command"].get<std::string>());
        sub_it = args.begin();
      }
      const auto toks = config_tokens(cfg, commands.at(*sub_it));
      args.insert(sub_it + 1, toks.begin(), toks.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out, err);
      return rc == 0 ? kOk : kValidation;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const Command& cmd = commands.at(name);
    if (name == "sum") return cmd_sum(cmd, sp, out, err);
    if (name == "expand") return cmd_expand(cmd, ep, expand_out, out);
    if (name == "compare") {
      if (!cmd.given("scale-power")) cc.scale_power = cc.truncate < 1000.0 ? cc.truncate : 0.0;
      return cmd_compare(cmd, cp, cc, compare_out, out);
    }
    if (name == "condense") {
      if (kp.z_grid.empty()) kp.z_grid = "0:" + format_number(0.99 / kp.q) + ":100";
      return cmd_condense(cmd, kp, out);
    }
    if (name == "figure-derivatives") return cmd_figure(cmd, fp, out);
    if (name == "probe") return cmd_probe(cmd, pp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kValidation;
}

}  // namespace qsl::cli
