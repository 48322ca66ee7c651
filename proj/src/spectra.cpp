#include "qsl/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "qsl/specfun.hpp"

namespace qsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kShellCap = std::int64_t{1} << 25;

}  // namespace

std::uint64_t ShellTable::cumulative(std::int64_t n) const {
  std::uint64_t total = 0;
  for (std::int64_t i = 0; i <= std::min(n, n_max()); ++i) total += counts_[static_cast<std::size_t>(i)];
  return total;
}

ShellTable shell_counts(int d, std::int64_t n_max) {
  if (d < 1) throw DomainError("shell_counts requires d >= 1");
  if (n_max < 0) throw DomainError("shell_counts requires n_max >= 0");
  const auto size = static_cast<std::size_t>(n_max) + 1;
  std::vector<std::uint64_t> r(size, 0);
  for (std::int64_t j = 0; j * j <= n_max; ++j) r[static_cast<std::size_t>(j * j)] = j == 0 ? 1 : 2;
  // In place: r_new(n) = r(n) + 2 sum_{j>=1} r(n - j^2), descending so reads see r_{d-1}.
  for (int dim = 2; dim <= d; ++dim) {
    for (std::int64_t n = n_max; n >= 0; --n) {
      std::uint64_t acc = r[static_cast<std::size_t>(n)];
      for (std::int64_t j = 1; j * j <= n; ++j) acc += 2 * r[static_cast<std::size_t>(n - j * j)];
      r[static_cast<std::size_t>(n)] = acc;
    }
  }
  return ShellTable(d, std::move(r));
}

std::shared_ptr<const ShellTable> shared_shell_counts(int d, std::int64_t n_max) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ShellTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[d];
  if (!slot || slot->n_max() < n_max) {
    std::int64_t target = n_max;
    if (slot) target = std::max(n_max, std::min(kShellCap, 2 * slot->n_max()));
    slot = std::make_shared<const ShellTable>(shell_counts(d, target));
  }
  return slot;
}

DiscreteSpectrum::DiscreteSpectrum(SpectrumSource source) : source_(std::move(source)) {
  if (auto* t = std::get_if<TorusSource>(&source_)) {
    validate_geometry(t->geometry);
    const auto& u = t->units;
    const double L = t->geometry.L;
    switch (t->dispersion.kind) {
      case DispersionKind::Massless:
        scale_ = u.c * u.h / L;
        break;
      case DispersionKind::Massive:
        scale_ = u.h * u.h / (2.0 * t->dispersion.mass * L * L);
        break;
      case DispersionKind::Relativistic: {
        const double m = t->dispersion.mass;
        scale_ = m * u.c * u.c;
        const double r = u.h / (m * u.c * L);
        rel_ratio_ = r * r;
        break;
      }
    }
  } else if (auto* s = std::get_if<Sphere3Source>(&source_)) {
    validate_geometry(s->geometry);
    const auto& u = s->units;
    const double R = s->geometry.R;
    switch (s->dispersion.kind) {
      case DispersionKind::Massless:
        scale_ = u.c * u.hbar / R;
        break;
      case DispersionKind::Massive:
        scale_ = u.hbar * u.hbar / (2.0 * s->dispersion.mass * R * R);
        break;
      case DispersionKind::Relativistic:
        throw DomainError("relativistic dispersion is not provided on the 3-sphere");
    }
  } else {
    const auto& lines = std::get<ExplicitSource>(source_).lines;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (!(lines[i].energy >= 0.0)) throw ValidationError("spectral line energies must be >= 0");
      if (lines[i].multiplicity < 1) throw ValidationError("spectral line multiplicity must be >= 1");
      if (i > 0 && !(lines[i].energy > lines[i - 1].energy))
        throw ValidationError("spectral line energies must be strictly increasing");
    }
  }
}

DiscreteSpectrum DiscreteSpectrum::torus(const Torus& geometry, const Dispersion& dispersion, const UnitSystem& units) {
  return DiscreteSpectrum(TorusSource{geometry, dispersion, units});
}

DiscreteSpectrum DiscreteSpectrum::sphere3(const Sphere3& geometry, const Dispersion& dispersion,
                                           const UnitSystem& units) {
  return DiscreteSpectrum(Sphere3Source{geometry, dispersion, units});
}

DiscreteSpectrum DiscreteSpectrum::explicit_lines(std::vector<SpectralLine> lines) {
  return DiscreteSpectrum(ExplicitSource{std::move(lines)});
}

std::int64_t DiscreteSpectrum::first_index() const {
  return std::holds_alternative<Sphere3Source>(source_) ? 1 : 0;
}

std::optional<std::int64_t> DiscreteSpectrum::last_index() const {
  if (const auto* e = std::get_if<ExplicitSource>(&source_)) return static_cast<std::int64_t>(e->lines.size()) - 1;
  return std::nullopt;
}

double DiscreteSpectrum::reduced_energy(std::int64_t index) const {
  const double n = static_cast<double>(index);
  if (const auto* t = std::get_if<TorusSource>(&source_)) {
    // d = 1 indexes by |k|, so the shell value is k^2.
    const double shell = t->geometry.d == 1 ? n * n : n;
    switch (t->dispersion.kind) {
      case DispersionKind::Massless: return std::sqrt(shell);
      case DispersionKind::Massive: return shell;
      case DispersionKind::Relativistic: return std::sqrt(1.0 + shell * rel_ratio_);
    }
  }
  if (const auto* s = std::get_if<Sphere3Source>(&source_)) {
    const double u = n + 0.5;
    return s->dispersion.kind == DispersionKind::Massless ? u : u * u;
  }
  return std::get<ExplicitSource>(source_).lines[static_cast<std::size_t>(index)].energy;
}

double DiscreteSpectrum::eps_min() const {
  if (const auto* e = std::get_if<ExplicitSource>(&source_)) return e->lines.empty() ? 0.0 : e->lines.front().energy;
  return scale_ * reduced_energy(first_index());
}

std::uint64_t DiscreteSpectrum::multiplicity(std::int64_t index, const ShellTable* table) const {
  if (const auto* t = std::get_if<TorusSource>(&source_)) {
    if (t->geometry.d == 1) return index == 0 ? 1 : 2;
    if (table == nullptr || table->n_max() < index) throw DomainError("shell table does not cover the index");
    return (*table)[index];
  }
  if (std::holds_alternative<Sphere3Source>(source_)) return 2 * sphere3_branch_weight(index);
  return std::get<ExplicitSource>(source_).lines[static_cast<std::size_t>(index)].multiplicity;
}

std::vector<SpectralLine> DiscreteSpectrum::lines(std::int64_t max_index) const {
  if (const auto* e = std::get_if<ExplicitSource>(&source_)) {
    const auto n = std::min<std::size_t>(e->lines.size(), static_cast<std::size_t>(std::max<std::int64_t>(max_index + 1, 0)));
    return {e->lines.begin(), e->lines.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  std::shared_ptr<const ShellTable> table;
  if (const auto* t = std::get_if<TorusSource>(&source_); t && t->geometry.d >= 2)
    table = shared_shell_counts(t->geometry.d, max_index);
  std::vector<SpectralLine> out;
  for (std::int64_t i = first_index(); i <= max_index; ++i) {
    const auto g = multiplicity(i, table.get());
    if (g > 0) out.push_back({scale_ * reduced_energy(i), g});
  }
  return out;
}

TailModel TailModel::for_kind(SumKind kind, double h, double beta) {
  switch (kind) {
    case SumKind::Number:
    case SumKind::LP:
      // LP: -(1/q) ln(1 - x) <= x/(q(1-x)) for q > 0 and <= |x|/|q| for q < 0.
      return {h, 0.0, false};
    case SumKind::Energy:
      return {0.0, 1.0 / beta, false};
    case SumKind::Entropy:
      // s(nu) <= nu + max(q,0) nu^2 - nu ln nu while nu <= 1/e.
      return {0.0, 1.0, true};
  }
  return {};
}

namespace {

// Envelope sum_i p_i t^i e^{-g(t)} with g(t) = A t (power 1) or A t^2 (power 2).
struct Envelope {
  std::vector<double> poly;
  double A;
  int power;
};

double envelope_tail(const Envelope& env, double T) {
  const std::size_t deg = env.poly.size() - 1;
  // Decreasing on [T, inf) when t g'(t) > deg there (nonnegative coefficients).
  const double tg = env.power == 1 ? env.A * T : 2.0 * env.A * T * T;
  if (!(T > 0.0) || !(tg > static_cast<double>(deg))) return kInf;
  double total = 0.0;
  for (std::size_t i = 0; i <= deg; ++i) {
    if (env.poly[i] == 0.0) continue;
    const double k = static_cast<double>(i);
    double integral;
    if (env.power == 1) {
      integral = boost::math::tgamma(k + 1.0, env.A * T) / std::pow(env.A, k + 1.0);
    } else {
      const double s = (k + 1.0) / 2.0;
      integral = boost::math::tgamma(s, env.A * T * T) / (2.0 * std::pow(env.A, s));
    }
    total += env.poly[i] * integral;
  }
  return total;
}

// (t + s)^m as coefficients in t.
std::vector<double> shifted_power(double s, int m) {
  std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
  double binom = 1.0;
  for (int i = 0; i <= m; ++i) {
    c[static_cast<std::size_t>(i)] = binom * std::pow(s, m - i);
    binom = binom * (m - i) / (i + 1);
  }
  return c;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace

double tail_bound_at(const DiscreteSpectrum& spectrum, const ThermoState& state, std::int64_t max_index,
                     const TailModel& model) {
  if (spectrum.is_finite()) return 0.0;
  if (state.z() == 0.0) return 0.0;
  const double beta = state.beta();
  const double scale = spectrum.energy_scale();
  const double x0 = beta * scale * spectrum.reduced_energy(max_index + 1);
  const double pole = std::max(0.0, state.z() * state.q() * std::exp(-x0));
  if (pole >= 1.0) return kInf;
  const double C = state.z() / (1.0 - pole);

  double c0 = model.c0;
  const double c1 = model.c1;
  if (model.entropy) {
    if (C * std::exp(-x0) > std::exp(-1.0)) return kInf;
    c0 = std::max(0.0, 1.0 + std::max(state.q(), 0.0) * C - std::log(C));
  }

  // Weight polynomial W(t) in the radial variable and the lower start T.
  std::vector<double> weight;
  double T;
  double A;
  int power;
  double c0_eff = c0;
  if (const auto* t = std::get_if<TorusSource>(&spectrum.source())) {
    const int d = t->geometry.d;
    if (d == 1) {
      weight = {2.0};
      T = static_cast<double>(max_index);
    } else {
      const double s = std::sqrt(static_cast<double>(d)) / 2.0;
      weight = shifted_power(s, d - 1);
      for (auto& w : weight) w *= solid_angle(d);
      T = std::sqrt(static_cast<double>(max_index + 1)) - 2.0 * s;
    }
    switch (t->dispersion.kind) {
      case DispersionKind::Massless:
        A = beta * scale;
        power = 1;
        break;
      case DispersionKind::Massive:
        A = beta * scale;
        power = 2;
        break;
      case DispersionKind::Relativistic: {
        // m c^2 sqrt(1 + r t^2) lies in [m c^2 sqrt(r) t, m c^2 (1 + sqrt(r) t)].
        A = beta * scale * std::sqrt(spectrum.relativistic_ratio());
        c0_eff = c0 + c1 * beta * scale;
        power = 1;
        break;
      }
    }
  } else {
    const auto& s = std::get<Sphere3Source>(spectrum.source());
    // 2k(k+1) <= 2u^2 with u = k + 1/2; F(u_k) <= int_{u_k - 1}^{u_k} F for decreasing F.
    weight = {0.0, 0.0, 2.0};
    T = static_cast<double>(max_index) + 0.5;
    A = beta * scale;
    power = s.dispersion.kind == DispersionKind::Massless ? 1 : 2;
  }
  std::vector<double> kind_poly;
  if (power == 1) {
    kind_poly = {c0_eff, c1 * A};
  } else {
    kind_poly = {c0_eff, 0.0, c1 * A};
  }
  Envelope env{poly_mul(weight, kind_poly), A, power};
  for (auto& p : env.poly) p *= C;
  return envelope_tail(env, T);
}

namespace {

double lattice_points_at(const DiscreteSpectrum& spectrum, std::int64_t index) {
  if (const auto* t = std::get_if<TorusSource>(&spectrum.source())) {
    const int d = t->geometry.d;
    if (d == 1) return 2.0 * static_cast<double>(index) + 1.0;
    const double R = std::sqrt(static_cast<double>(index)) + std::sqrt(static_cast<double>(d)) / 2.0;
    return std::pow(std::numbers::pi, d / 2.0) / boost::math::tgamma(d / 2.0 + 1.0) * std::pow(R, d);
  }
  return static_cast<double>(index);
}

bool index_feasible(const DiscreteSpectrum& spectrum, std::int64_t index, double lattice_cap) {
  if (lattice_points_at(spectrum, index) > lattice_cap) return false;
  if (const auto* t = std::get_if<TorusSource>(&spectrum.source()); t && t->geometry.d >= 2)
    return index <= kShellCap;
  return true;
}

}  // namespace

Truncation truncation_radius(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol,
                             const TailModel& model, double lattice_cap) {
  validate_state(state, spectrum.eps_min());
  if (auto last = spectrum.last_index()) {
    return {*last, 0.0, static_cast<double>(*last + 1)};
  }
  if (!(tol >= 0.0)) throw DomainError("tolerance must be >= 0");
  const std::int64_t first = spectrum.first_index();
  auto ok = [&](std::int64_t idx) { return tail_bound_at(spectrum, state, idx, model) <= tol; };
  if (ok(first)) return {first, tail_bound_at(spectrum, state, first, model), lattice_points_at(spectrum, first)};

  std::int64_t lo = first;  // fails
  std::int64_t hi = std::max<std::int64_t>(first + 1, 4);
  while (!ok(hi)) {
    lo = hi;
    hi *= 2;
    if (!index_feasible(spectrum, hi, lattice_cap)) {
      // Try the largest feasible index before giving up.
      std::int64_t a = lo, b = hi;
      while (b - a > 1) {
        const std::int64_t mid = a + (b - a) / 2;
        (index_feasible(spectrum, mid, lattice_cap) ? a : b) = mid;
      }
      if (a > lo && ok(a)) {
        hi = a;
        break;
      }
      std::ostringstream os;
      os << "tolerance " << tol << " not certifiable below the work cap (tail at index " << a << " is "
         << tail_bound_at(spectrum, state, a, model) << ")";
      throw TailBoundFailure(os.str());
    }
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return {hi, tail_bound_at(spectrum, state, hi, model), lattice_points_at(spectrum, hi)};
}

}  // namespace qsl
