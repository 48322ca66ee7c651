#include "qsl/spectral_sum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "qsl/specfun.hpp"

namespace qsl {

namespace {

constexpr std::int64_t kBlock = std::int64_t{1} << 14;
constexpr double kDirectPreferredPoints = 2e6;

template <class Real>
struct Neumaier {
  Real sum{0};
  Real comp{0};
  void add(const Real& v) {
    using std::abs;
    const Real t = sum + v;
    if (abs(sum) >= abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  Real value() const { return sum + comp; }
};

// beta*eps as a function of the index, evaluated in Real.
template <class Real>
struct ReducedEnergyMap {
  const DiscreteSpectrum* spectrum;
  Real beta_scale;  // beta * energy scale
  Real ratio;       // relativistic coefficient of n under the root
  Real beta;
  enum class Shape { Sqrt, Linear, Relativistic, SphereLinear, SphereSquare, Explicit } shape;
  bool index_is_modulus = false;  // 1-torus: index is |k|

  Real operator()(std::int64_t index) const {
    using std::sqrt;
    const Real n(index);
    switch (shape) {
      case Shape::Sqrt: return beta_scale * (index_is_modulus ? n : Real(sqrt(n)));
      case Shape::Linear: return beta_scale * (index_is_modulus ? Real(n * n) : n);
      case Shape::Relativistic: {
        const Real shell = index_is_modulus ? Real(n * n) : n;
        return beta_scale * Real(sqrt(Real(1 + shell * ratio)));
      }
      case Shape::SphereLinear: return beta_scale * Real(n + Real(0.5));
      case Shape::SphereSquare: {
        const Real u = n + Real(0.5);
        return beta_scale * u * u;
      }
      case Shape::Explicit:
        return beta * Real(std::get<ExplicitSource>(spectrum->source()).lines[static_cast<std::size_t>(index)].energy);
    }
    return Real(0);
  }
};

template <class Real>
ReducedEnergyMap<Real> make_energy_map(const DiscreteSpectrum& spectrum, double beta) {
  ReducedEnergyMap<Real> map{&spectrum, Real(0), Real(0), Real(beta), ReducedEnergyMap<Real>::Shape::Explicit};
  using Shape = typename ReducedEnergyMap<Real>::Shape;
  if (const auto* t = std::get_if<TorusSource>(&spectrum.source())) {
    const Real h(t->units.h), c(t->units.c), L(t->geometry.L), m(t->dispersion.mass);
    map.index_is_modulus = t->geometry.d == 1;
    switch (t->dispersion.kind) {
      case DispersionKind::Massless:
        map.shape = Shape::Sqrt;
        map.beta_scale = Real(beta) * (c * h / L);
        break;
      case DispersionKind::Massive:
        map.shape = Shape::Linear;
        map.beta_scale = Real(beta) * (h * h / (Real(2) * m * L * L));
        break;
      case DispersionKind::Relativistic: {
        map.shape = Shape::Relativistic;
        map.beta_scale = Real(beta) * (m * c * c);
        const Real r = h / (m * c * L);
        map.ratio = r * r;
        break;
      }
    }
  } else if (const auto* s = std::get_if<Sphere3Source>(&spectrum.source())) {
    const Real hbar(s->units.hbar), c(s->units.c), R(s->geometry.R), m(s->dispersion.mass);
    if (s->dispersion.kind == DispersionKind::Massless) {
      map.shape = Shape::SphereLinear;
      map.beta_scale = Real(beta) * (c * hbar / R);
    } else {
      map.shape = Shape::SphereSquare;
      map.beta_scale = Real(beta) * (hbar * hbar / (Real(2) * m * R * R));
    }
  }
  return map;
}

template <class Real>
Real block_sum(SumKind kind, const DiscreteSpectrum& spectrum, const ReducedEnergyMap<Real>& x_of,
               const ShellTable* table, std::int64_t from, std::int64_t to, const Real& z, const Real& q,
               const Real& h, const Real& beta) {
  Neumaier<Real> acc;
  for (std::int64_t i = from; i <= to; ++i) {
    const auto g = spectrum.multiplicity(i, table);
    if (g == 0) continue;
    const Real f = integrand_reduced<Real>(kind, x_of(i), z, q, h, beta);
    acc.add(Real(static_cast<double>(g)) * f);
  }
  return acc.value();
}

std::shared_ptr<const ShellTable> table_for(const DiscreteSpectrum& spectrum, std::int64_t max_index) {
  if (const auto* t = std::get_if<TorusSource>(&spectrum.source()); t && t->geometry.d >= 2)
    return shared_shell_counts(t->geometry.d, max_index);
  return nullptr;
}

SumResult direct_route(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state,
                       const UnitSystem& units, const Truncation& cut) {
  const auto table = table_for(spectrum, cut.max_index);
  const auto x_of = make_energy_map<double>(spectrum, state.beta());
  const std::int64_t first = spectrum.first_index();
  const std::int64_t count = cut.max_index - first + 1;
  const std::int64_t blocks = count <= 0 ? 0 : (count + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  auto run_block = [&](std::int64_t b) {
    const std::int64_t from = first + b * kBlock;
    const std::int64_t to = std::min(cut.max_index, from + kBlock - 1);
    partial[static_cast<std::size_t>(b)] = block_sum<double>(kind, spectrum, x_of, table.get(), from, to, state.z(),
                                                             state.q(), units.h, state.beta());
  };
  const unsigned workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(std::max<std::int64_t>(blocks, 1)));
  if (workers <= 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t b = w; b < blocks; b += workers) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  // Partials are combined in block order, so the result does not depend on the worker count.
  Neumaier<double> total;
  for (double p : partial) total.add(p);
  SumResult r;
  r.value = total.value();
  r.tail_bound = cut.tail_bound;
  r.terms_used = count;
  r.scale = state.beta() * spectrum.energy_scale();
  r.method = "direct";
  return r;
}

// ---- transform route ----------------------------------------------------

// Lattice sums T'(b) = sum_{k != 0} exp(-b rho(k)) for rho(k) = |k|^2, |k| or sqrt(|k|^2 + M^2).
struct LatticeKernel {
  int d;
  enum class Form { Gaussian, Modulus, Shifted } form;
  double mass_sq = 0.0;  // M^2 for the shifted form

  struct Value {
    double value;
    double error;
  };

  Value operator()(double b) const {
    if (form == Form::Gaussian) return {theta3_power_minus_one(b, d), 0.0};
    if (b >= 1.0) return direct(b);
    return subordinated(b);
  }

  Value direct(double b) const {
    const double root_cap = 60.0 / b + std::sqrt(mass_sq);
    const auto n_max = static_cast<std::int64_t>(std::ceil(root_cap * root_cap));
    const auto table = shared_shell_counts(d, n_max);
    Neumaier<double> acc;
    const double shift = form == Form::Shifted ? mass_sq : 0.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
      const auto g = (*table)[n];
      if (g == 0) continue;
      acc.add(static_cast<double>(g) * std::exp(-b * std::sqrt(static_cast<double>(n) + shift)));
    }
    return {acc.value(), 0.0};
  }

  // exp(-b sqrt(s)) = int_0^inf b/(2 sqrt(pi)) t^{-3/2} e^{-b^2/(4t)} e^{-t s} dt, summed over
  // s = |k|^2 + M^2 under the integral; trapezoid rule in u = ln t.
  Value subordinated(double b) const {
    const double shift = form == Form::Shifted ? mass_sq : 0.0;
    auto F = [&](double u) {
      const double t = std::exp(u);
      const double expo = -b * b / (4.0 * t) - t * shift;
      if (expo < -745.0) return 0.0;
      const double p = theta3_power_minus_one(t, d);
      return b / (2.0 * std::sqrt(std::numbers::pi)) / std::sqrt(t) * std::exp(expo) * p;
    };
    const double u_lo = std::log(b * b / 3000.0);
    const double u_hi = std::log(750.0);
    double h = 0.25;
    auto trapezoid = [&](double step, bool odd_only) {
      Neumaier<double> acc;
      const auto n = static_cast<std::int64_t>(std::ceil((u_hi - u_lo) / step));
      for (std::int64_t i = odd_only ? 1 : 0; i <= n; i += odd_only ? 2 : 1) acc.add(F(u_lo + step * static_cast<double>(i)));
      return acc.value();
    };
    double sum = trapezoid(h, false);
    double estimate = sum * h;
    for (int level = 0; level < 10; ++level) {
      h /= 2.0;
      sum += trapezoid(h, true);
      const double next = sum * h;
      const double change = std::abs(next - estimate);
      estimate = next;
      if (change <= 1e-15 * std::abs(next)) return {next, std::max(change, 1e-16 * std::abs(next))};
    }
    return {estimate, 1e-12 * std::abs(estimate)};
  }
};

bool transform_applicable(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state) {
  if (kind != SumKind::Number && kind != SumKind::LP) return false;
  if (!std::holds_alternative<TorusSource>(spectrum.source())) return false;
  const double zq = state.z() * state.q();
  if (state.q() < 0.0) return -zq <= 1.0;
  return zq <= 0.95;
}

SumResult transform_route(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state,
                          const UnitSystem& units, double tol) {
  const auto& src = std::get<TorusSource>(spectrum.source());
  const int d = src.geometry.d;
  const double beta = state.beta();
  const double z = state.z();
  const double q = state.q();
  const double h = units.h;

  LatticeKernel kernel{d, LatticeKernel::Form::Modulus};
  double B = beta * spectrum.energy_scale();  // exponent scale per unit of rho
  switch (src.dispersion.kind) {
    case DispersionKind::Massive:
      kernel.form = LatticeKernel::Form::Gaussian;
      break;
    case DispersionKind::Massless:
      break;
    case DispersionKind::Relativistic:
      kernel.form = LatticeKernel::Form::Shifted;
      kernel.mass_sq = 1.0 / spectrum.relativistic_ratio();
      B *= std::sqrt(spectrum.relativistic_ratio());
      break;
  }
  const double x0 = beta * spectrum.eps_min();
  const double zero_mode = integrand_reduced<double>(kind, x0, z, q, 1.0, beta);

  // coefficient of T'(jB): z^j q^{j-1} (Number) and z^j q^{j-1} / j (LP).
  auto coeff_abs = [&](int j) {
    double c = std::pow(z, j) * std::pow(std::abs(q), j - 1);
    if (kind == SumKind::LP) c /= j;
    return c;
  };

  double series = 0.0;
  double error = 0.0;
  int terms = 0;
  if (q == 0.0) {
    const auto v = kernel(B);
    series = z * v.value;
    error = z * v.error;
    terms = 1;
  } else if (q < 0.0) {
    const int n = 26;
    std::vector<LatticeKernel::Value> vals;
    for (int i = 0; i < n; ++i) vals.push_back(kernel(B * (i + 1)));
    series = cvz_alternating_sum([&](int i) { return coeff_abs(i + 1) * vals[static_cast<std::size_t>(i)].value; }, n);
    for (int i = 0; i < n; ++i) error += coeff_abs(i + 1) * vals[static_cast<std::size_t>(i)].error;
    error += 2.0 * coeff_abs(1) * vals[0].value / std::pow(3.0 + std::sqrt(8.0), n);
    terms = n;
  } else {
    const double zq = z * q;
    Neumaier<double> acc;
    for (int j = 1;; ++j) {
      const auto v = kernel(B * j);
      acc.add(coeff_abs(j) * v.value);
      error += coeff_abs(j) * v.error;
      terms = j;
      // remaining terms <= T'(jB) (z/q) (zq)^{j+1} / (1 - zq)
      const double remainder = v.value * (z / q) * std::pow(zq, j + 1) / (1.0 - zq);
      if (h * remainder <= 0.1 * tol || remainder <= 1e-17 * std::abs(acc.value()) || j > 5000) {
        error += remainder;
        break;
      }
    }
    series = acc.value();
  }
  SumResult r;
  r.value = h * (zero_mode + series);
  r.tail_bound = h * error + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(r.value);
  r.terms_used = terms;
  r.scale = beta * spectrum.energy_scale();
  r.method = "transform";
  return r;
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("QSL_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SumResult spectral_action(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state,
                          const UnitSystem& units, double tol, SumMethod method) {
  validate_state(state, spectrum.eps_min());
  if (state.z() == 0.0) {
    SumResult r;
    r.scale = state.beta() * spectrum.energy_scale();
    r.method = "direct";
    return r;
  }
  const TailModel model = TailModel::for_kind(kind, units.h, state.beta());
  switch (method) {
    case SumMethod::Direct:
      return direct_route(kind, spectrum, state, units, truncation_radius(spectrum, state, tol, model));
    case SumMethod::Transform:
      if (!transform_applicable(kind, spectrum, state))
        throw DomainError("the lattice-transform route needs a torus Number/LP sum with |zq| <= 1 (zq <= 0.95 for q > 0)");
      return transform_route(kind, spectrum, state, units, tol);
    case SumMethod::Auto:
      break;
  }
  try {
    return direct_route(kind, spectrum, state, units,
                        truncation_radius(spectrum, state, tol, model, kDirectPreferredPoints));
  } catch (const TailBoundFailure&) {
    if (transform_applicable(kind, spectrum, state)) return transform_route(kind, spectrum, state, units, tol);
  }
  return direct_route(kind, spectrum, state, units, truncation_radius(spectrum, state, tol, model));
}

HighSumResult spectral_action_high(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state,
                                   const UnitSystem& units, double tol, int bits) {
  validate_state(state, spectrum.eps_min());
  PrecisionGuard guard(bits);
  HighSumResult r;
  r.bits = bits;
  r.value = 0;
  if (state.z() == 0.0) return r;
  const TailModel model = TailModel::for_kind(kind, units.h, state.beta());
  const Truncation cut = truncation_radius(spectrum, state, tol, model);
  const auto table = table_for(spectrum, cut.max_index);
  const auto x_of = make_energy_map<HighReal>(spectrum, state.beta());
  r.value = block_sum<HighReal>(kind, spectrum, x_of, table.get(), spectrum.first_index(), cut.max_index,
                                HighReal(state.z()), HighReal(state.q()), HighReal(units.h), HighReal(state.beta()));
  r.tail_bound = cut.tail_bound;
  r.terms_used = cut.max_index - spectrum.first_index() + 1;
  return r;
}

SumResult relativistic_sum(int d, double beta, double tol) {
  const auto spectrum = DiscreteSpectrum::torus(Torus{d, 1.0}, Dispersion::relativistic(1.0), UnitSystem::natural());
  return spectral_action(SumKind::Number, spectrum, ThermoState(beta, 1.0, 0.0), UnitSystem::natural(), tol);
}

std::vector<SweepRow> beta_sweep(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state_template,
                                 const UnitSystem& units, const std::vector<double>& beta_grid, double tol) {
  std::vector<SweepRow> rows;
  rows.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    SweepRow row{beta, std::nullopt, {}};
    try {
      row.result = spectral_action(kind, spectrum, state_template.with_beta(beta), units, tol);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> geometric_grid(double beta0, double ratio, int count) {
  std::vector<double> grid;
  double b = beta0;
  for (int j = 0; j < count; ++j) {
    grid.push_back(b);
    b *= ratio;
  }
  return grid;
}

}  // namespace qsl
