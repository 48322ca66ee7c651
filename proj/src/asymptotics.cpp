#include "qsl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "qsl/specfun.hpp"
#include "qsl/spectral_sum.hpp"

namespace qsl {

namespace {

Rational rat(double x) { return exact(x); }

HighReal high(const Rational& r) { return HighReal(r); }

HighReal solid_angle_high(int d) {
  const HighReal half_d = HighReal(d) / 2;
  return 2 * pow(boost::math::constants::pi<HighReal>(), half_d) / boost::math::tgamma(half_d);
}

Rational pow_int(const Rational& base, int n) {
  Rational r(1);
  const Rational b = n >= 0 ? base : Rational(1) / base;
  for (int i = 0; i < std::abs(n); ++i) r *= b;
  return r;
}

Rational factorial(int n) {
  Rational r(1);
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

Rational binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// I_alpha at q = 0 with integer d/alpha is z Gamma(d/alpha)/alpha, rational.
std::optional<Rational> exact_bose_fermi(int d, double q, double z, int alpha) {
  if (q != 0.0 || d % alpha != 0) return std::nullopt;
  return rat(z) * factorial(d / alpha - 1) / Rational(alpha);
}

void check_q_range(const ThermoState& state) {
  if (state.q() > 0.0 && state.z() * state.q() >= 1.0) throw PoleViolation("expansion requires zq < 1");
}

}  // namespace

std::string to_string(RemainderClass rc) {
  switch (rc) {
    case RemainderClass::SuperPolynomial: return "SuperPolynomial";
    case RemainderClass::PowerBounded: return "PowerBounded";
    case RemainderClass::Conjectural: return "Conjectural";
  }
  return "unknown";
}

void AsymptoticExpansion::set(int twice_power, const HighReal& value) {
  PrecisionGuard guard(bits_);
  terms_[twice_power] = ExpansionTerm{HighReal(value), std::nullopt};
}

void AsymptoticExpansion::set_exact(int twice_power, const Rational& value) {
  PrecisionGuard guard(bits_);
  terms_[twice_power] = ExpansionTerm{high(value), value};
}

const ExpansionTerm& AsymptoticExpansion::term(int twice_power) const {
  auto it = terms_.find(twice_power);
  if (it == terms_.end()) throw DomainError("no term at the requested exponent");
  return it->second;
}

double AsymptoticExpansion::coefficient(double power) const {
  auto it = terms_.find(static_cast<int>(std::lround(2.0 * power)));
  return it == terms_.end() ? 0.0 : it->second.as_double();
}

double AsymptoticExpansion::evaluate_truncated(double beta, double max_power) const {
  double sum = 0.0;
  for (const auto& [tp, t] : terms_) {
    if (tp > 2.0 * max_power) break;
    sum += t.as_double() * std::pow(beta, tp / 2.0);
  }
  return sum;
}

HighReal AsymptoticExpansion::evaluate_high(const HighReal& beta, double max_power) const {
  PrecisionGuard guard(bits_);
  HighReal sum = 0;
  const HighReal b(beta);
  const HighReal root = sqrt(b);
  for (const auto& [tp, t] : terms_) {
    if (tp > 2.0 * max_power) break;
    const HighReal p = (tp % 2 == 0) ? pow(b, tp / 2) : pow(root, tp);
    sum += t.value * p;
  }
  return sum;
}

AsymptoticExpansion AsymptoticExpansion::pruned() const {
  AsymptoticExpansion r(provenance_, remainder_, bits_);
  r.remainder_power_ = remainder_power_;
  for (const auto& [tp, t] : terms_) {
    const bool zero = t.exact ? *t.exact == 0 : t.value == 0;
    if (!zero) r.terms_[tp] = t;
  }
  return r;
}

// ---- builders -----------------------------------------------------------------

AsymptoticExpansion massive_torus_expansion(const Torus& geometry, double mass, const ThermoState& state,
                                            const UnitSystem& units, int bits) {
  validate_geometry(geometry);
  AsymptoticExpansion e("torus-massive", RemainderClass::SuperPolynomial, bits);
  check_q_range(state);
  PrecisionGuard guard(bits);
  const int d = geometry.d;
  if (state.z() == 0.0) return e;
  // h sum_k nu(beta s |k|^2) -> h Omega_d (beta s)^{-d/2} I_2, s = h^2/(2 m L^2).
  const HighReal h(units.h), L(geometry.L), m(mass);
  const HighReal s = h * h / (2 * m * L * L);
  const HighReal integral = bose_fermi_integral_high(d, state.q(), state.z(), 2, bits);
  e.set(-d, h * solid_angle_high(d) * pow(s, -HighReal(d) / 2) * integral);
  return e;
}

AsymptoticExpansion massless_torus_leading(const Torus& geometry, const ThermoState& state, const UnitSystem& units,
                                           int bits) {
  validate_geometry(geometry);
  AsymptoticExpansion e("torus-massless-leading", RemainderClass::PowerBounded, bits);
  check_q_range(state);
  const int d = geometry.d;
  e.set_remainder_power(-2 * d);
  PrecisionGuard guard(bits);
  if (state.z() == 0.0) return e;
  const HighReal h(units.h), c(units.c), L(geometry.L);
  const HighReal a = c * h / L;
  const HighReal integral = bose_fermi_integral_high(d, state.q(), state.z(), 1, bits);
  e.set(-2 * d, h * solid_angle_high(d) * pow(a, -d) * integral);
  return e;
}

namespace {

// sum_{k>=1} phi(delta k) ~ (1/delta) int phi + sum_n zeta(-n) phi_n delta^n: the
// power-series part, phi_n being Taylor coefficients of phi at 0.
std::vector<Rational> zeta_series_part(const TaylorJet<Rational>& jet) {
  std::vector<Rational> out;
  for (int n = 0; n <= jet.order(); ++n) out.push_back(zeta_neg_int(n) * jet[n]);
  return out;
}

}  // namespace

AsymptoticExpansion massless_1d_zeta_expansion(double L, const ThermoState& state, const UnitSystem& units, int order,
                                               int bits) {
  if (order < 0) throw DomainError("order must be >= 0");
  const bool proven = state.q() <= 0.0;
  AsymptoticExpansion e(proven ? "torus1-massless-zeta" : "torus1-massless-zeta-extended",
                        proven ? RemainderClass::SuperPolynomial : RemainderClass::Conjectural, bits);
  check_q_range(state);
  validate_geometry(Torus{1, L});
  PrecisionGuard guard(bits);
  const Rational h = rat(units.h);
  const Rational a = rat(units.c) * h / rat(L);
  const Rational z = rat(state.z());
  const Rational q = rat(state.q());
  if (state.z() == 0.0) return e;

  // S = h nu(0) + 2h sum_{k>=1} nu(a beta k)
  const Rational lead_prefactor = Rational(2) * h / a;
  if (auto ex = exact_bose_fermi(1, state.q(), state.z(), 1)) {
    e.set_exact(-2, lead_prefactor * *ex);
  } else {
    e.set(-2, high(lead_prefactor) * bose_fermi_integral_high(1, state.q(), state.z(), 1, bits));
  }
  // a is the exact product of the binary64 constants, not its rounding
  const auto series = zeta_series_part(occupation_jet_t<Rational>(q, z, a, order));
  const Rational zero_mode = z / (Rational(1) - z * q);
  e.set_exact(0, h * zero_mode + Rational(2) * h * series[0]);
  for (int n = 1; n <= order; ++n) e.set_exact(2 * n, Rational(2) * h * series[static_cast<std::size_t>(n)]);
  return e;
}

AsymptoticExpansion massless_1d_q0_exact(double z, double L, const UnitSystem& units, int order) {
  if (order < 0) throw DomainError("order must be >= 0");
  validate_geometry(Torus{1, L});
  AsymptoticExpansion e("torus1-massless-bernoulli", RemainderClass::SuperPolynomial);
  const Rational h = rat(units.h);
  const Rational a = rat(units.c) * h / rat(L);
  const Rational zz = rat(z);
  e.set_exact(-2, Rational(2) * zz * rat(L) / rat(units.c));
  for (int n = 1; n <= order; ++n) {
    e.set_exact(2 * (2 * n - 1),
                Rational(2) * zz * h * pow_int(a, 2 * n - 1) * bernoulli(2 * n) / factorial(2 * n));
  }
  return e;
}

double massless_1d_q0_closed_form(double z, double L, const UnitSystem& units, double beta) {
  const double a = beta * units.c * units.h / L;
  const double em1 = std::expm1(a);
  return z * units.h * (em1 + 2.0) / em1;
}

ThetaCase massive_1d_q0_theta(double z, double L, double mass, const UnitSystem& units) {
  validate_geometry(Torus{1, L});
  ThetaCase tc{AsymptoticExpansion("torus1-massive-theta", RemainderClass::SuperPolynomial), {}};
  {
    PrecisionGuard guard(256);
    const HighReal h(units.h), LL(L), m(mass);
    const HighReal s = h * h / (2 * m * LL * LL);
    // z h sqrt(pi / (beta s)) = z L sqrt(2 pi m / beta)
    tc.leading.set(-1, HighReal(z) * h * sqrt(boost::math::constants::pi<HighReal>() / s));
  }
  const double s = units.h * units.h / (2.0 * mass * L * L);
  const double h = units.h;
  tc.exact = [=](double beta) { return z * h * theta3_sum(beta * s); };
  return tc;
}

AsymptoticExpansion sphere_massive_expansion(const ThermoState& state, double R, double mass, const UnitSystem& units,
                                             int bits) {
  validate_geometry(Sphere3{R});
  AsymptoticExpansion e("sphere3-massive", RemainderClass::SuperPolynomial, bits);
  check_q_range(state);
  PrecisionGuard guard(bits);
  if (state.z() == 0.0) return e;
  // h sum_{k>=1} (2u^2 - 1/2) nu(beta s u^2), u = k + 1/2, equals by Poisson summation over
  // Z + 1/2 the integral h int_0^inf (2u^2 - 1/2) nu(beta s u^2) du up to exponentially small terms.
  const HighReal h(units.h), hbar(units.hbar), RR(R), m(mass);
  const HighReal s = hbar * hbar / (2 * m * RR * RR);
  const HighReal i2 = bose_fermi_integral_high(3, state.q(), state.z(), 2, bits);
  const HighReal i0 = bose_fermi_integral_high(1, state.q(), state.z(), 2, bits);
  e.set(-3, 2 * h * pow(s, HighReal(-1.5)) * i2);
  e.set(-1, -(h / 2) * pow(s, HighReal(-0.5)) * i0);
  return e;
}

AsymptoticExpansion sphere_massless_expansion(const ThermoState& state, double R, const UnitSystem& units, int order,
                                              int bits) {
  if (order < 0) throw DomainError("order must be >= 0");
  validate_geometry(Sphere3{R});
  const bool proven = state.q() <= 0.0;
  AsymptoticExpansion e(proven ? "sphere3-massless" : "sphere3-massless-extended",
                        proven ? RemainderClass::SuperPolynomial : RemainderClass::Conjectural, bits);
  check_q_range(state);
  PrecisionGuard guard(bits);
  if (state.z() == 0.0) return e;
  // S = beta^-2 [G(beta/2) - G(beta)] + 1/4 [F(beta) - F(beta/2)] with F, G the sums over
  // k >= 1 of f(delta k) = 2h nu(kappa delta k) and g(x) = x^2 f(x).
  const Rational h = rat(units.h);
  const Rational kappa = rat(units.c) * rat(units.hbar) / rat(R);
  const auto nu = occupation_jet_t<Rational>(rat(state.q()), rat(state.z()), kappa, order + 2);
  const auto f = nu.scaled(Rational(2) * h);
  const auto g = f.times_x_squared();

  // Integral parts: int g = 2h kappa^-3 I_2 at beta^-3, and -(1/4) int f = -(h/2) kappa^-1 I_0 at beta^-1.
  const Rational g_pref = Rational(2) * h / (kappa * kappa * kappa);
  const Rational f_pref = -h / (Rational(2) * kappa);
  const auto i2 = exact_bose_fermi(3, state.q(), state.z(), 1);
  const auto i0 = exact_bose_fermi(1, state.q(), state.z(), 1);

  std::map<int, Rational> series;  // power m -> b_m
  for (int m = -2; m <= order; ++m) {
    Rational b(0);
    const int n = m + 2;  // G contributes zeta(-n) g_n (2^-n - 1) beta^{n-2}
    b += zeta_neg_int(n) * g[n] * (pow_int(Rational(2), -n) - Rational(1));
    if (m >= 0) b -= Rational(1, 4) * zeta_neg_int(m) * f[m] * (pow_int(Rational(2), -m) - Rational(1));
    series[m] = b;
  }
  if (i2) {
    e.set_exact(-6, g_pref * *i2);
  } else {
    e.set(-6, high(g_pref) * bose_fermi_integral_high(3, state.q(), state.z(), 1, bits));
  }
  e.set_exact(-4, series[-2]);
  if (i0) {
    e.set_exact(-2, f_pref * *i0 + series[-1]);
  } else {
    e.set(-2, high(f_pref) * bose_fermi_integral_high(1, state.q(), state.z(), 1, bits) + high(series[-1]));
  }
  for (int m = 0; m <= order; ++m) e.set_exact(2 * m, series[m]);
  return e;
}

double sphere_massless_q0_closed_form(double z, double R, const UnitSystem& units, double beta) {
  // h z sum_{k>=1} 2k(k+1) w^{k+1/2} = 4 h z w^{3/2} / (1 - w)^3, w = e^{-kappa beta}
  const double t = beta * units.c * units.hbar / R;
  const double one_minus_w = -std::expm1(-t);
  return 4.0 * units.h * z * std::exp(-1.5 * t) / (one_minus_w * one_minus_w * one_minus_w);
}

AsymptoticExpansion sphere_massless_q0_laurent(double z, double R, const UnitSystem& units, int order) {
  validate_geometry(Sphere3{R});
  AsymptoticExpansion e("sphere3-massless-q0-bernoulli", RemainderClass::SuperPolynomial);
  const Rational h = rat(units.h);
  const Rational kappa = rat(units.c) * rat(units.hbar) / rat(R);
  const Rational c = Rational(2) * h * rat(z);
  std::map<int, Rational> coeff;
  // F(delta) = c/(e^{kappa delta} - 1) = c sum_j B_j kappa^{j-1} delta^{j-1} / j!
  // G(delta) = c delta^2 (d/dt)^2 [1/(e^t - 1)] at t = kappa delta
  //          = c sum_j B_j (j-1)(j-2) kappa^{j-3} delta^{j-1} / j!
  for (int j = 0; j <= order + 3; ++j) {
    const Rational bj = bernoulli(j) / factorial(j);
    const Rational two_pow = pow_int(Rational(2), 1 - j) - Rational(1);  // 2^{1-j} - 1
    if (j >= 3 || j == 0) {
      const Rational g = c * bj * Rational((j - 1) * (j - 2)) * pow_int(kappa, j - 3);
      if (j - 3 <= order) coeff[j - 3] += g * two_pow;
    }
    if (j - 1 <= order) coeff[j - 1] -= Rational(1, 4) * c * bj * pow_int(kappa, j - 1) * two_pow;
  }
  for (const auto& [p, v] : coeff) e.set_exact(2 * p, v);
  return e;
}

AsymptoticExpansion conjecture_anzaf(int d, double L, const ThermoState& state, const UnitSystem& units, int order,
                                     int bits) {
  if (d < 1) throw DomainError("conjecture_anzaf requires d >= 1");
  if (order < 0) throw DomainError("order must be >= 0");
  validate_geometry(Torus{d, L});
  AsymptoticExpansion e("torus-massless-conjecture", RemainderClass::Conjectural, bits);
  check_q_range(state);
  PrecisionGuard guard(bits);
  if (state.z() == 0.0) return e;
  const Rational h = rat(units.h);
  const Rational a = rat(units.c) * h / rat(L);
  const Rational z = rat(state.z());
  const Rational q = rat(state.q());
  for (int s = 0; s < d; ++s) {
    const int k = d - s;
    // C(d,s) L^k Omega_k / (c^k h^{k-1}) I_k = C(d,s) h Omega_k a^{-k} I_k
    const HighReal pref = high(binomial(d, s) * h * pow_int(a, -k)) * solid_angle_high(k);
    e.set(-2 * k, pref * bose_fermi_integral_high(k, state.q(), state.z(), 1, bits));
  }
  const auto jet = occupation_jet_t<Rational>(q, z, a, order);
  const auto series = zeta_series_part(jet);
  e.set_exact(0, h * z / (Rational(1) - z * q) + Rational(2 * d) * h * series[0]);
  for (int n = 1; n <= order; ++n) e.set_exact(2 * n, Rational(2 * d) * h * series[static_cast<std::size_t>(n)]);
  return e;
}

// ---- fits and probes ------------------------------------------------------------

OrderFit order_fit(const std::vector<ResidualPoint>& points) {
  std::vector<double> xs, ys;
  OrderFit fit;
  fit.beta_min = INFINITY;
  fit.beta_max = 0.0;
  for (const auto& p : points) {
    if (!(std::abs(p.residual) > p.floor) || p.residual == 0.0) {
      ++fit.points_at_floor;
      continue;
    }
    xs.push_back(std::log(p.beta));
    ys.push_back(std::log(std::abs(p.residual)));
    fit.beta_min = std::min(fit.beta_min, p.beta);
    fit.beta_max = std::max(fit.beta_max, p.beta);
  }
  if (xs.size() < 2) {
    std::ostringstream os;
    os << "only " << xs.size() << " of " << points.size() << " residuals lie above the precision floor";
    throw DegenerateFit(os.str());
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  fit.points_used = static_cast<int>(xs.size());
  fit.flagged = fit.points_at_floor > 0 || fit.r_squared < 0.999;
  return fit;
}

double precision_floor(double tail_bound, double value, int bits) {
  return 10.0 * (tail_bound + std::ldexp(1.0, 1 - bits) * std::abs(value));
}

std::vector<ResidualPoint> residuals(const std::vector<ExactPoint>& exact, const AsymptoticExpansion& expansion,
                                     double max_power) {
  PrecisionGuard guard(expansion.bits());
  std::vector<ResidualPoint> out;
  for (const auto& p : exact) {
    const HighReal r = p.value - expansion.evaluate_high(HighReal(p.beta), max_power);
    out.push_back({p.beta, to_double(r), p.floor});
  }
  return out;
}

SuperPolynomialVerdict superpolynomial_check(std::vector<ResidualPoint> points, int p) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.beta > b.beta; });
  std::ostringstream os;
  bool pass = true;
  double prev = INFINITY;
  for (const auto& pt : points) {
    const bool floor = std::abs(pt.residual) <= pt.floor;
    const double scaled = std::abs(pt.residual) * std::pow(pt.beta, -p);
    os << "beta=" << pt.beta << (floor ? " floor" : "") << " r*beta^-" << p << "=" << scaled << "; ";
    if (floor) continue;
    if (!(scaled < prev)) pass = false;
    prev = scaled;
  }
  return {pass, os.str()};
}

RelativisticLeading relativistic_leading(int d, const std::vector<double>& beta_grid, double tol) {
  RelativisticLeading out;
  out.expansion = AsymptoticExpansion("torus-relativistic-leading", RemainderClass::PowerBounded);
  out.expansion.set_remainder_power(-2 * d);
  {
    PrecisionGuard guard(256);
    out.expansion.set(-2 * d, solid_angle_high(d) * boost::math::tgamma(HighReal(d)));
  }
  const double coeff = out.expansion.coefficient(-d);
  std::vector<ResidualPoint> pts;
  for (double beta : beta_grid) {
    const auto r = relativistic_sum(d, beta, tol);
    const double scaled = r.value * std::pow(beta, d);
    out.betas.push_back(beta);
    out.scaled.push_back(scaled);
    pts.push_back({beta, scaled - coeff, 10.0 * (r.tail_bound * std::pow(beta, d) + 4e-16 * std::abs(scaled))});
  }
  try {
    out.fit = order_fit(pts);
  } catch (const DegenerateFit&) {
    out.fit.flagged = true;
  }
  return out;
}

ConjectureProbe probe_anzaf(int d, double L, const ThermoState& state, const UnitSystem& units,
                            const std::vector<double>& beta_grid) {
  if (d < 2) throw DomainError("the conjecture probe needs d >= 2");
  const auto conj = conjecture_anzaf(d, L, state, units, 0);
  const auto spectrum = DiscreteSpectrum::torus(Torus{d, L}, Dispersion::massless(), units);
  ConjectureProbe probe{};
  probe.conjectured = conj.coefficient(-(d - 1));
  const double lead = conj.coefficient(-d);
  // (exact - lead beta^-d) beta^{d-1} = C_{-(d-1)} + C_{-(d-2)} beta + ...
  std::vector<double> xs, ys;
  for (double beta : beta_grid) {
    const auto r = spectral_action(SumKind::Number, spectrum, state.with_beta(beta), units, 1e-13);
    const double y = (r.value - lead * std::pow(beta, -d)) * std::pow(beta, d - 1);
    probe.betas.push_back(beta);
    probe.scaled_residuals.push_back(y);
    xs.push_back(beta);
    ys.push_back(y);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  probe.fitted = my - slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (probe.fitted + slope * xs[i]);
    sse += e * e;
  }
  const double sigma2 = n > 2 ? sse / (n - 2) : 0.0;
  probe.fitted_error = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
  probe.relative_gap = probe.conjectured != 0.0 ? std::abs(probe.fitted - probe.conjectured) / std::abs(probe.conjectured)
                                                : std::abs(probe.fitted);
  probe.within_5_percent = probe.relative_gap <= 0.05;
  std::ostringstream os;
  os.precision(10);
  os << "{\"probe\":\"torus-massless-conjecture\",\"d\":" << d << ",\"q\":" << state.q() << ",\"z\":" << state.z()
     << ",\"power\":" << -(d - 1) << ",\"conjectured\":" << probe.conjectured << ",\"fitted\":" << probe.fitted
     << ",\"fitted_stderr\":" << probe.fitted_error << ",\"relative_gap\":" << probe.relative_gap
     << ",\"next_slope\":" << slope << ",\"points\":[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ",";
    os << "[" << xs[i] << "," << ys[i] << "]";
  }
  os << "]}";
  probe.report = os.str();
  return probe;
}

}  // namespace qsl
