#include "qsl/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

namespace qsl {

namespace {

class BernoulliCache {
public:
  Rational get(int n) {
    {
      std::shared_lock lock(mutex_);
      if (n < static_cast<int>(values_.size())) return values_[static_cast<std::size_t>(n)];
    }
    std::unique_lock lock(mutex_);
    while (static_cast<int>(values_.size()) <= n) extend();
    return values_[static_cast<std::size_t>(n)];
  }

private:
  // sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1.
  void extend() {
    const int m = static_cast<int>(values_.size());
    if (m == 0) {
      values_.emplace_back(1);
      return;
    }
    Rational acc(0);
    BigInt binom(1);  // C(m+1, k), starting at k = 0
    for (int k = 0; k < m; ++k) {
      acc += Rational(binom) * values_[static_cast<std::size_t>(k)];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    values_.push_back(-acc / Rational(m + 1));
  }

  std::shared_mutex mutex_;
  std::vector<Rational> values_;
};

BernoulliCache& bernoulli_cache() {
  static BernoulliCache cache;
  return cache;
}

bool is_integer(double s) { return s == std::floor(s); }

// Li_s(e^mu) for mu in (-2 pi, 0): Gamma(1-s)(-mu)^(s-1) + sum_k zeta(s-k) mu^k/k!
// (integer s replaces the singular pair by the harmonic-number term).
double polylog_near_one(double s, double mu) {
  const int max_terms = 80;
  double sum = 0.0;
  double power = 1.0;  // mu^k / k!
  const bool integral_order = is_integer(s);
  const int n = static_cast<int>(s);
  for (int k = 0; k < max_terms; ++k) {
    if (!(integral_order && k == n - 1)) {
      const double term = boost::math::zeta(s - k) * power;
      sum += term;
      if (term != 0.0 && k > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    power *= mu / (k + 1);
  }
  if (integral_order) {
    double harmonic = 0.0;
    for (int i = 1; i < n; ++i) harmonic += 1.0 / i;
    double lead = 1.0;
    for (int i = 1; i < n; ++i) lead *= mu / i;
    sum += lead * (harmonic - std::log(-mu));
  } else {
    sum += boost::math::tgamma(1.0 - s) * std::pow(-mu, s - 1.0);
  }
  return sum;
}

double bose_fermi_integrand(double y, double d, double q, double z, int alpha) {
  if (y == 0.0) {
    if (d > 1.0) return 0.0;
    if (d < 1.0) return std::numeric_limits<double>::infinity();
  }
  const double t = alpha == 1 ? y : y * y;
  const double x = z * q;
  // 1 - x e^{-t} = (1 - x) - x expm1(-t) keeps accuracy near the pole x -> 1.
  const double denom = (1.0 - x) - x * std::expm1(-t);
  return std::pow(y, d - 1.0) * z * std::exp(-t) / denom;
}

}  // namespace

ExactRational bernoulli(int n) {
  if (n < 0) throw DomainError("bernoulli index must be >= 0");
  return bernoulli_cache().get(n);
}

ExactRational zeta_neg_int(int n) {
  if (n < 0) throw DomainError("zeta_neg_int index must be >= 0");
  Rational v = bernoulli(n + 1) / Rational(n + 1);
  return (n % 2 == 0) ? v : Rational(-v);
}

double polylog(double s, double x, double tol) {
  if (!(s > 0.0)) throw DomainError("polylog requires s > 0");
  if (!(std::abs(x) <= 1.0)) throw DomainError("polylog is only provided for |x| <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) {
    if (s <= 1.0) throw DivergentInput("Li_s(1) diverges for s <= 1");
    return boost::math::zeta(s);
  }
  if (x < 0.0) {
    // Li_s(x) = -sum_{k>=0} (-1)^k |x|^{k+1}/(k+1)^s, a moment sequence on [0, |x|].
    const double ax = -x;
    const double a0 = ax;
    const int n = std::clamp(static_cast<int>(std::ceil(std::log(2.0 * a0 / tol) / std::log(3.0 + std::sqrt(8.0)))) + 1,
                             4, 60);
    return -cvz_alternating_sum([&](int k) { return std::pow(ax, k + 1) / std::pow(k + 1.0, s); }, n);
  }
  if (x <= 0.5) {
    double sum = 0.0;
    double comp = 0.0;
    double power = x;
    for (int k = 1; k < 10000; ++k) {
      const double term = power / std::pow(static_cast<double>(k), s);
      const double y = term - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      // remaining tail <= x^{k+1}/((k+1)^s (1-x))
      if (power * x / ((1.0 - x) * std::pow(k + 1.0, s)) < tol) break;
      power *= x;
    }
    return sum;
  }
  return polylog_near_one(s, std::log(x));
}

double bose_fermi_integral(double d, double q, double z, int alpha, double tol) {
  if (!(d > 0.0)) throw DomainError("bose_fermi_integral requires d > 0");
  if (alpha != 1 && alpha != 2) throw DomainError("alpha must be 1 or 2");
  if (z == 0.0) return 0.0;
  const double s = d / alpha;
  const double prefactor = boost::math::tgamma(s) / alpha;
  if (q == 0.0) return prefactor * z;
  const double x = z * q;
  if (q > 0.0 && x > 1.0) {
    std::ostringstream os;
    os << "zq=" << x << " > 1 puts the pole inside the integration range";
    throw PoleViolation(os.str());
  }
  if (x == 1.0 && s <= 1.0) {
    std::ostringstream os;
    os << "integral diverges at zq=1 for d=" << d << ", alpha=" << alpha << " (needs d > alpha)";
    throw DivergentInput(os.str());
  }
  if (std::abs(x) <= 1.0) return prefactor * polylog(s, x, tol * 1e-2) / q;
  if (s == 1.0) return -std::log1p(-x) / (alpha * q);
  return bose_fermi_quadrature(d, q, z, alpha, tol).value;
}

namespace {

HighReal epsilon_high() {
  return ldexp(HighReal(1), -static_cast<int>(std::ceil(HighReal::default_precision() * 3.3219280948873623)));
}

// CVZ in the working precision for sum_{k>=0} (-1)^k a_k.
template <class Term>
HighReal cvz_high(Term&& a, int n) {
  HighReal d = pow(3 + sqrt(HighReal(8)), n);
  d = (d + 1 / d) / 2;
  HighReal b = -1;
  HighReal c = -d;
  HighReal s = 0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a(k);
    b = (HighReal(k + n) * HighReal(k - n) * b) / ((HighReal(k) + HighReal(0.5)) * HighReal(k + 1));
  }
  return s / d;
}

}  // namespace

HighReal polylog_high(const HighReal& s, const HighReal& x) {
  if (x == 0) return HighReal(0);
  if (s == 1) {
    if (x >= 1) throw DivergentInput("Li_1(x) diverges at x >= 1");
    return -log1p(-x);
  }
  if (!(s > 0)) throw DomainError("polylog requires s > 0");
  if (x > 1 || x < -1) throw DomainError("high-precision polylog is only provided for |x| <= 1");
  if (x == 1) {
    if (s <= 1) throw DivergentInput("Li_s(1) diverges for s <= 1");
    return boost::math::zeta(s);
  }
  if (x == -1) return -(1 - pow(HighReal(2), 1 - s)) * boost::math::zeta(s);
  const HighReal eps = epsilon_high();
  if (x < HighReal(-0.5)) {
    const HighReal ax = -x;
    const int n = static_cast<int>(std::ceil(HighReal::default_precision() * 3.3219280948873623 / 2.54)) + 4;
    return -cvz_high([&](int k) { return pow(ax, k + 1) / pow(HighReal(k + 1), s); }, n);
  }
  HighReal sum = 0;
  HighReal power = x;
  const HighReal ax = abs(x);
  for (long k = 1; k < 5000000; ++k) {
    sum += power / pow(HighReal(k), s);
    power *= x;
    if (abs(power) / (1 - ax) < eps * abs(sum)) break;
  }
  return sum;
}

HighReal bose_fermi_integral_high(double d, double q, double z, int alpha, int bits) {
  if (!(d > 0.0)) throw DomainError("bose_fermi_integral requires d > 0");
  if (alpha != 1 && alpha != 2) throw DomainError("alpha must be 1 or 2");
  PrecisionGuard guard(bits);
  if (z == 0.0) return HighReal(0);
  const HighReal s = HighReal(d) / alpha;
  const HighReal prefactor = boost::math::tgamma(s) / alpha;
  if (q == 0.0) return prefactor * HighReal(z);
  const HighReal x = HighReal(z) * HighReal(q);
  if (q > 0.0 && x > 1) throw PoleViolation("zq > 1 puts the pole inside the integration range");
  if (x == 1 && s <= 1) throw DivergentInput("integral diverges at zq=1 (needs d > alpha)");
  return prefactor * polylog_high(s, x) / HighReal(q);
}

QuadratureResult bose_fermi_quadrature_from(double lower, double d, double q, double z, int alpha, double tol) {
  if (z == 0.0) return {0.0, 0.0};
  const double x = z * q;
  if (q > 0.0 && x > 1.0) throw PoleViolation("quadrature: zq > 1");
  // Tail beyond Y: nu <= z e^{-t} / (1 - max(0,x) e^{-Y^alpha}), and
  // int_Y^inf y^{d-1} e^{-y^alpha} dy = Gamma(d/alpha, Y^alpha)/alpha.
  double Y = std::max(8.0, 2.0 * lower);
  double tail = 0.0;
  for (;;) {
    const double t = alpha == 1 ? Y : Y * Y;
    const double pole = std::max(0.0, x) * std::exp(-t);
    tail = z * boost::math::tgamma(d / alpha, t) / alpha / (1.0 - pole);
    if (tail < tol * 0.25 || Y > 1e4) break;
    Y *= 1.25;
  }
  auto f = [&](double y) { return bose_fermi_integrand(y, d, q, z, alpha); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double value = 0.0;
  double err_total = tail;
  // binary64 cannot resolve panel errors much below 1e-13 relative; asking for
  // more only drives the recursion to its depth limit
  const double rel = std::max(tol, 1e-13);
  // Panels [lower, lower + 2^-4], doubling widths, up to Y.
  double a = lower;
  double width = 0.0625;
  while (a < Y) {
    const double b = std::min(Y, a + width);
    double err = 0.0;
    value += GK::integrate(f, a, b, 15, rel, &err);
    err_total += err;
    a = b;
    width *= 2.0;
  }
  return {value, err_total};
}

QuadratureResult bose_fermi_quadrature(double d, double q, double z, int alpha, double tol) {
  return bose_fermi_quadrature_from(0.0, d, q, z, alpha, tol);
}

double solid_angle(int d) {
  if (d < 1) throw DomainError("solid_angle requires d >= 1");
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / boost::math::tgamma(d / 2.0);
}

double theta3_direct(double a, double tol) {
  if (!(a > 0.0)) throw DomainError("theta3 requires a > 0");
  double sum = 0.0;
  double comp = 0.0;
  for (long k = 1;; ++k) {
    const double term = std::exp(-a * static_cast<double>(k) * static_cast<double>(k));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (term < tol * (1.0 + sum) * 1e-3 || term == 0.0) break;
  }
  return 1.0 + 2.0 * sum;
}

double theta3_poisson(double a, double tol) {
  if (!(a > 0.0)) throw DomainError("theta3 requires a > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double sum = 0.0;
  for (long n = 1;; ++n) {
    const double term = std::exp(-pi2 * static_cast<double>(n) * static_cast<double>(n) / a);
    sum += term;
    if (term < tol * (1.0 + sum) * 1e-3 || term == 0.0) break;
  }
  return std::sqrt(std::numbers::pi / a) * (1.0 + 2.0 * sum);
}

double theta3_sum(double a, double tol) {
  return a >= std::numbers::pi ? theta3_direct(a, tol) : theta3_poisson(a, tol);
}

double theta3_power_minus_one(double a, int d) {
  if (a >= std::numbers::pi) {
    double excess = 0.0;  // theta - 1
    for (long k = 1;; ++k) {
      const double term = 2.0 * std::exp(-a * static_cast<double>(k) * static_cast<double>(k));
      excess += term;
      if (term <= 1e-18 * excess) break;
    }
    return std::expm1(d * std::log1p(excess));
  }
  return std::pow(theta3_poisson(a), d) - 1.0;
}

}  // namespace qsl
