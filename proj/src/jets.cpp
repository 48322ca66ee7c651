#include <cmath>
#include <limits>
#include <sstream>

#include "qsl/specfun.hpp"
#include "qsl/taylor_jet.hpp"

namespace qsl {

namespace {

HighReal roundoff_of(const HighReal& v) {
  const auto bits = static_cast<long>(mpfr_get_prec(v.backend().data()));
  return ldexp(HighReal(1), static_cast<int>(1 - bits));
}

// Radii are computed with round-to-nearest; the slack factor keeps them upper bounds.
HighReal inflate(const HighReal& radius, const HighReal& u) { return radius * (1 + 4 * u); }

}  // namespace

Ball::Ball(const Rational& r) : value_(r), radius_(0) { radius_ = abs(value_) * unit_roundoff(); }

HighReal Ball::unit_roundoff() const { return roundoff_of(value_); }

Ball operator+(const Ball& a, const Ball& b) {
  HighReal v = a.value_ + b.value_;
  const HighReal u = roundoff_of(v);
  return {v, inflate(a.radius_ + b.radius_ + u * abs(v), u)};
}

Ball operator-(const Ball& a, const Ball& b) {
  HighReal v = a.value_ - b.value_;
  const HighReal u = roundoff_of(v);
  return {v, inflate(a.radius_ + b.radius_ + u * abs(v), u)};
}

Ball operator*(const Ball& a, const Ball& b) {
  HighReal v = a.value_ * b.value_;
  const HighReal u = roundoff_of(v);
  HighReal r = abs(a.value_) * b.radius_ + abs(b.value_) * a.radius_ + a.radius_ * b.radius_ + u * abs(v);
  return {v, inflate(r, u)};
}

Ball operator/(const Ball& a, const Ball& b) {
  if (!b.nonzero()) throw DomainError("ball division by an enclosure containing zero");
  HighReal v = a.value_ / b.value_;
  const HighReal u = roundoff_of(v);
  const HighReal mb = abs(b.value_);
  HighReal r = (abs(a.value_) * b.radius_ + mb * a.radius_) / (mb * (mb - b.radius_)) + u * abs(v);
  return {v, inflate(r, u)};
}

Ball exp(const Ball& x) {
  HighReal v = exp(x.value());
  const HighReal u = roundoff_of(v);
  HighReal r = v * expm1(x.radius()) + u * v;
  return {v, inflate(r, u)};
}

TaylorJet<HighReal> occupation_jet(double q, double z, double scale_a, int order, int precision_bits) {
  if (order < 0) throw DomainError("jet order must be >= 0");
  PrecisionGuard guard(precision_bits);
  return occupation_jet_t<HighReal>(HighReal(q), HighReal(z), HighReal(scale_a), order);
}

TaylorJet<Rational> occupation_jet_exact(double q, double z, double scale_a, int order) {
  if (order < 0) throw DomainError("jet order must be >= 0");
  return occupation_jet_t<Rational>(exact(q), exact(z), exact(scale_a), order);
}

std::vector<GrowthPoint> derivative_growth_sequence(double q, double z, double scale_a, int n_max,
                                                    int precision_bits, double min_digits) {
  std::vector<GrowthPoint> out;
  if (n_max <= 0) return out;
  PrecisionGuard guard(precision_bits);
  const auto jet = occupation_jet_t<Ball>(Ball(q), Ball(z), Ball(scale_a), 2 * n_max);
  for (int n = 1; n <= n_max; ++n) {
    const Ball deriv = jet.derivative(2 * n);
    const HighReal mag = abs(deriv.value());
    double digits;
    if (deriv.radius() == 0) {
      digits = std::numeric_limits<double>::infinity();
    } else if (mag == 0) {
      digits = 0.0;
    } else {
      digits = -std::log10(to_double(HighReal(deriv.radius() / mag)));
    }
    if (digits < min_digits) {
      std::ostringstream os;
      os << "derivative of order " << 2 * n << " keeps only " << digits << " significant digits at "
         << precision_bits << " bits";
      throw PrecisionExhausted(os.str(), n);
    }
    const double growth = mag == 0 ? 0.0 : to_double(HighReal(exp(log(mag) / (2 * n))));
    out.push_back({n, growth, digits});
  }
  return out;
}

}  // namespace qsl
