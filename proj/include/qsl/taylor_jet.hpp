#pragma once

// Truncated Taylor series ("jets") at a point, generic over the coefficient
// field: double, HighReal, Rational and Ball<HighReal> all work. Coefficient k
// stores f^(k)(x0)/k!.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/precision.hpp"

namespace qsl {

/// Midpoint-radius enclosure: the exact value lies in [value - radius, value + radius].
/// Every operation adds the rounding error of the midpoint computation to the radius.
class Ball {
public:
  Ball() : value_(0), radius_(0) {}
  Ball(const HighReal& value, const HighReal& radius) : value_(value), radius_(radius) {}
  Ball(int v) : value_(v), radius_(0) {}  // NOLINT: exact small integers
  explicit Ball(double v) : value_(v), radius_(0) {}
  /// Rounds the rational to the current precision and accounts for it in the radius.
  explicit Ball(const Rational& r);

  const HighReal& value() const { return value_; }
  const HighReal& radius() const { return radius_; }
  /// Unit roundoff 2^(1-p) for the precision p of the midpoint.
  HighReal unit_roundoff() const;

  friend Ball operator+(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a, const Ball& b);
  friend Ball operator*(const Ball& a, const Ball& b);
  friend Ball operator/(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a) { return {-a.value_, a.radius_}; }
  Ball& operator+=(const Ball& b) { return *this = *this + b; }
  Ball& operator-=(const Ball& b) { return *this = *this - b; }
  Ball& operator*=(const Ball& b) { return *this = *this * b; }
  friend bool operator==(const Ball& a, const Ball& b) {
    return a.value_ == b.value_ && a.radius_ == b.radius_;
  }
  /// True when the enclosure excludes zero.
  bool nonzero() const { return abs(value_) > radius_; }

private:
  HighReal value_;
  HighReal radius_;
};

Ball exp(const Ball& x);

namespace jet_detail {

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const HighReal& x) { return x == 0; }
inline bool is_zero(const Rational& x) { return x == 0; }
inline bool is_zero(const Ball& x) { return !x.nonzero(); }

inline double exp_at(double x) { return std::exp(x); }
inline HighReal exp_at(const HighReal& x) { return exp(x); }
inline Ball exp_at(const Ball& x) { return exp(x); }
inline Rational exp_at(const Rational& x) {
  if (x != 0) throw DomainError("exact jet exponential requires a zero base point");
  return Rational(1);
}

}  // namespace jet_detail

template <class T>
class TaylorJet {
public:
  TaylorJet() = default;
  explicit TaylorJet(std::vector<T> coefficients) : c_(std::move(coefficients)) {
    if (c_.empty()) c_.push_back(T(0));
  }

  static TaylorJet constant(const T& value, int order) {
    std::vector<T> c(static_cast<std::size_t>(order) + 1, T(0));
    c[0] = value;
    return TaylorJet(std::move(c));
  }
  /// Jet of x -> x0 + slope*(x - 0).
  static TaylorJet linear(const T& x0, const T& slope, int order) {
    auto j = constant(x0, order);
    if (order >= 1) j.c_[1] = slope;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  const std::vector<T>& coefficients() const { return c_; }

  /// k-th derivative at the base point, k! * c_k.
  T derivative(int k) const {
    T v = c_[static_cast<std::size_t>(k)];
    for (int i = 2; i <= k; ++i) v = v * T(i);
    return v;
  }

  TaylorJet operator+(const TaylorJet& o) const {
    check_same_order(o);
    auto r = *this;
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }
  TaylorJet operator-(const TaylorJet& o) const {
    check_same_order(o);
    auto r = *this;
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }
  TaylorJet operator*(const TaylorJet& o) const {
    check_same_order(o);
    const std::size_t n = c_.size();
    std::vector<T> r(n, T(0));
    for (std::size_t k = 0; k < n; ++k) {
      T acc(0);
      for (std::size_t i = 0; i <= k; ++i) acc = acc + c_[i] * o.c_[k - i];
      r[k] = acc;
    }
    return TaylorJet(std::move(r));
  }
  TaylorJet scaled(const T& s) const {
    auto r = *this;
    for (auto& v : r.c_) v = v * s;
    return r;
  }
  TaylorJet shifted(const T& s) const {
    auto r = *this;
    r.c_[0] = r.c_[0] + s;
    return r;
  }

  /// 1/f via b_0 = 1/a_0, b_n = -(1/a_0) sum_{k=1..n} a_k b_{n-k}.
  TaylorJet reciprocal() const {
    if (jet_detail::is_zero(c_[0])) throw DomainError("jet reciprocal requires a nonzero constant term");
    const std::size_t n = c_.size();
    std::vector<T> b(n, T(0));
    const T inv0 = T(1) / c_[0];
    b[0] = inv0;
    for (std::size_t m = 1; m < n; ++m) {
      T acc(0);
      for (std::size_t k = 1; k <= m; ++k) acc = acc + c_[k] * b[m - k];
      b[m] = -(acc * inv0);
    }
    return TaylorJet(std::move(b));
  }

  /// exp(f) via g' = f' g: g_n = (1/n) sum_{k=1..n} k f_k g_{n-k}.
  TaylorJet exp() const {
    const std::size_t n = c_.size();
    std::vector<T> g(n, T(0));
    g[0] = jet_detail::exp_at(c_[0]);
    for (std::size_t m = 1; m < n; ++m) {
      T acc(0);
      for (std::size_t k = 1; k <= m; ++k) acc = acc + T(static_cast<int>(k)) * c_[k] * g[m - k];
      g[m] = acc / T(static_cast<int>(m));
    }
    return TaylorJet(std::move(g));
  }

  /// Jet of x^2 * f(x), truncated to the same order.
  TaylorJet times_x_squared() const {
    std::vector<T> r(c_.size(), T(0));
    for (std::size_t k = 2; k < c_.size(); ++k) r[k] = c_[k - 2];
    return TaylorJet(std::move(r));
  }

private:
  void check_same_order(const TaylorJet& o) const {
    if (o.c_.size() != c_.size()) throw DomainError("jet orders differ");
  }

  std::vector<T> c_;
};

}  // namespace qsl
