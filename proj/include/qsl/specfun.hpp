#pragma once

#include <cmath>
#include <vector>

#include "qsl/precision.hpp"
#include "qsl/taylor_jet.hpp"

namespace qsl {

using ExactRational = Rational;

/// B_n with B_1 = -1/2 (generating function x/(e^x - 1)). Memoized; the cache
/// is safe under concurrent readers and serializes writers.
ExactRational bernoulli(int n);

/// zeta(-n) = (-1)^n B_{n+1}/(n+1).
ExactRational zeta_neg_int(int n);

/// Li_s(x) = sum_{k>=1} x^k / k^s for s > 0, |x| <= 1 (x = 1 needs s > 1).
/// Throws DivergentInput for x = 1, s <= 1 and DomainError for |x| > 1.
double polylog(double s, double x, double tol = 1e-15);

/// Closed form of int_0^inf y^(d-1) / (z^-1 exp(y^alpha) - q) dy:
///   (1/alpha) Gamma(d/alpha) Li_{d/alpha}(zq) / q   (q != 0)
///   (1/alpha) Gamma(d/alpha) z                     (q == 0)
/// Falls back to quadrature for z|q| > 1 with q < 0 (outside the polylog
/// disc). Throws DivergentInput at zq = 1 when d <= alpha and PoleViolation
/// for zq > 1, q > 0.
double bose_fermi_integral(double d, double q, double z, int alpha, double tol = 1e-13);

/// Li_s(x) in the current HighReal precision for x <= 1 (x = 1 needs s > 1;
/// s = 1 also accepts x < -1 through -log(1 - x)).
HighReal polylog_high(const HighReal& s, const HighReal& x);

/// bose_fermi_integral at `bits` of precision (same domain rules).
HighReal bose_fermi_integral_high(double d, double q, double z, int alpha, int bits);

/// The same integral by adaptive Gauss-Kronrod panels on [0, Y] plus an
/// incomplete-gamma bound on the tail beyond Y. Independent of the polylog
/// route; used as its oracle.
struct QuadratureResult {
  double value;
  double error_estimate;  ///< panel error estimates plus the certified tail bound
};
QuadratureResult bose_fermi_quadrature(double d, double q, double z, int alpha, double tol = 1e-13);

/// Same integrand restricted to [lower, inf); used to expose divergences at the origin.
QuadratureResult bose_fermi_quadrature_from(double lower, double d, double q, double z, int alpha,
                                            double tol = 1e-12);

/// Cohen-Villegas-Zagier acceleration of sum_{k>=0} (-1)^k a_k using a_0..a_{n-1}.
/// For a moment sequence a_k = int w^k dmu(w), mu >= 0 on [0,1], the error is
/// at most 2 a_0 / (3 + sqrt 8)^n.
template <class Term>
double cvz_alternating_sum(Term&& a, int n) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = (d + 1.0 / d) / 2.0;
  double b = -1.0;
  double c = -d;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a(k);
    b = (static_cast<double>(k + n) * static_cast<double>(k - n) * b) /
        ((static_cast<double>(k) + 0.5) * static_cast<double>(k + 1));
  }
  return s / d;
}

/// Measure of the unit (d-1)-sphere, 2 pi^(d/2) / Gamma(d/2).
double solid_angle(int d);

/// sum_{k in Z} exp(-a k^2).
double theta3_direct(double a, double tol = 1e-17);
/// sqrt(pi/a) sum_{n in Z} exp(-pi^2 n^2 / a).
double theta3_poisson(double a, double tol = 1e-17);
/// Whichever representation converges faster (direct for a >= pi).
double theta3_sum(double a, double tol = 1e-17);
/// theta3(a)^d - 1 without cancellation for large a.
double theta3_power_minus_one(double a, int d);

/// Jet of x -> 1/(z^-1 exp(a x) - q) at x = 0, computed as z/(exp(a x) - z q).
/// Throws PoleViolation when zq = 1.
template <class T>
TaylorJet<T> occupation_jet_t(const T& q, const T& z, const T& a, int order) {
  if (z * q == T(1)) throw PoleViolation("occupation jet base point sits on the pole zq = 1");
  auto e = TaylorJet<T>::linear(T(0), a, order).exp();
  return e.shifted(-(z * q)).reciprocal().scaled(z);
}

/// High-precision occupation jet; c_n = n! * coefficient n.
TaylorJet<HighReal> occupation_jet(double q, double z, double scale_a, int order, int precision_bits = 256);

/// Exact occupation jet for the binary64 inputs (every double is a dyadic rational).
TaylorJet<Rational> occupation_jet_exact(double q, double z, double scale_a, int order);

struct GrowthPoint {
  int n;
  double growth;              ///< |g^(2n)(0)|^(1/(2n))
  double significant_digits;  ///< from the running error bound of g^(2n)(0)
};

/// Even-derivative growth of g(x) = 1/(z^-1 exp(a x) - q) for n = 1..n_max,
/// computed with ball arithmetic. Throws PrecisionExhausted when an entry keeps
/// fewer than `min_digits` significant digits.
std::vector<GrowthPoint> derivative_growth_sequence(double q, double z, double scale_a, int n_max,
                                                    int precision_bits = 256, double min_digits = 8.0);

}  // namespace qsl
