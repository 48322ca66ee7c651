#pragma once

// Small-beta expansions of the number spectral action as explicit coefficient
// series  sum_p c_p beta^p, their comparison with exact sums, empirical order
// fits, and probes of the conjectural cases.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsl/precision.hpp"
#include "qsl/spectra.hpp"

namespace qsl {

enum class RemainderClass { SuperPolynomial, PowerBounded, Conjectural };

std::string to_string(RemainderClass rc);

struct ExpansionTerm {
  HighReal value;               ///< coefficient at the expansion's working precision
  std::optional<Rational> exact;  ///< exact coefficient when all inputs are rational
  double as_double() const { return exact ? to_double(*exact) : to_double(value); }
};

class AsymptoticExpansion {
public:
  AsymptoticExpansion() = default;
  AsymptoticExpansion(std::string provenance, RemainderClass remainder, int bits = 256)
      : provenance_(std::move(provenance)), remainder_(remainder), bits_(bits) {}

  /// Exponents are stored as twice their value so half-integers stay exact.
  void set(int twice_power, const HighReal& value);
  void set_exact(int twice_power, const Rational& value);

  const std::map<int, ExpansionTerm>& terms() const { return terms_; }
  bool has(int twice_power) const { return terms_.count(twice_power) != 0; }
  const ExpansionTerm& term(int twice_power) const;
  double coefficient(double power) const;  ///< 0 when absent

  double evaluate(double beta) const { return evaluate_truncated(beta, 1e300); }
  /// Sum over terms with exponent <= max_power.
  double evaluate_truncated(double beta, double max_power) const;
  HighReal evaluate_high(const HighReal& beta, double max_power = 1e300) const;

  /// Copy without terms whose coefficient is exactly zero.
  AsymptoticExpansion pruned() const;

  const std::string& provenance() const { return provenance_; }
  RemainderClass remainder() const { return remainder_; }
  /// For PowerBounded(p): twice p.
  std::optional<int> remainder_twice_power() const { return remainder_power_; }
  void set_remainder_power(int twice_power) { remainder_power_ = twice_power; }
  int bits() const { return bits_; }

private:
  std::string provenance_;
  RemainderClass remainder_ = RemainderClass::SuperPolynomial;
  std::optional<int> remainder_power_;
  int bits_ = 256;
  std::map<int, ExpansionTerm> terms_;
};

// ---- expansion builders ------------------------------------------------------

/// Torus, massive: single term at p = -d/2, coefficient h Omega_d (beta-free scale)^(-d/2) I_2.
AsymptoticExpansion massive_torus_expansion(const Torus& geometry, double mass, const ThermoState& state,
                                            const UnitSystem& units, int bits = 256);

/// Torus, massless: leading term at p = -d.
AsymptoticExpansion massless_torus_leading(const Torus& geometry, const ThermoState& state, const UnitSystem& units,
                                           int bits = 256);

/// 1-torus, massless, q in [-1, 0]: zeta expansion through beta^order.
AsymptoticExpansion massless_1d_zeta_expansion(double L, const ThermoState& state, const UnitSystem& units, int order,
                                               int bits = 256);

/// 1-torus, massless, q = 0: Bernoulli expansion of z h (e^a + 1)/(e^a - 1), a = beta c h / L.
AsymptoticExpansion massless_1d_q0_exact(double z, double L, const UnitSystem& units, int order);
double massless_1d_q0_closed_form(double z, double L, const UnitSystem& units, double beta);

/// 1-torus, massive, q = 0: leading term z L sqrt(2 pi m / beta) and the exact theta evaluation.
struct ThetaCase {
  AsymptoticExpansion leading;
  std::function<double(double)> exact;  ///< beta -> z h theta3(beta h^2/(2 m L^2))
};
ThetaCase massive_1d_q0_theta(double z, double L, double mass, const UnitSystem& units);

/// 3-sphere, massive: terms at p = -3/2 and p = -1/2.
AsymptoticExpansion sphere_massive_expansion(const ThermoState& state, double R, double mass, const UnitSystem& units,
                                             int bits = 256);

/// 3-sphere, massless: p = -3, p = -1 and odd p >= 1 through beta^order. q > 0 is
/// accepted but tagged Conjectural.
AsymptoticExpansion sphere_massless_expansion(const ThermoState& state, double R, const UnitSystem& units, int order,
                                              int bits = 256);

/// q = 0 sphere sum in closed form and its exact Laurent expansion (oracle).
double sphere_massless_q0_closed_form(double z, double R, const UnitSystem& units, double beta);
AsymptoticExpansion sphere_massless_q0_laurent(double z, double R, const UnitSystem& units, int order);

/// Conjectured d-torus massless expansion (always tagged Conjectural).
AsymptoticExpansion conjecture_anzaf(int d, double L, const ThermoState& state, const UnitSystem& units, int order,
                                     int bits = 256);

// ---- fits and probes ----------------------------------------------------------

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  int points_used = 0;
  int points_at_floor = 0;
  bool flagged = false;  ///< window shrunk because of floor points, or r^2 < 0.999
};

struct ResidualPoint {
  double beta;
  double residual;  ///< exact - expansion
  double floor;     ///< |residual| <= floor counts as "at floor"
};

/// Least squares of log|residual| against log beta over the points above the floor.
/// Throws DegenerateFit when fewer than two points remain.
OrderFit order_fit(const std::vector<ResidualPoint>& points);

/// Convenience wrapper: exact values, expansion truncated after max_power, floors.
struct ExactPoint {
  double beta;
  HighReal value;
  double floor;
};
std::vector<ResidualPoint> residuals(const std::vector<ExactPoint>& exact, const AsymptoticExpansion& expansion,
                                     double max_power);

/// 10 (tail + unit roundoff |value|).
double precision_floor(double tail_bound, double value, int bits);

/// residual * beta^{-p} strictly decreasing as beta decreases, points at floor accepted.
struct SuperPolynomialVerdict {
  bool pass;
  std::string detail;
};
SuperPolynomialVerdict superpolynomial_check(std::vector<ResidualPoint> points, int p);

struct RelativisticLeading {
  AsymptoticExpansion expansion;
  OrderFit fit;  ///< log|exact beta^d - coefficient| against log beta
  std::vector<double> betas;
  std::vector<double> scaled;  ///< exact * beta^d
};
RelativisticLeading relativistic_leading(int d, const std::vector<double>& beta_grid, double tol);

/// Conjecture probe: fits (exact - leading) beta^{d-1} against beta at d dims and
/// compares the intercept with the conjectured p = -(d-1) coefficient.
struct ConjectureProbe {
  double conjectured;
  double fitted;
  double fitted_error;  ///< standard error of the intercept
  double relative_gap;
  bool within_5_percent;
  std::vector<double> betas;
  std::vector<double> scaled_residuals;
  std::string report;
};
ConjectureProbe probe_anzaf(int d, double L, const ThermoState& state, const UnitSystem& units,
                            const std::vector<double>& beta_grid);

}  // namespace qsl
