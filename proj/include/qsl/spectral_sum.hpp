#pragma once

// Truncated spectral sums  S_kind = sum_lines g(eps) f_kind(eps)  with a bound
// on the omitted tail. Two double-precision routes and one multiprecision route:
//   direct     ascending-index compensated summation up to the certified radius
//   transform  torus Number/LP sums at small beta: expand the occupation in
//              powers of z q e^{-x} and evaluate each lattice sum through theta
//              functions (and a subordination integral for |k|-type energies)
//   high       the direct route in MPFR arithmetic

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsl/precision.hpp"
#include "qsl/spectra.hpp"

namespace qsl {

struct SumResult {
  double value = 0.0;
  double tail_bound = 0.0;      ///< |true - value| <= tail_bound (estimate on the transform route)
  std::int64_t terms_used = 0;  ///< lines (direct) or series terms (transform)
  double scale = 0.0;           ///< dimensionless scale beta * energy_scale
  std::string method;
};

enum class SumMethod { Auto, Direct, Transform };

SumResult spectral_action(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state,
                          const UnitSystem& units, double tol, SumMethod method = SumMethod::Auto);

struct HighSumResult {
  HighReal value;
  double tail_bound = 0.0;
  std::int64_t terms_used = 0;
  int bits = 0;
};

/// Direct route evaluated with `bits` of precision. The energy scale is formed
/// in the same precision from the spectrum's constants.
HighSumResult spectral_action_high(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state,
                                   const UnitSystem& units, double tol, int bits);

/// sum_{k in Z^d} exp(-beta sqrt(|k|^2 + 1)) (m = c = h = L = 1).
SumResult relativistic_sum(int d, double beta, double tol);

struct SweepRow {
  double beta;
  std::optional<SumResult> result;
  std::string error;  ///< set when the point failed; the sweep continues
};

std::vector<SweepRow> beta_sweep(SumKind kind, const DiscreteSpectrum& spectrum, const ThermoState& state_template,
                                 const UnitSystem& units, const std::vector<double>& beta_grid, double tol);

/// beta_j = beta0 * ratio^j, j = 0..count-1.
std::vector<double> geometric_grid(double beta0, double ratio, int count);

/// Worker count for data-parallel summation: QSL_THREADS if set, else the hardware count.
unsigned worker_threads();

}  // namespace qsl
