#include "qsl/qstat_sums.hpp"

namespace qsl {

namespace {

UnitSystem unit_h() {
  UnitSystem u = UnitSystem::natural();
  u.h = 1.0;
  return u;
}

double log_z_of_lines(const std::vector<SpectralLine>& lines, const ThermoState& state) {
  double sum = 0.0;
  double comp = 0.0;
  for (const auto& line : lines) {
    const double v = static_cast<double>(line.multiplicity) *
                     integrand_reduced<double>(SumKind::LP, state.beta() * line.energy, state.z(), state.q(), 1.0,
                                               state.beta());
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

SumResult log_grand_partition(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol) {
  return spectral_action(SumKind::LP, spectrum, state, unit_h(), tol);
}

double landau_potential(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol) {
  return -log_grand_partition(spectrum, state, tol).value / state.beta();
}

double pressure_volume(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol) {
  return -landau_potential(spectrum, state, tol);
}

SumResult equilibrium_entropy(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol) {
  return spectral_action(SumKind::Entropy, spectrum, state, unit_h(), tol);
}

DerivativeCheck derivative_theorem_check(const DiscreteSpectrum& spectrum, const ThermoState& state,
                                         std::size_t level_index, double h_step) {
  if (!(h_step > 0.0)) throw DomainError("finite-difference step must be > 0");
  const auto cut = truncation_radius(spectrum, state, 1e-14, TailModel::for_kind(SumKind::LP, 1.0, state.beta()));
  auto lines = spectrum.lines(cut.max_index);
  if (level_index >= lines.size()) throw DomainError("level index outside the spectrum");
  const SpectralLine level = lines[level_index];
  validate_state(state, std::max(0.0, level.energy - h_step));

  auto shifted = [&](double delta) {
    auto copy = lines;
    copy[level_index].energy = level.energy + delta;
    return log_z_of_lines(copy, state);
  };
  const double derivative = (shifted(h_step) - shifted(-h_step)) / (2.0 * h_step);
  DerivativeCheck r;
  r.lhs = -derivative / state.beta();
  r.rhs = level_population(level, state);
  r.discrepancy = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace qsl
