#pragma once

// Discrete one-particle spectra: the d-torus lattice grouped into shells
// |k|^2 = n with representation counts r_d(n), the S^3 Dirac spectrum and
// explicit line lists. Also the certified truncation radius.

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "qsl/core_model.hpp"
#include "qsl/qstat.hpp"

namespace qsl {

/// counts[n] = r_d(n) = #{k in Z^d : |k|^2 = n}, n = 0..n_max. Immutable once built.
class ShellTable {
public:
  ShellTable(int d, std::vector<std::uint64_t> counts) : d_(d), counts_(std::move(counts)) {}
  int d() const { return d_; }
  std::int64_t n_max() const { return static_cast<std::int64_t>(counts_.size()) - 1; }
  std::uint64_t operator[](std::int64_t n) const { return counts_[static_cast<std::size_t>(n)]; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// #{k : |k|^2 <= n}
  std::uint64_t cumulative(std::int64_t n) const;

private:
  int d_;
  std::vector<std::uint64_t> counts_;
};

/// Exact r_d(n) for n <= n_max by iterated convolution with r_1.
ShellTable shell_counts(int d, std::int64_t n_max);

/// Shared, cached table covering at least n_max (tables only ever grow).
std::shared_ptr<const ShellTable> shared_shell_counts(int d, std::int64_t n_max);

/// Weight k(k+1) of one sign branch +-(k+1/2) of the S^3 Dirac spectrum.
inline std::uint64_t sphere3_branch_weight(std::int64_t k) {
  return static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(k + 1);
}

struct TorusSource {
  Torus geometry;
  Dispersion dispersion;
  UnitSystem units;
};

/// |D| spectrum on S^3 of radius R, k >= 1, both sign branches combined.
struct Sphere3Source {
  Sphere3 geometry;
  Dispersion dispersion;
  UnitSystem units;
};

struct ExplicitSource {
  std::vector<SpectralLine> lines;
};

using SpectrumSource = std::variant<TorusSource, Sphere3Source, ExplicitSource>;

/// A line addressed by its index: torus shell n (d >= 2), |k| (d = 1), sphere k
/// or position in an explicit list. Empty shells carry multiplicity 0.
struct IndexedLine {
  std::int64_t index;
  double energy;
  std::uint64_t multiplicity;
};

class DiscreteSpectrum {
public:
  explicit DiscreteSpectrum(SpectrumSource source);

  static DiscreteSpectrum torus(const Torus& geometry, const Dispersion& dispersion, const UnitSystem& units);
  static DiscreteSpectrum sphere3(const Sphere3& geometry, const Dispersion& dispersion, const UnitSystem& units);
  static DiscreteSpectrum explicit_lines(std::vector<SpectralLine> lines);

  const SpectrumSource& source() const { return source_; }
  bool is_finite() const { return std::holds_alternative<ExplicitSource>(source_); }
  double eps_min() const;

  /// First valid index (1 for the sphere, 0 otherwise) and, for finite spectra, the last.
  std::int64_t first_index() const;
  std::optional<std::int64_t> last_index() const;

  /// Energy is scale * reduced(index); the reduced map is exposed so
  /// high-precision sums can evaluate it in their own arithmetic.
  double energy_scale() const { return scale_; }
  double reduced_energy(std::int64_t index) const;

  /// Multiplicity at the index; `table` must cover the index for d >= 2 tori.
  std::uint64_t multiplicity(std::int64_t index, const ShellTable* table) const;

  /// Non-empty lines with index <= max_index, ascending.
  std::vector<SpectralLine> lines(std::int64_t max_index) const;

  /// Relativistic tori: (h/(m c L))^2, the coefficient of n under the root.
  double relativistic_ratio() const { return rel_ratio_; }

private:
  SpectrumSource source_;
  double scale_ = 1.0;
  double rel_ratio_ = 0.0;
};

inline DiscreteSpectrum torus_spectrum(const Torus& g, const Dispersion& disp, const UnitSystem& units) {
  return DiscreteSpectrum::torus(g, disp, units);
}
inline DiscreteSpectrum sphere3_spectrum(const Sphere3& g, const Dispersion& disp, const UnitSystem& units) {
  return DiscreteSpectrum::sphere3(g, disp, units);
}

/// Integrand envelope f(x) <= C e^{-x} (c0 + c1 x) on the tail, x = beta*eps.
/// C is supplied by the truncation search; this holds the kind-specific part.
struct TailModel {
  double c0 = 1.0;
  double c1 = 0.0;
  bool entropy = false;  ///< c0 depends on C: 1 + max(q,0) C - ln C

  static TailModel for_kind(SumKind kind, double h, double beta);
};

struct Truncation {
  std::int64_t max_index;     ///< last index included in the truncated sum
  double tail_bound;          ///< certified bound on the omitted remainder
  double lattice_points;      ///< number of lattice points (or lines) covered
};

/// Smallest index whose certified tail is <= tol. Finite spectra return their
/// last index with tail 0. Throws TailBoundFailure when the cap is exceeded.
Truncation truncation_radius(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol,
                             const TailModel& model = {}, double lattice_cap = 1e9);

/// The tail bound itself for a given cut index (infinite when not certifiable there).
double tail_bound_at(const DiscreteSpectrum& spectrum, const ThermoState& state, std::int64_t max_index,
                     const TailModel& model = {});

}  // namespace qsl
