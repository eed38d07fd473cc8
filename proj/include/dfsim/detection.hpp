#pragma once

// Threshold detectors and the click-based two-qubit analysis used by the
// distribution protocol.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfsim/fock.hpp"
#include "dfsim/optics.hpp"

namespace dfsim {

struct DetectorModel {
  std::string name;
  double efficiency = 1.0;
  double dark_probability = 0.0;  // per pulse

  /// 1 - (1 - eta)^n (1 - d). Throws ConfigError on out-of-range parameters.
  double click_probability(int photons) const;
  double no_click_probability(int photons) const;
  void validate() const;
};

struct DetectorAssignment {
  DetectorModel model;
  std::vector<std::size_t> modes;  // photons in any of these modes can fire it
};

/// Probability of an exact click/no-click pattern over the assigned
/// detectors; unassigned modes are summed over. Throws ValidationError when
/// two detectors share a mode.
double click_probability(const FockStateVector& state, std::span<const DetectorAssignment> detectors,
                         std::span<const bool> pattern);

/// Probability that every detector clicks, split by a caller-supplied key of
/// each occupation term. Terms are orthogonal, so the split is exact.
std::map<int, double> all_click_probability_by(
    const FockStateVector& state, std::span<const DetectorAssignment> detectors,
    const std::function<int(const Occupation&)>& key);

inline constexpr std::array<AnalyzerBasis, 6> kAnalyzerBases = {
    AnalyzerBasis::H, AnalyzerBasis::V, AnalyzerBasis::D,
    AnalyzerBasis::A, AnalyzerBasis::R, AnalyzerBasis::L};

/// Coincidence probability for every pair of polarization analyzer settings
/// on the two analyzed photons, indexed by AnalyzerBasis.
using SettingTable = std::array<std::array<double, 6>, 6>;

inline double& at(SettingTable& t, AnalyzerBasis a, AnalyzerBasis b) {
  return t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}
inline double at(const SettingTable& t, AnalyzerBasis a, AnalyzerBasis b) {
  return t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

/// Correlation <P_a P_b> from the four coincidences of a basis pair, each
/// normalized by their sum. `a` and `b` must be the + eigenstates
/// (H, D or R). Throws UndefinedError when all four vanish.
double correlation(const SettingTable& t, AnalyzerBasis a, AnalyzerBasis b);

/// Linear-inversion two-qubit estimate from the 36 Pauli-eigenstate
/// coincidences. Each basis pair is normalized on its own, as a counting
/// experiment would; single-qubit terms are averaged over the partner bases.
PolarizationDensityMatrix linear_inversion(const SettingTable& t);

/// Which photons are analyzed and how the herald is taken.
struct AnalysisSetup {
  std::string first_label = "E";   // analyzed photon on Alice's side
  std::string second_label = "G";  // analyzed photon on Bob's side
  /// Herald mode projected onto `herald_polarization`; none for a plain
  /// two-fold coincidence.
  std::optional<std::string> herald_label = "F";
  JonesVector herald_polarization = polarization_state(AnalyzerBasis::D);
  /// Also accept the orthogonal herald outcome, correcting it with a Z flip
  /// on the first photon.
  bool include_orthogonal_herald = false;
  DetectorModel first_detector{"D_E", 1.0, 0.0};
  DetectorModel herald_detector{"D_F", 1.0, 0.0};
  DetectorModel second_detector{"D_G", 1.0, 0.0};
};

struct ConditionedResult {
  SettingTable coincidences{};
  /// All detectors firing with no polarization analyzers on the analyzed
  /// photons (the herald projection stays in place).
  double success_probability = 0.0;
  /// Linear-inversion estimate; zero when success_probability is zero.
  PolarizationDensityMatrix dm;
  bool empty = true;
};

/// Applies the herald projection and threshold clicks, then evaluates the
/// coincidence table over all analyzer pairs and the resulting conditional
/// two-qubit matrix. `sector_key`, when given, splits success_probability by
/// occupation term into `by_sector`.
ConditionedResult conditioned_polarization_dm(
    const FockStateVector& state, const AnalysisSetup& setup,
    const std::function<int(const Occupation&)>& sector_key = {},
    std::map<int, double>* by_sector = nullptr);

/// Coincidence probability for one analyzer pair (used by delay scans).
double coincidence_probability(const FockStateVector& state, const AnalysisSetup& setup,
                               const JonesVector& first_pol, const JonesVector& second_pol);

/// Probabilities of the eight D_E/D_F/D_G click patterns with no analyzers,
/// indexed by (E << 2) | (F << 1) | G. Requires a herald label.
std::array<double, 8> click_pattern_distribution(const FockStateVector& state,
                                                 const AnalysisSetup& setup);

}  // namespace dfsim
