#include "dfsim/detection.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "dfsim/errors.hpp"

namespace dfsim {

namespace {

using Mat2 = Eigen::Matrix2cd;

std::vector<std::size_t> detected_modes(const ModeRegistry& reg, std::string_view label,
                                        bool h_only) {
  std::vector<std::size_t> out;
  for (auto m : reg.modes_of(label))
    if (!h_only || reg.mode(m).pol == Pol::H) out.push_back(m);
  if (out.empty()) throw ConfigError("no detector modes for label '" + std::string(label) + "'");
  return out;
}

void check_disjoint(std::span<const DetectorAssignment> detectors) {
  std::set<std::size_t> seen;
  for (const auto& d : detectors) {
    d.model.validate();
    for (auto m : d.modes)
      if (!seen.insert(m).second)
        throw ValidationError("detectors '" + d.model.name + "' and another share a mode");
  }
}

double pattern_weight(const Occupation& occ, std::span<const DetectorAssignment> detectors,
                      std::span<const bool> pattern) {
  double w = 1.0;
  for (std::size_t k = 0; k < detectors.size(); ++k) {
    int n = 0;
    for (auto m : detectors[k].modes) n += occ[m];
    w *= pattern[k] ? detectors[k].model.click_probability(n)
                    : detectors[k].model.no_click_probability(n);
  }
  return w;
}

JonesVector orthogonal(const JonesVector& u) {
  return JonesVector(-std::conj(u(1)), std::conj(u(0)));
}

std::array<Mat2, 4> paulis() {
  const Amplitude i{0.0, 1.0};
  Mat2 id = Mat2::Identity(), x, y, z;
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, -i, i, 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  return {id, x, y, z};
}

Eigen::Matrix4cd kron(const Mat2& a, const Mat2& b) {
  Eigen::Matrix4cd k;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) k.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return k;
}

// Index of the +/- eigenstates of Pauli k (1 = X, 2 = Y, 3 = Z).
std::pair<AnalyzerBasis, AnalyzerBasis> eigenstates(int k) {
  switch (k) {
    case 1: return {AnalyzerBasis::D, AnalyzerBasis::A};
    case 2: return {AnalyzerBasis::R, AnalyzerBasis::L};
    default: return {AnalyzerBasis::H, AnalyzerBasis::V};
  }
}

AnalyzerBasis partner(AnalyzerBasis a) {
  switch (a) {
    case AnalyzerBasis::H: return AnalyzerBasis::V;
    case AnalyzerBasis::D: return AnalyzerBasis::A;
    case AnalyzerBasis::R: return AnalyzerBasis::L;
    default: throw ConfigError("correlation needs a + eigenstate (H, D or R)");
  }
}

}  // namespace

void DetectorModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw ConfigError("detector " + name + ": efficiency must lie in [0, 1]");
  if (!(dark_probability >= 0.0 && dark_probability < 1.0))
    throw ConfigError("detector " + name + ": dark probability must lie in [0, 1)");
}

double DetectorModel::no_click_probability(int photons) const {
  return std::pow(1.0 - efficiency, photons) * (1.0 - dark_probability);
}

double DetectorModel::click_probability(int photons) const {
  return 1.0 - no_click_probability(photons);
}

double click_probability(const FockStateVector& state, std::span<const DetectorAssignment> detectors,
                         std::span<const bool> pattern) {
  if (pattern.size() != detectors.size())
    throw ConfigError("click pattern length does not match the detector list");
  check_disjoint(detectors);
  double p = 0.0;
  for (const auto& [occ, amp] : state.terms()) p += std::norm(amp) * pattern_weight(occ, detectors, pattern);
  return p;
}

std::map<int, double> all_click_probability_by(
    const FockStateVector& state, std::span<const DetectorAssignment> detectors,
    const std::function<int(const Occupation&)>& key) {
  check_disjoint(detectors);
  std::map<int, double> out;
  for (const auto& [occ, amp] : state.terms()) {
    double w = std::norm(amp);
    for (const auto& d : detectors) {
      int n = 0;
      for (auto m : d.modes) n += occ[m];
      w *= d.model.click_probability(n);
    }
    out[key ? key(occ) : 0] += w;
  }
  return out;
}

double correlation(const SettingTable& t, AnalyzerBasis a, AnalyzerBasis b) {
  const AnalyzerBasis am = partner(a), bm = partner(b);
  const double pp = at(t, a, b), pm = at(t, a, bm), mp = at(t, am, b), mm = at(t, am, bm);
  const double n = pp + pm + mp + mm;
  if (!(n > 0.0)) throw UndefinedError("no coincidences in this basis pair");
  return (pp - pm - mp + mm) / n;
}

PolarizationDensityMatrix linear_inversion(const SettingTable& t) {
  const auto sigma = paulis();
  double s[4][4] = {};
  s[0][0] = 1.0;
  for (int i = 1; i < 4; ++i) {
    for (int j = 1; j < 4; ++j) {
      const auto [ap, am] = eigenstates(i);
      const auto [bp, bm] = eigenstates(j);
      const double pp = at(t, ap, bp), pm = at(t, ap, bm), mp = at(t, am, bp), mm = at(t, am, bm);
      const double n = pp + pm + mp + mm;
      if (!(n > 0.0)) throw UndefinedError("no coincidences in a tomography basis pair");
      s[i][j] = (pp - pm - mp + mm) / n;
      s[i][0] += (pp + pm - mp - mm) / n / 3.0;
      s[0][j] += (pp - pm + mp - mm) / n / 3.0;
    }
  }
  PolarizationDensityMatrix dm;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) dm.rho += 0.25 * s[i][j] * kron(sigma[i], sigma[j]);
  return dm;
}

namespace {

std::vector<FockStateVector> herald_branches(const FockStateVector& state,
                                             const AnalysisSetup& setup) {
  const auto& reg = state.registry();
  std::vector<FockStateVector> out;
  if (!setup.herald_label) {
    out.push_back(state);
    return out;
  }
  out.push_back(apply_transform(
      state, polarizer_projection(reg, *setup.herald_label, setup.herald_polarization)));
  if (setup.include_orthogonal_herald) {
    FockStateVector flipped = apply_transform(
        state, polarizer_projection(reg, *setup.herald_label, orthogonal(setup.herald_polarization)));
    out.push_back(apply_transform(flipped, phase_shifter(reg, setup.first_label, 0.0, std::numbers::pi)));
  }
  return out;
}

std::vector<DetectorAssignment> detectors_for(const ModeRegistry& reg, const AnalysisSetup& setup,
                                              bool analyzed) {
  std::vector<DetectorAssignment> dets;
  dets.push_back({setup.first_detector, detected_modes(reg, setup.first_label, analyzed)});
  if (setup.herald_label)
    dets.push_back({setup.herald_detector, detected_modes(reg, *setup.herald_label, true)});
  dets.push_back({setup.second_detector, detected_modes(reg, setup.second_label, analyzed)});
  return dets;
}

double all_click(const FockStateVector& state, std::span<const DetectorAssignment> dets) {
  double p = 0.0;
  for (const auto& [k, v] : all_click_probability_by(state, dets, {})) p += v;
  return p;
}

}  // namespace

ConditionedResult conditioned_polarization_dm(const FockStateVector& state,
                                              const AnalysisSetup& setup,
                                              const std::function<int(const Occupation&)>& sector_key,
                                              std::map<int, double>* by_sector) {
  const auto& reg = state.registry();
  const auto analyzed = detectors_for(reg, setup, true);
  const auto open = detectors_for(reg, setup, false);

  ConditionedResult result;
  for (const auto& branch : herald_branches(state, setup)) {
    for (const auto& [k, v] : all_click_probability_by(branch, open, sector_key)) {
      result.success_probability += v;
      if (by_sector) (*by_sector)[k] += v;
    }
    for (auto a : kAnalyzerBases) {
      const FockStateVector first = apply_transform(
          branch, polarizer_projection(reg, setup.first_label, polarization_state(a)));
      for (auto b : kAnalyzerBases) {
        const FockStateVector both = apply_transform(
            first, polarizer_projection(reg, setup.second_label, polarization_state(b)));
        at(result.coincidences, a, b) += all_click(both, analyzed);
      }
    }
  }
  result.empty = true;
  for (const auto& row : result.coincidences)
    for (double c : row) result.empty = result.empty && !(c > 0.0);
  if (!result.empty) {
    try {
      result.dm = linear_inversion(result.coincidences);
    } catch (const UndefinedError&) {
      result.empty = true;
    }
  }
  return result;
}

double coincidence_probability(const FockStateVector& state, const AnalysisSetup& setup,
                               const JonesVector& first_pol, const JonesVector& second_pol) {
  const auto& reg = state.registry();
  const auto analyzed = detectors_for(reg, setup, true);
  double p = 0.0;
  for (const auto& branch : herald_branches(state, setup)) {
    const FockStateVector first =
        apply_transform(branch, polarizer_projection(reg, setup.first_label, first_pol));
    const FockStateVector both =
        apply_transform(first, polarizer_projection(reg, setup.second_label, second_pol));
    p += all_click(both, analyzed);
  }
  return p;
}

std::array<double, 8> click_pattern_distribution(const FockStateVector& state,
                                                 const AnalysisSetup& setup) {
  if (!setup.herald_label) throw ConfigError("click patterns need a herald detector");
  if (setup.include_orthogonal_herald)
    throw ConfigError("click patterns are defined for a single herald outcome");
  const auto branches = herald_branches(state, setup);
  const auto open = detectors_for(state.registry(), setup, false);
  std::array<double, 8> out{};
  for (int code = 0; code < 8; ++code) {
    const bool pattern[3] = {bool(code & 4), bool(code & 2), bool(code & 1)};
    out[static_cast<std::size_t>(code)] = click_probability(branches.front(), open, pattern);
  }
  return out;
}

}  // namespace dfsim
