#pragma once

// The distribution protocol: Alice's pair source, the shared lossy phase-noise
// channel, Bob's ancilla pulse, Alice's parity check and herald projection,
// and the analyzed coincidences between Alice's and Bob's detectors.

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dfsim/detection.hpp"
#include "dfsim/fock.hpp"
#include "dfsim/optics.hpp"

namespace dfsim {

enum class Variant {
  CounterPropagating,   // B to Bob, coherent R to Alice through the same channel
  ForwardAllFromBob,    // Bob keeps B and sends A and coherent R to Alice
  SinglePhotonAncilla,  // counter-propagating with a single-photon R
  DirectNoDfs,          // B alone through the channel, no ancilla, no parity check
};

enum class SourceKind {
  Spdc,  // down-conversion with multi-pair terms
  Pair,  // exactly one pair alpha |HH> + beta |VV>
};

std::string to_string(Variant v);
std::string to_string(SourceKind s);
Variant parse_variant(const std::string& s);
SourceKind parse_source(const std::string& s);

struct ExperimentConfig {
  /// Pair generation probability per pulse; the source amplitude squared is
  /// half of it (see spdc_amplitude_squared).
  double gamma = 3.0e-3;
  /// Mean photon number of the ancilla pulse on arrival at Alice.
  double mu = 1.4e-2 / 0.13;
  double transmittance = 0.1;
  double eta = 0.13;    // D_E and D_F
  double eta_g = 0.09;  // D_G
  double dark_e = 0.0;
  double dark_f = 0.0;
  double dark_g = 1.5e-6;
  double s0 = 1.0;          // zero-delay amplitude overlap of A and R
  double sigma_um = 100.0;  // Gaussian width of the overlap vs delay
  double delay_um = 0.0;
  double gp_reflectance = 0.05;
  /// Channel phase phi_V - phi_H values visited by the noise; phi_H = 0.
  std::vector<double> phases = default_phases();
  /// Extra V phase seen by R relative to B.
  double phase_delta = 0.0;
  int cutoff = kDefaultCutoff;
  int pair_cutoff = 2;
  Variant variant = Variant::CounterPropagating;
  SourceKind source = SourceKind::Spdc;
  std::complex<double> alpha = 1.0 / std::sqrt(2.0);
  std::complex<double> beta = 1.0 / std::sqrt(2.0);
  bool include_dbar_branch = false;
  double rep_rate_hz = 82e6;

  static std::vector<double> default_phases();
  /// Throws ConfigError on any out-of-range parameter.
  void validate() const;
  /// Unit efficiencies, no dark counts, perfect overlap, exact single pair
  /// and single-photon ancilla.
  static ExperimentConfig ideal();
  double overlap() const;
  double spdc_amplitude_squared() const { return 0.5 * gamma; }
  double mean_photons_at_bob() const;
};

/// Packs a (pairs, ancilla photons) sector into an integer key.
constexpr int sector_key(int pairs, int ancilla) { return pairs * 16 + ancilla; }
constexpr int sector_pairs(int key) { return key / 16; }
constexpr int sector_ancilla(int key) { return key % 16; }

struct PreparedState {
  FockStateVector state;
  AnalysisSetup setup;
  std::function<int(const Occupation&)> sector;
  std::vector<std::string> warnings;
};

/// The full optical state just before Alice's and Bob's analyzers, for one
/// channel phase setting.
PreparedState prepare_state(const ExperimentConfig& cfg, double phi_h, double phi_v);

struct ProtocolOutcome {
  SettingTable coincidences{};
  /// Triple (or, without ancilla, two-fold) coincidence per pulse.
  double success_probability = 0.0;
  PolarizationDensityMatrix dm;
  bool empty = true;
  /// success_probability split by (pairs, ancilla photons) sector key.
  std::map<int, double> components;
  double truncated_weight = 0.0;
  std::vector<std::string> warnings;

  double component(int pairs, int ancilla) const;
  /// Sum over all sectors with the given pair number and at least
  /// `min_ancilla` ancilla photons.
  double component_at_least(int pairs, int min_ancilla) const;
};

ProtocolOutcome run_fixed_phase(const ExperimentConfig& cfg, double phi_h, double phi_v);
/// Uniform mixture over cfg.phases, accumulated in order.
ProtocolOutcome run_phase_averaged(const ExperimentConfig& cfg);

struct Visibilities {
  double vz = 0.0;
  double vx = 0.0;
};

/// V_Z and V_X of the conditional matrix. Throws UndefinedError when empty.
Visibilities visibilities(const ProtocolOutcome& outcome);
double f_low(double vz, double vx);
bool chsh_violation(double f_low_value);

struct SharingRate {
  double per_pulse = 0.0;
  double per_second = 0.0;
};
SharingRate sharing_rate(const ExperimentConfig& cfg);

/// Fidelity of the phase-averaged output to alpha |HH> + beta |VV>.
double distribute_qubit(const ExperimentConfig& cfg);

}  // namespace dfsim
