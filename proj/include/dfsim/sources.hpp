#pragma once

// Photon sources: the down-conversion pair source with multi-pair terms, the
// coherent ancilla pulse, and ideal single-photon / encoded-pair states used
// for limiting cases.

#include <complex>
#include <string_view>

#include "dfsim/fock.hpp"
#include "dfsim/optics.hpp"

namespace dfsim {

/// Tail weight above which a source truncation is reported.
inline constexpr double kSourceTailTolerance = 1e-6;

struct SpdcParams {
  /// Squared amplitude in exp[sqrt(gamma) (a_H^dag b_H^dag + a_V^dag b_V^dag)];
  /// the one-pair probability is about 2 gamma.
  double gamma = 3.0e-3;
  int pair_cutoff = 2;
};

struct CoherentParams {
  double mean_photons = 0.1;
  JonesVector polarization = polarization_state(AnalyzerBasis::D);
};

/// Normalized truncation of the pair-source exponential on labels `a`, `b`,
/// keeping at most pair_cutoff pairs (and no more than the state cutoff
/// allows). truncated_weight() holds the weight missing relative to the
/// untruncated exponential.
FockStateVector spdc_state(const SpdcParams& p, RegistryPtr reg, std::string_view a,
                           std::string_view b, int cutoff);

/// Probability of k pairs in the untruncated, normalized source.
double spdc_pair_probability(double gamma, int k);

/// alpha |HH> + beta |VV> on (a, b), normalized; one pair exactly.
FockStateVector encoded_pair_state(std::complex<double> alpha, std::complex<double> beta,
                                   RegistryPtr reg, std::string_view a, std::string_view b,
                                   int cutoff);

/// One photon in polarization `pol` on the matched modes of `label`.
FockStateVector single_photon_state(const JonesVector& pol, RegistryPtr reg, std::string_view label,
                                    int cutoff);

/// Coherent amplitude sqrt(mean) * polarization on the matched modes of `label`.
CoherentField coherent_field(const CoherentParams& p, RegistryPtr reg, std::string_view label);

/// Fock expansion of a coherent pulse truncated at `cutoff`; the Poisson tail
/// is reported through truncated_weight().
FockStateVector coherent_state(const CoherentParams& p, RegistryPtr reg, std::string_view label,
                               int cutoff);

}  // namespace dfsim
