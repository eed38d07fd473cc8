#pragma once

// Builders for the optical elements of the distribution setup. Every builder
// returns a ModeTransform over registry modes; elements that act on a spatial
// label act identically on its matched and orthogonal temporal components.

#include <complex>
#include <numbers>
#include <string_view>

#include <Eigen/Dense>

#include "dfsim/fock.hpp"

namespace dfsim {

using Jones = Eigen::Matrix2cd;
using JonesVector = Eigen::Vector2cd;

enum class AnalyzerBasis { H, V, D, A, R, L };

/// Unit Jones vector; A is the anti-diagonal state (H - V)/sqrt(2),
/// R = (H + iV)/sqrt(2) and L = (H - iV)/sqrt(2).
JonesVector polarization_state(AnalyzerBasis p);
const char* analyzer_name(AnalyzerBasis p);

/// Real rotation [[cos, -sin], [sin, cos]].
Jones rotation(double theta);
/// R(theta) diag(1, e^{i delta}) R(-theta).
Jones waveplate_jones(double angle, double retardance);

/// Two-mode beamsplitter with the rotation convention: a1 -> cos a1 + sin a2,
/// a2 -> -sin a1 + cos a2.
ModeTransform beamsplitter(std::size_t mode_1, std::size_t mode_2, double theta);

/// Polarizing beamsplitter. H of input 1 and V of input 2 exit output 1;
/// V of input 1 and H of input 2 exit output 2. Outputs may alias inputs.
ModeTransform pbs(const ModeRegistry& reg, std::string_view in_1, std::string_view in_2,
                  std::string_view out_1, std::string_view out_2);

/// Arbitrary Jones matrix acting on (H, V) of one spatial label.
ModeTransform jones_element(const ModeRegistry& reg, std::string_view spatial, const Jones& j);

ModeTransform waveplate(const ModeRegistry& reg, std::string_view spatial, double angle,
                        double retardance);
inline ModeTransform hwp(const ModeRegistry& reg, std::string_view spatial, double angle) {
  return waveplate(reg, spatial, angle, std::numbers::pi);
}
inline ModeTransform qwp(const ModeRegistry& reg, std::string_view spatial, double angle) {
  return waveplate(reg, spatial, angle, std::numbers::pi / 2);
}

/// Multiplies H amplitudes by e^{i phi_h} and V amplitudes by e^{i phi_v}.
ModeTransform phase_shifter(const ModeRegistry& reg, std::string_view spatial, double phi_h,
                            double phi_v);

/// Polarization-independent loss: the signal keeps amplitude sqrt(T) and the
/// rest goes to the (vacuum) modes of `loss_label`. Throws ConfigError for T
/// outside [0, 1].
ModeTransform loss_channel(const ModeRegistry& reg, std::string_view spatial, double transmittance,
                           std::string_view loss_label);

/// Labels for the four ports of the glass plate.
struct GlassPlatePorts {
  std::string transmit_in;   // photon coming back from the channel
  std::string reflect_in;    // Bob's laser pulse
  std::string transmit_out;  // towards Bob's detector
  std::string reflect_out;   // into the channel
  std::string transmit_discard;
  std::string reflect_discard;
};

/// Asymmetric splitter: transmit_in reaches transmit_out with amplitude
/// sqrt(1 - R), reflect_in reaches reflect_out with amplitude sqrt(R). The
/// complementary amplitudes go to the discard labels.
ModeTransform glass_plate(const ModeRegistry& reg, const GlassPlatePorts& ports, double reflectance);

/// Maps polarization `p` onto H (and its orthogonal complement onto V), so a
/// detector on the H modes realizes a polarizer projection onto `p`.
ModeTransform polarizer_projection(const ModeRegistry& reg, std::string_view spatial,
                                   const JonesVector& p);

/// Rotates each polarization of a split label into s (matched) +
/// sqrt(1 - s^2) (orthogonal). Throws ConfigError if the label has no twins.
ModeTransform overlap_split(const ModeRegistry& reg, std::string_view spatial, double s);

/// Gaussian temporal overlap between the interfering pulses.
struct OverlapModel {
  double s0 = 1.0;           // amplitude overlap at zero delay
  double sigma_um = 100.0;   // Gaussian width
};

/// s0 exp(-dx^2 / (2 sigma^2)). Throws ConfigError for sigma <= 0.
double overlap_at_delay(const OverlapModel& model, double delay_um);

}  // namespace dfsim
