#pragma once

// Sweeps, calibration, fits, delay scans and event sampling built on top of
// the protocol engine.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dfsim/protocol.hpp"

namespace dfsim {

inline constexpr const char* kCsvSchemaVersion = "1";
inline constexpr const char* kCodeVersion = "0.1.0";

struct CalibrationResult {
  double s0 = 1.0;
  double vx = 0.0;        // V_X reached at the anchor
  double v_sp = 1.0;      // implied mode-matching visibility, s0^2
  double max_vx = 0.0;    // V_X at s0 = 1
  int iterations = 0;
};

/// Bisection on s0 so that V_X at transmittance `anchor_t` equals `target_vx`
/// to within `tol`. Throws ValidationError when the target exceeds the V_X
/// reachable at s0 = 1.
CalibrationResult calibrate_overlap(const ExperimentConfig& cfg, double anchor_t,
                                    double target_vx, double tol = 1e-5);

struct ResultsRow {
  double t = 0.0;
  double vz = 0.0;
  double vx = 0.0;
  double f_low = 0.0;
  double rate_per_pulse = 0.0;
  double rate_per_second = 0.0;
  bool chsh = false;
  double truncated_weight = 0.0;
};

struct ResultsTable {
  ExperimentConfig config;
  std::vector<ResultsRow> rows;  // T descending
  std::vector<std::string> warnings;
};

/// One phase-averaged run per transmittance, evaluated in parallel and
/// ordered by T descending.
ResultsTable sweep_transmittance(const ExperimentConfig& cfg, std::vector<double> ts,
                                 unsigned threads = 0);

void write_csv(std::ostream& os, const ResultsTable& table);
std::string to_json(const ResultsTable& table);

/// Formats a double the way every CSV writer here does.
std::string csv_number(double x);

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;  // of log(y)
};

/// Least-squares fit of log(y) against log(x). Needs at least three points,
/// all positive.
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Transmittance where two curves sampled on a common grid cross, by
/// log-log interpolation. Throws ValidationError when they do not cross.
double crossing_point(const std::vector<double>& x, const std::vector<double>& y1,
                      const std::vector<double>& y2);

struct DelayPoint {
  double delay_um = 0.0;
  double p_r = 0.0;  // |R>_E |D>_F coincidence
  double p_l = 0.0;  // |L>_E |D>_F coincidence
  double visibility = 0.0;
};

/// Photon A heralded in |R> (Bob's photon found in |L>), mixed with the
/// ancilla at each delay.
std::vector<DelayPoint> delay_scan(const ExperimentConfig& cfg, const std::vector<double>& delays_um);
/// Visibility of one delay-scan point at amplitude overlap `s` (delay ignored).
double delay_visibility_at_overlap(const ExperimentConfig& cfg, double s);
/// Full width at half maximum of the visibility, located by bisection on
/// the model. Throws ValidationError when the visibility never halves.
double visibility_fwhm(const ExperimentConfig& cfg);
/// Sets sigma so that the visibility dip has the given FWHM.
double calibrate_sigma(const ExperimentConfig& cfg, double fwhm_um);

struct TomographyResult {
  PolarizationDensityMatrix dm;
  double fidelity = 0.0;
  double max_hh_vv_coherence = 0.0;
};

/// Direct transmission of B with and without the collective phase noise.
TomographyResult tomography_experiment(const ExperimentConfig& cfg, bool noise);

/// Phase-averaged probabilities of the eight D_E/D_F/D_G click patterns,
/// indexed (E << 2) | (F << 1) | G.
std::array<double, 8> event_distribution(const ExperimentConfig& cfg);

/// i.i.d. click patterns, one per pulse.
std::vector<std::uint8_t> sample_events(const ExperimentConfig& cfg, std::uint64_t n_pulses,
                                        std::uint64_t seed);
std::vector<std::uint8_t> sample_events(const std::array<double, 8>& distribution,
                                        std::uint64_t n_pulses, std::uint64_t seed);

struct ScalingReport {
  std::string component;
  std::string parameter;
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double target = 0.0;
};

/// Exponents of the leading error components over two decades of mu, T and
/// gamma (dark counts switched off): desired events, coherent two-photon
/// errors, double-pair errors and the forward variant's unwanted events.
std::vector<ScalingReport> component_scalings(const ExperimentConfig& cfg);

}  // namespace dfsim
