#include "dfsim/optics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dfsim/errors.hpp"

namespace dfsim {

namespace {

const Amplitude kI{0.0, 1.0};

void require_label(const ModeRegistry& reg, std::string_view label) {
  if (!reg.has_label(label)) throw ConfigError("unknown spatial label '" + std::string(label) + "'");
}

std::vector<Temporal> temporals_of(const ModeRegistry& reg, std::string_view label) {
  if (reg.is_split(label)) return {Temporal::Matched, Temporal::Orthogonal};
  return {Temporal::Matched};
}

void require_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

JonesVector polarization_state(AnalyzerBasis p) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (p) {
    case AnalyzerBasis::H: return {1.0, 0.0};
    case AnalyzerBasis::V: return {0.0, 1.0};
    case AnalyzerBasis::D: return {r, r};
    case AnalyzerBasis::A: return {r, -r};
    case AnalyzerBasis::R: return {r, kI * r};
    case AnalyzerBasis::L: return {r, -kI * r};
  }
  return {1.0, 0.0};
}

const char* analyzer_name(AnalyzerBasis p) {
  switch (p) {
    case AnalyzerBasis::H: return "H";
    case AnalyzerBasis::V: return "V";
    case AnalyzerBasis::D: return "D";
    case AnalyzerBasis::A: return "A";
    case AnalyzerBasis::R: return "R";
    case AnalyzerBasis::L: return "L";
  }
  return "?";
}

Jones rotation(double theta) {
  Jones r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Jones waveplate_jones(double angle, double retardance) {
  if (!std::isfinite(angle) || !std::isfinite(retardance))
    throw ConfigError("waveplate parameters must be finite");
  Jones d = Jones::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::exp(kI * retardance);
  return rotation(angle) * d * rotation(-angle);
}

ModeTransform beamsplitter(std::size_t mode_1, std::size_t mode_2, double theta) {
  Eigen::MatrixXcd m = rotation(theta);
  return ModeTransform({mode_1, mode_2}, {mode_1, mode_2}, m);
}

ModeTransform pbs(const ModeRegistry& reg, std::string_view in_1, std::string_view in_2,
                  std::string_view out_1, std::string_view out_2) {
  for (auto l : {in_1, in_2, out_1, out_2}) require_label(reg, l);
  if (in_1 == in_2 || out_1 == out_2) throw ConfigError("PBS ports must be distinct");
  std::vector<std::size_t> inputs, outputs;
  std::vector<std::pair<std::size_t, std::size_t>> routes;  // (input, output) mode pairs
  for (Temporal t : temporals_of(reg, in_1)) {
    routes.emplace_back(reg.index(in_1, Pol::H, t), reg.index(out_1, Pol::H, t));
    routes.emplace_back(reg.index(in_1, Pol::V, t), reg.index(out_2, Pol::V, t));
  }
  for (Temporal t : temporals_of(reg, in_2)) {
    routes.emplace_back(reg.index(in_2, Pol::H, t), reg.index(out_2, Pol::H, t));
    routes.emplace_back(reg.index(in_2, Pol::V, t), reg.index(out_1, Pol::V, t));
  }
  for (auto [i, o] : routes) {
    inputs.push_back(i);
    outputs.push_back(o);
  }
  const auto n = static_cast<Eigen::Index>(routes.size());
  return ModeTransform(inputs, outputs, Eigen::MatrixXcd::Identity(n, n));
}

ModeTransform jones_element(const ModeRegistry& reg, std::string_view spatial, const Jones& j) {
  require_label(reg, spatial);
  std::vector<std::size_t> modes;
  const auto temporals = temporals_of(reg, spatial);
  for (Temporal t : temporals) {
    modes.push_back(reg.index(spatial, Pol::H, t));
    modes.push_back(reg.index(spatial, Pol::V, t));
  }
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) m.block<2, 2>(k, k) = j;
  return ModeTransform(modes, modes, m);
}

ModeTransform waveplate(const ModeRegistry& reg, std::string_view spatial, double angle,
                        double retardance) {
  return jones_element(reg, spatial, waveplate_jones(angle, retardance));
}

ModeTransform phase_shifter(const ModeRegistry& reg, std::string_view spatial, double phi_h,
                            double phi_v) {
  Jones j = Jones::Zero();
  j(0, 0) = std::exp(kI * phi_h);
  j(1, 1) = std::exp(kI * phi_v);
  return jones_element(reg, spatial, j);
}

ModeTransform loss_channel(const ModeRegistry& reg, std::string_view spatial, double transmittance,
                           std::string_view loss_label) {
  require_probability(transmittance, "transmittance");
  require_label(reg, spatial);
  require_label(reg, loss_label);
  if (spatial == loss_label) throw ConfigError("loss modes must differ from the signal modes");
  std::vector<std::size_t> inputs, outputs;
  for (Temporal t : temporals_of(reg, spatial)) {
    for (Pol p : {Pol::H, Pol::V}) {
      inputs.push_back(reg.index(spatial, p, t));
    }
  }
  outputs = inputs;
  for (Temporal t : temporals_of(reg, spatial))
    for (Pol p : {Pol::H, Pol::V}) outputs.push_back(reg.index(loss_label, p, t));
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    m(k, k) = std::sqrt(transmittance);
    m(n + k, k) = std::sqrt(1.0 - transmittance);
  }
  return ModeTransform(inputs, outputs, m);
}

ModeTransform glass_plate(const ModeRegistry& reg, const GlassPlatePorts& ports,
                          double reflectance) {
  require_probability(reflectance, "glass plate reflectance");
  for (const auto& l : {ports.transmit_in, ports.reflect_in, ports.transmit_out, ports.reflect_out,
                        ports.transmit_discard, ports.reflect_discard})
    require_label(reg, l);
  std::vector<std::size_t> inputs, outputs;
  struct Route {
    std::size_t in, out_main, out_discard;
    double main_amp;
  };
  std::vector<Route> routes;
  const double t_amp = std::sqrt(1.0 - reflectance);
  const double r_amp = std::sqrt(reflectance);
  for (Temporal t : temporals_of(reg, ports.transmit_in))
    for (Pol p : {Pol::H, Pol::V})
      routes.push_back({reg.index(ports.transmit_in, p, t), reg.index(ports.transmit_out, p, t),
                        reg.index(ports.transmit_discard, p, t), t_amp});
  for (Temporal t : temporals_of(reg, ports.reflect_in))
    for (Pol p : {Pol::H, Pol::V})
      routes.push_back({reg.index(ports.reflect_in, p, t), reg.index(ports.reflect_out, p, t),
                        reg.index(ports.reflect_discard, p, t), r_amp});
  for (const auto& r : routes) inputs.push_back(r.in);
  for (const auto& r : routes) outputs.push_back(r.out_main);
  for (const auto& r : routes) outputs.push_back(r.out_discard);
  const auto n = static_cast<Eigen::Index>(routes.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = routes[static_cast<std::size_t>(k)].main_amp;
    m(k, k) = a;
    m(n + k, k) = std::sqrt(1.0 - a * a);
  }
  return ModeTransform(inputs, outputs, m);
}

ModeTransform polarizer_projection(const ModeRegistry& reg, std::string_view spatial,
                                   const JonesVector& p) {
  const double norm = p.norm();
  if (!(norm > 0.0)) throw ConfigError("projection polarization must be nonzero");
  const JonesVector u = p / norm;
  Jones j;
  j << std::conj(u(0)), std::conj(u(1)), -u(1), u(0);
  return jones_element(reg, spatial, j);
}

ModeTransform overlap_split(const ModeRegistry& reg, std::string_view spatial, double s) {
  require_probability(s, "mode overlap");
  require_label(reg, spatial);
  if (!reg.is_split(spatial))
    throw ConfigError("overlap split needs temporal twins on '" + std::string(spatial) + "'");
  const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
  std::vector<std::size_t> modes;
  for (Pol p : {Pol::H, Pol::V}) {
    modes.push_back(reg.index(spatial, p, Temporal::Matched));
    modes.push_back(reg.index(spatial, p, Temporal::Orthogonal));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  for (Eigen::Index k = 0; k < 4; k += 2) {
    m(k, k) = s;
    m(k + 1, k) = c;
    m(k, k + 1) = -c;
    m(k + 1, k + 1) = s;
  }
  return ModeTransform(modes, modes, m);
}

double overlap_at_delay(const OverlapModel& model, double delay_um) {
  if (!(model.sigma_um > 0.0)) throw ConfigError("overlap width sigma must be positive");
  return model.s0 * std::exp(-delay_um * delay_um / (2.0 * model.sigma_um * model.sigma_um));
}

}  // namespace dfsim
