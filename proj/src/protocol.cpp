#include "dfsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dfsim/errors.hpp"
#include "dfsim/sources.hpp"

namespace dfsim {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

RegistryPtr registry_for(Variant v) {
  std::vector<LabelSpec> labels;
  switch (v) {
    case Variant::CounterPropagating:
    case Variant::SinglePhotonAncilla:
      labels = {{"A", true},  {"B"},        {"lossB"},    {"gpB"}, {"L"},
                {"R", true},  {"gpL"},      {"lossR", true}, {"E", true},
                {"F", true},  {"G"}};
      break;
    case Variant::ForwardAllFromBob:
      labels = {{"A", true}, {"lossA", true}, {"R", true}, {"lossR", true},
                {"E", true}, {"F", true},     {"G"}};
      break;
    case Variant::DirectNoDfs:
      labels = {{"E"}, {"B"}, {"lossB"}, {"gpB"}, {"L"}, {"gpL"}, {"Rgp"}, {"G"}};
      break;
  }
  return make_registry_ptr(labels);
}

// Counts photons in the modes that descend from photon B.
std::function<int(const Occupation&)> sector_counter(const ModeRegistry& reg,
                                                     std::vector<std::string> b_labels) {
  std::vector<std::size_t> modes;
  for (const auto& l : b_labels)
    for (auto m : reg.modes_of(l)) modes.push_back(m);
  return [modes](const Occupation& occ) {
    int pairs = 0;
    for (auto m : modes) pairs += occ[m];
    const int ancilla = total_photons(occ) - 2 * pairs;
    return sector_key(pairs, ancilla);
  };
}

void note_tail(std::vector<std::string>& warnings, const char* what, double w) {
  if (w > kSourceTailTolerance) {
    std::ostringstream os;
    os << what << " truncation weight " << w << " exceeds " << kSourceTailTolerance;
    warnings.push_back(os.str());
  }
}

FockStateVector make_source(const ExperimentConfig& cfg, RegistryPtr reg, std::string_view a,
                            std::string_view b, std::vector<std::string>& warnings) {
  if (cfg.source == SourceKind::Pair)
    return encoded_pair_state(cfg.alpha, cfg.beta, reg, a, b, cfg.cutoff);
  FockStateVector s = spdc_state({cfg.spdc_amplitude_squared(), cfg.pair_cutoff}, reg, a, b, cfg.cutoff);
  note_tail(warnings, "pair source", s.truncated_weight());
  return s;
}

AnalysisSetup analysis_setup(const ExperimentConfig& cfg, bool heralded) {
  AnalysisSetup setup;
  setup.first_label = "E";
  setup.second_label = "G";
  if (heralded) {
    setup.herald_label = "F";
  } else {
    setup.herald_label.reset();
  }
  setup.herald_polarization = polarization_state(AnalyzerBasis::D);
  setup.include_orthogonal_herald = cfg.include_dbar_branch;
  setup.first_detector = {"D_E", cfg.eta, cfg.dark_e};
  setup.herald_detector = {"D_F", cfg.eta, cfg.dark_f};
  setup.second_detector = {"D_G", cfg.eta_g, cfg.dark_g};
  return setup;
}

// Alice's decoding unit: flip R, apply the temporal mismatch, mix at the PBS.
FockStateVector parity_check(const FockStateVector& s, const ExperimentConfig& cfg) {
  const auto& reg = s.registry();
  FockStateVector out = apply_transform(s, hwp(reg, "R", kPi / 4));
  out = apply_transform(out, overlap_split(reg, "R", cfg.overlap()));
  return apply_transform(out, pbs(reg, "A", "R", "E", "F"));
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::CounterPropagating: return "counter_propagating";
    case Variant::ForwardAllFromBob: return "forward_all_from_bob";
    case Variant::SinglePhotonAncilla: return "single_photon_ancilla";
    case Variant::DirectNoDfs: return "direct_no_dfs";
  }
  return "?";
}

std::string to_string(SourceKind s) { return s == SourceKind::Spdc ? "spdc" : "pair"; }

Variant parse_variant(const std::string& s) {
  for (auto v : {Variant::CounterPropagating, Variant::ForwardAllFromBob,
                 Variant::SinglePhotonAncilla, Variant::DirectNoDfs})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown variant '" + s + "'");
}

SourceKind parse_source(const std::string& s) {
  if (s == "spdc") return SourceKind::Spdc;
  if (s == "pair") return SourceKind::Pair;
  throw ConfigError("unknown source '" + s + "'");
}

std::vector<double> ExperimentConfig::default_phases() {
  std::vector<double> p;
  for (int n = 0; n < 8; ++n) p.push_back(n * kPi / 4);
  return p;
}

void ExperimentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(mu >= 0.0 && std::isfinite(mu))) throw ConfigError("mu must be a finite nonnegative number");
  require_unit(transmittance, "transmittance");
  require_unit(eta, "eta");
  require_unit(eta_g, "eta_G");
  for (double d : {dark_e, dark_f, dark_g})
    if (!(d >= 0.0 && d < 1.0)) throw ConfigError("dark count probabilities must lie in [0, 1)");
  require_unit(s0, "s0");
  if (!(sigma_um > 0.0)) throw ConfigError("sigma must be positive");
  if (!std::isfinite(delay_um)) throw ConfigError("delay must be finite");
  require_unit(gp_reflectance, "glass plate reflectance");
  if (phases.empty()) throw ConfigError("phase set must not be empty");
  for (double p : phases)
    if (!std::isfinite(p)) throw ConfigError("phases must be finite");
  if (!std::isfinite(phase_delta)) throw ConfigError("phase delta must be finite");
  if (cutoff < 2 || cutoff > 8) throw ConfigError("cutoff must lie in [2, 8]");
  if (pair_cutoff < 1) throw ConfigError("pair cutoff must be at least 1");
  if (source == SourceKind::Pair) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > 1e-9) throw ConfigError("|alpha|^2 + |beta|^2 must equal 1");
  }
  if (!(rep_rate_hz > 0.0)) throw ConfigError("repetition rate must be positive");
  if (variant == Variant::CounterPropagating && mu > 0.0 && !(gp_reflectance > 0.0))
    throw ConfigError("a coherent ancilla needs a nonzero glass plate reflectance");
}

ExperimentConfig ExperimentConfig::ideal() {
  ExperimentConfig c;
  c.gamma = 0.0;
  c.mu = 0.0;
  c.transmittance = 1.0;
  c.eta = c.eta_g = 1.0;
  c.dark_e = c.dark_f = c.dark_g = 0.0;
  c.s0 = 1.0;
  c.variant = Variant::SinglePhotonAncilla;
  c.source = SourceKind::Pair;
  return c;
}

double ExperimentConfig::overlap() const {
  return overlap_at_delay({s0, sigma_um}, delay_um);
}

double ExperimentConfig::mean_photons_at_bob() const {
  return transmittance > 0.0 ? mu / transmittance : 0.0;
}

PreparedState prepare_state(const ExperimentConfig& cfg, double phi_h, double phi_v) {
  cfg.validate();
  const RegistryPtr reg = registry_for(cfg.variant);
  PreparedState out{FockStateVector(reg, cfg.cutoff), {}, {}, {}};
  auto& warnings = out.warnings;
  const double t = cfg.transmittance;
  const double phi_v_r = phi_v + cfg.phase_delta;

  switch (cfg.variant) {
    case Variant::CounterPropagating:
    case Variant::SinglePhotonAncilla: {
      // Photon B: Alice -> channel -> glass plate -> D_G.
      FockStateVector s = make_source(cfg, reg, "A", "B", warnings);
      s = apply_transform(s, phase_shifter(*reg, "B", phi_h, phi_v));
      s = apply_transform(s, loss_channel(*reg, "B", t, "lossB"));
      const GlassPlatePorts ports{"B", "L", "G", "R", "gpB", "gpL"};
      s = apply_transform(s, glass_plate(*reg, ports, cfg.gp_reflectance));

      if (cfg.variant == Variant::CounterPropagating) {
        // Bob's laser, set so that mu photons reach Alice; it stays a
        // coherent amplitude until it meets the quantum state.
        // A closed channel (T = 0) passes nothing, whatever Bob sends.
        const double at_laser = cfg.mu > 0.0 && t > 0.0 ? cfg.mu / (t * cfg.gp_reflectance) : 0.0;
        CoherentField field = coherent_field({at_laser, polarization_state(AnalyzerBasis::D)}, reg, "L");
        field = apply_transform(field, glass_plate(*reg, ports, cfg.gp_reflectance));
        field = apply_transform(field, phase_shifter(*reg, "R", phi_h, phi_v_r));
        field = apply_transform(field, loss_channel(*reg, "R", t, "lossR"));
        const auto r_modes = reg->modes_of("R");
        FockStateVector pulse = materialize(field, r_modes, cfg.cutoff);
        note_tail(warnings, "ancilla pulse", pulse.truncated_weight());
        s = tensor(s, pulse);
      } else {
        s = tensor(s, single_photon_state(polarization_state(AnalyzerBasis::D), reg, "R", cfg.cutoff));
        s = apply_transform(s, phase_shifter(*reg, "R", phi_h, phi_v_r));
        s = apply_transform(s, loss_channel(*reg, "R", t, "lossR"));
      }
      out.state = parity_check(s, cfg);
      out.setup = analysis_setup(cfg, true);
      out.sector = sector_counter(*reg, {"G", "lossB", "gpB"});
      break;
    }
    case Variant::ForwardAllFromBob: {
      // Bob keeps B (detected directly as G); A and R travel to Alice.
      FockStateVector s = make_source(cfg, reg, "A", "G", warnings);
      s = apply_transform(s, phase_shifter(*reg, "A", phi_h, phi_v));
      s = apply_transform(s, loss_channel(*reg, "A", t, "lossA"));
      CoherentField field(reg);
      if (cfg.mu > 0.0 && t > 0.0)
        field = coherent_field({cfg.mu / t, polarization_state(AnalyzerBasis::D)}, reg, "R");
      field = apply_transform(field, phase_shifter(*reg, "R", phi_h, phi_v_r));
      field = apply_transform(field, loss_channel(*reg, "R", t, "lossR"));
      const auto r_modes = reg->modes_of("R");
      FockStateVector pulse = materialize(field, r_modes, cfg.cutoff);
      note_tail(warnings, "ancilla pulse", pulse.truncated_weight());
      s = tensor(s, pulse);
      out.state = parity_check(s, cfg);
      out.setup = analysis_setup(cfg, true);
      out.sector = sector_counter(*reg, {"G"});
      break;
    }
    case Variant::DirectNoDfs: {
      // Photon A is analyzed directly as E; only B crosses the channel.
      FockStateVector s = make_source(cfg, reg, "E", "B", warnings);
      s = apply_transform(s, phase_shifter(*reg, "B", phi_h, phi_v));
      s = apply_transform(s, loss_channel(*reg, "B", t, "lossB"));
      const GlassPlatePorts ports{"B", "L", "G", "Rgp", "gpB", "gpL"};
      s = apply_transform(s, glass_plate(*reg, ports, cfg.gp_reflectance));
      out.state = std::move(s);
      out.setup = analysis_setup(cfg, false);
      out.sector = sector_counter(*reg, {"G", "lossB", "gpB"});
      break;
    }
  }
  return out;
}

double ProtocolOutcome::component(int pairs, int ancilla) const {
  auto it = components.find(sector_key(pairs, ancilla));
  return it == components.end() ? 0.0 : it->second;
}

double ProtocolOutcome::component_at_least(int pairs, int min_ancilla) const {
  double p = 0.0;
  for (const auto& [key, v] : components)
    if (sector_pairs(key) == pairs && sector_ancilla(key) >= min_ancilla) p += v;
  return p;
}

ProtocolOutcome run_fixed_phase(const ExperimentConfig& cfg, double phi_h, double phi_v) {
  PreparedState prepared = prepare_state(cfg, phi_h, phi_v);
  ProtocolOutcome out;
  const ConditionedResult r = conditioned_polarization_dm(prepared.state, prepared.setup,
                                                          prepared.sector, &out.components);
  out.coincidences = r.coincidences;
  out.success_probability = r.success_probability;
  out.dm = r.dm;
  out.empty = r.empty;
  out.truncated_weight = prepared.state.truncated_weight();
  out.warnings = std::move(prepared.warnings);
  return out;
}

ProtocolOutcome run_phase_averaged(const ExperimentConfig& cfg) {
  cfg.validate();
  ProtocolOutcome avg;
  const double w = 1.0 / static_cast<double>(cfg.phases.size());
  for (double phase : cfg.phases) {
    const ProtocolOutcome o = run_fixed_phase(cfg, 0.0, phase);
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) avg.coincidences[a][b] += w * o.coincidences[a][b];
    avg.success_probability += w * o.success_probability;
    for (const auto& [k, v] : o.components) avg.components[k] += w * v;
    avg.truncated_weight = std::max(avg.truncated_weight, o.truncated_weight);
    for (const auto& msg : o.warnings)
      if (std::find(avg.warnings.begin(), avg.warnings.end(), msg) == avg.warnings.end())
        avg.warnings.push_back(msg);
  }
  avg.empty = true;
  for (const auto& row : avg.coincidences)
    for (double c : row) avg.empty = avg.empty && !(c > 0.0);
  if (!avg.empty) {
    try {
      avg.dm = linear_inversion(avg.coincidences);
    } catch (const UndefinedError&) {
      avg.empty = true;
    }
  }
  return avg;
}

Visibilities visibilities(const ProtocolOutcome& outcome) {
  if (outcome.empty) throw UndefinedError("no coincidences: visibilities are undefined");
  const auto& rho = outcome.dm.rho;
  Visibilities v;
  v.vz = (rho(0, 0) + rho(3, 3) - rho(1, 1) - rho(2, 2)).real();
  // Tr(rho X (x) X): X (x) X swaps HH <-> VV and HV <-> VH.
  v.vx = (rho(0, 3) + rho(3, 0) + rho(1, 2) + rho(2, 1)).real();
  return v;
}

double f_low(double vz, double vx) { return 0.5 * (vz + vx); }

bool chsh_violation(double f_low_value) { return f_low_value > 1.0 / std::sqrt(2.0); }

SharingRate sharing_rate(const ExperimentConfig& cfg) {
  const ProtocolOutcome o = run_phase_averaged(cfg);
  return {o.success_probability, o.success_probability * cfg.rep_rate_hz};
}

double distribute_qubit(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.source = SourceKind::Pair;
  c.validate();
  const ProtocolOutcome o = run_phase_averaged(c);
  if (o.empty) throw UndefinedError("no coincidences: output fidelity is undefined");
  Eigen::Vector4cd target = Eigen::Vector4cd::Zero();
  target(0) = c.alpha;
  target(3) = c.beta;
  return fidelity(o.dm, target.normalized());
}

}  // namespace dfsim
