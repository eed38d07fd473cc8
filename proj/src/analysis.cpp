#include "dfsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "dfsim/errors.hpp"
#include "json.hpp"

namespace dfsim {

namespace {

double vx_at(ExperimentConfig cfg, double t, double s0) {
  cfg.transmittance = t;
  cfg.s0 = s0;
  cfg.delay_um = 0.0;
  return visibilities(run_phase_averaged(cfg)).vx;
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["gamma"] = c.gamma;
  j["mu"] = c.mu;
  j["eta"] = c.eta;
  j["eta_G"] = c.eta_g;
  j["dark_E"] = c.dark_e;
  j["dark_F"] = c.dark_f;
  j["dark_G"] = c.dark_g;
  j["s0"] = c.s0;
  j["sigma_um"] = c.sigma_um;
  j["delay_um"] = c.delay_um;
  j["gp_reflectance"] = c.gp_reflectance;
  j["phases"] = c.phases;
  j["phase_delta"] = c.phase_delta;
  j["cutoff"] = c.cutoff;
  j["pair_cutoff"] = c.pair_cutoff;
  j["variant"] = to_string(c.variant);
  j["source"] = to_string(c.source);
  j["alpha"] = {c.alpha.real(), c.alpha.imag()};
  j["beta"] = {c.beta.real(), c.beta.imag()};
  j["include_dbar"] = c.include_dbar_branch;
  j["rep_rate_hz"] = c.rep_rate_hz;
  return j;
}

}  // namespace

CalibrationResult calibrate_overlap(const ExperimentConfig& cfg, double anchor_t,
                                    double target_vx, double tol) {
  if (!(anchor_t > 0.0 && anchor_t <= 1.0)) throw ConfigError("anchor T must lie in (0, 1]");
  CalibrationResult r;
  r.max_vx = vx_at(cfg, anchor_t, 1.0);
  if (target_vx > r.max_vx + tol)
    throw ValidationError("target V_X " + csv_number(target_vx) +
                          " exceeds the maximum attainable " + csv_number(r.max_vx));
  if (std::abs(target_vx - r.max_vx) <= tol) {
    r.s0 = 1.0;
    r.vx = r.max_vx;
    r.v_sp = 1.0;
    return r;
  }
  // V_X grows monotonically with the overlap.
  double lo = 0.0, hi = 1.0;
  double vx = r.max_vx;
  for (r.iterations = 0; r.iterations < 200; ++r.iterations) {
    const double mid = 0.5 * (lo + hi);
    vx = vx_at(cfg, anchor_t, mid);
    if (std::abs(vx - target_vx) < tol) {
      lo = hi = mid;
      break;
    }
    (vx < target_vx ? lo : hi) = mid;
    if (hi - lo < 1e-14) break;
  }
  r.s0 = 0.5 * (lo + hi);
  r.vx = vx;
  r.v_sp = r.s0 * r.s0;
  return r;
}

ResultsTable sweep_transmittance(const ExperimentConfig& cfg, std::vector<double> ts,
                                 unsigned threads) {
  if (ts.empty()) throw ConfigError("sweep needs at least one transmittance");
  for (double t : ts)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("sweep transmittances must lie in (0, 1]");
  cfg.validate();
  std::sort(ts.begin(), ts.end(), std::greater<>());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  auto one = [&cfg](double t) {
    ExperimentConfig c = cfg;
    c.transmittance = t;
    return run_phase_averaged(c);
  };
  std::vector<ProtocolOutcome> outcomes(ts.size());
  for (std::size_t start = 0; start < ts.size(); start += threads) {
    const std::size_t end = std::min(ts.size(), start + threads);
    std::vector<std::future<ProtocolOutcome>> jobs;
    for (std::size_t i = start; i < end; ++i)
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, one, ts[i]));
    for (std::size_t i = start; i < end; ++i) outcomes[i] = jobs[i - start].get();
  }

  ResultsTable table;
  table.config = cfg;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& o = outcomes[i];
    const Visibilities v = visibilities(o);
    ResultsRow row;
    row.t = ts[i];
    row.vz = v.vz;
    row.vx = v.vx;
    row.f_low = f_low(v.vz, v.vx);
    row.rate_per_pulse = o.success_probability;
    row.rate_per_second = o.success_probability * cfg.rep_rate_hz;
    row.chsh = chsh_violation(row.f_low);
    row.truncated_weight = o.truncated_weight;
    table.rows.push_back(row);
    for (const auto& w : o.warnings)
      if (std::find(table.warnings.begin(), table.warnings.end(), w) == table.warnings.end())
        table.warnings.push_back(w);
  }
  return table;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

void write_csv(std::ostream& os, const ResultsTable& table) {
  os << "# dfsim sweep schema " << kCsvSchemaVersion << "\n";
  os << "T,V_Z,V_X,F_low,rate_per_pulse,rate_per_second,chsh_flag,truncated_weight\n";
  for (const auto& r : table.rows) {
    os << csv_number(r.t) << ',' << csv_number(r.vz) << ',' << csv_number(r.vx) << ','
       << csv_number(r.f_low) << ',' << csv_number(r.rate_per_pulse) << ','
       << csv_number(r.rate_per_second) << ',' << (r.chsh ? 1 : 0) << ','
       << csv_number(r.truncated_weight) << "\n";
  }
}

std::string to_json(const ResultsTable& table) {
  nlohmann::json j;
  j["schema"] = kCsvSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["config"] = config_json(table.config);
  j["warnings"] = table.warnings;
  auto rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"T", r.t},
                    {"V_Z", r.vz},
                    {"V_X", r.vx},
                    {"F_low", r.f_low},
                    {"rate_per_pulse", r.rate_per_pulse},
                    {"rate_per_second", r.rate_per_second},
                    {"chsh_flag", r.chsh},
                    {"truncated_weight", r.truncated_weight}});
  j["rows"] = rows;
  return j.dump(2);
}

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("slope fit needs equally many x and y values");
  if (x.size() < 3) throw ConfigError("slope fit needs at least three points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("slope fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("slope fit needs distinct x values");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.stderr_slope = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  return f;
}

double crossing_point(const std::vector<double>& x, const std::vector<double>& y1,
                      const std::vector<double>& y2) {
  if (x.size() != y1.size() || x.size() != y2.size() || x.size() < 2)
    throw ConfigError("crossing needs two curves on a common grid");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double d0 = std::log(y1[i]) - std::log(y2[i]);
    const double d1 = std::log(y1[i + 1]) - std::log(y2[i + 1]);
    if (d0 == 0.0) return x[i];
    if ((d0 < 0.0) != (d1 < 0.0) || d1 == 0.0) {
      const double f = d0 / (d0 - d1);
      return std::exp(std::log(x[i]) + f * (std::log(x[i + 1]) - std::log(x[i])));
    }
  }
  throw ValidationError("the curves do not cross on the grid");
}

namespace {

DelayPoint delay_point(ExperimentConfig cfg, double s) {
  // Override the overlap model with a fixed amplitude overlap.
  cfg.s0 = s;
  cfg.delay_um = 0.0;
  cfg.validate();
  const auto r = polarization_state(AnalyzerBasis::R);
  const auto l = polarization_state(AnalyzerBasis::L);
  DelayPoint p;
  const double w = 1.0 / static_cast<double>(cfg.phases.size());
  for (double phase : cfg.phases) {
    const PreparedState prepared = prepare_state(cfg, 0.0, phase);
    p.p_r += w * coincidence_probability(prepared.state, prepared.setup, r, l);
    p.p_l += w * coincidence_probability(prepared.state, prepared.setup, l, l);
  }
  const double hi = std::max(p.p_r, p.p_l), lo = std::min(p.p_r, p.p_l);
  p.visibility = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
  return p;
}

}  // namespace

double delay_visibility_at_overlap(const ExperimentConfig& cfg, double s) {
  return delay_point(cfg, s).visibility;
}

std::vector<DelayPoint> delay_scan(const ExperimentConfig& cfg, const std::vector<double>& delays_um) {
  if (cfg.variant != Variant::CounterPropagating && cfg.variant != Variant::ForwardAllFromBob &&
      cfg.variant != Variant::SinglePhotonAncilla)
    throw ConfigError("delay scans need an ancilla");
  std::vector<DelayPoint> out;
  for (double d : delays_um) {
    ExperimentConfig c = cfg;
    c.delay_um = d;
    DelayPoint p = delay_point(cfg, c.overlap());
    p.delay_um = d;
    out.push_back(p);
  }
  return out;
}

namespace {

// Overlap at which the delay visibility is half its zero-delay value.
double half_visibility_overlap(const ExperimentConfig& cfg) {
  const double v0 = delay_visibility_at_overlap(cfg, cfg.s0);
  if (!(v0 > 0.0)) throw ValidationError("zero-delay visibility vanishes");
  if (delay_visibility_at_overlap(cfg, 0.0) >= 0.5 * v0)
    throw ValidationError("visibility never drops to half its zero-delay value");
  double lo = 0.0, hi = cfg.s0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (delay_visibility_at_overlap(cfg, mid) < 0.5 * v0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double visibility_fwhm(const ExperimentConfig& cfg) {
  // s(x) = s0 exp(-x^2 / (2 sigma^2)) is monotone in |x|.
  const double s_half = half_visibility_overlap(cfg);
  return 2.0 * cfg.sigma_um * std::sqrt(2.0 * std::log(cfg.s0 / s_half));
}

double calibrate_sigma(const ExperimentConfig& cfg, double fwhm_um) {
  if (!(fwhm_um > 0.0)) throw ConfigError("FWHM must be positive");
  const double s_half = half_visibility_overlap(cfg);
  return 0.5 * fwhm_um / std::sqrt(2.0 * std::log(cfg.s0 / s_half));
}

TomographyResult tomography_experiment(const ExperimentConfig& cfg, bool noise) {
  ExperimentConfig c = cfg;
  c.variant = Variant::DirectNoDfs;
  if (!noise) c.phases = {0.0};
  const ProtocolOutcome o = run_phase_averaged(c);
  if (o.empty) throw UndefinedError("no coincidences: tomography is undefined");
  TomographyResult r;
  r.dm = o.dm;
  r.fidelity = fidelity_to_phi_plus(o.dm);
  r.max_hh_vv_coherence = std::max(std::abs(o.dm.rho(0, 3)), std::abs(o.dm.rho(3, 0)));
  return r;
}

std::array<double, 8> event_distribution(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.variant == Variant::DirectNoDfs) throw ConfigError("event sampling needs the herald detector");
  ExperimentConfig c = cfg;
  c.include_dbar_branch = false;
  std::array<double, 8> avg{};
  const double w = 1.0 / static_cast<double>(c.phases.size());
  for (double phase : c.phases) {
    const PreparedState prepared = prepare_state(c, 0.0, phase);
    const auto d = click_pattern_distribution(prepared.state, prepared.setup);
    for (std::size_t i = 0; i < 8; ++i) avg[i] += w * d[i];
  }
  return avg;
}

std::vector<std::uint8_t> sample_events(const std::array<double, 8>& distribution,
                                        std::uint64_t n_pulses, std::uint64_t seed) {
  std::array<double, 8> cdf{};
  double acc = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (!(distribution[i] >= 0.0)) throw ValidationError("negative event probability");
    acc += distribution[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("event distribution is empty");
  std::mt19937_64 rng(seed);
  // 53-bit uniforms from the raw engine output keep streams portable.
  std::vector<std::uint8_t> out(n_pulses);
  for (auto& e : out) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    std::uint8_t k = 0;
    while (k < 7 && u >= cdf[k]) ++k;
    e = k;
  }
  return out;
}

std::vector<std::uint8_t> sample_events(const ExperimentConfig& cfg, std::uint64_t n_pulses,
                                        std::uint64_t seed) {
  return sample_events(event_distribution(cfg), n_pulses, seed);
}

namespace {

std::vector<double> decades(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return v;
}

ScalingReport fit_component(const ExperimentConfig& base, const std::string& name,
                            const std::string& param, const std::vector<double>& grid,
                            int pairs, int ancilla, double target) {
  std::vector<double> ys;
  for (double x : grid) {
    ExperimentConfig c = base;
    if (param == "mu") c.mu = x;
    else if (param == "T") c.transmittance = x;
    else c.gamma = x;
    ys.push_back(run_phase_averaged(c).component(pairs, ancilla));
  }
  const SlopeFit f = fit_loglog_slope(grid, ys);
  return {name, param, f.slope, f.stderr_slope, target};
}

}  // namespace

std::vector<ScalingReport> component_scalings(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.dark_e = c.dark_f = c.dark_g = 0.0;
  c.source = SourceKind::Spdc;
  c.variant = Variant::CounterPropagating;
  c.delay_um = 0.0;
  c.validate();
  // Two decades below the working point of each parameter.
  const auto mus = decades(c.mu / 100.0, c.mu, 5);
  const auto ts = decades(c.transmittance / 100.0, c.transmittance, 5);
  const auto gammas = decades(c.gamma / 100.0, c.gamma, 5);

  ExperimentConfig fwd = c;
  fwd.variant = Variant::ForwardAllFromBob;

  return {
      fit_component(c, "desired", "mu", mus, 1, 1, 1.0),
      fit_component(c, "desired", "T", ts, 1, 1, 1.0),
      fit_component(c, "coherent_two_photon", "mu", mus, 1, 2, 2.0),
      fit_component(c, "coherent_two_photon", "T", ts, 1, 2, 1.0),
      fit_component(c, "double_pair", "gamma", gammas, 2, 0, 2.0),
      fit_component(c, "double_pair", "T", ts, 2, 0, 1.0),
      fit_component(fwd, "forward_desired", "mu", mus, 1, 1, 1.0),
      fit_component(fwd, "forward_unwanted", "mu", mus, 1, 2, 2.0),
      fit_component(fwd, "forward_unwanted", "T", ts, 1, 2, 0.0),
  };
}

}  // namespace dfsim
