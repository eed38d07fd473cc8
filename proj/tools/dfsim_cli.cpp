// dfsim command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfsim/analysis.hpp"
#include "dfsim/config.hpp"
#include "dfsim/errors.hpp"
#include "dfsim/oracle.hpp"

using namespace dfsim;

namespace {

const std::vector<double> kTableGrid = {0.1, 0.03, 0.01, 0.005, 0.003};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("io", "cannot write '" + path + "'");
  return f;
}

std::string json_path_for(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return csv.substr(0, dot) + ".json";
  return csv + ".json";
}

void header(std::ostream& os, const char* what, const std::string& columns) {
  os << "# dfsim " << what << " schema " << kCsvSchemaVersion << "\n" << columns << "\n";
}

std::string row(std::initializer_list<double> xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : ",") + csv_number(x);
  return s;
}

// Applies calibrate=true (s0 at the anchor) and fwhm_um (sigma).
void maybe_calibrate(ExperimentConfig& cfg, const KeyValues& kv) {
  const double anchor = kv.number("anchor_T", 0.1);
  const double target = kv.number("target_VX", 0.82);
  if (kv.flag("calibrate", false)) cfg.s0 = calibrate_overlap(cfg, anchor, target).s0;
  if (kv.has("fwhm_um")) cfg.sigma_um = calibrate_sigma(cfg, kv.number("fwhm_um", 180.0));
}

void cmd_sweep(const KeyValues& kv, const std::string& out) {
  ExperimentConfig cfg = experiment_from(kv);
  const auto ts = kv.numbers("T_values", kTableGrid);
  const auto threads = static_cast<unsigned>(kv.integer("threads", 0));
  maybe_calibrate(cfg, kv);
  kv.require_all_used();
  const ResultsTable table = sweep_transmittance(cfg, ts, threads);
  auto csv = open_out(out);
  write_csv(csv, table);
  auto js = open_out(json_path_for(out));
  js << to_json(table) << "\n";
}

void cmd_calibrate(const KeyValues& kv, const std::string& out) {
  ExperimentConfig cfg = experiment_from(kv);
  const double anchor = kv.number("anchor_T", 0.1);
  const double target = kv.number("target_VX", 0.82);
  const double fwhm = kv.number("fwhm_um", 180.0);
  kv.flag("calibrate", true);
  kv.require_all_used();
  const CalibrationResult cal = calibrate_overlap(cfg, anchor, target);
  cfg.s0 = cal.s0;
  const double sigma = calibrate_sigma(cfg, fwhm);
  auto f = open_out(out);
  header(f, "calibration", "anchor_T,target_V_X,s0,V_X,V_sp,max_V_X,fwhm_um,sigma_um");
  f << row({anchor, target, cal.s0, cal.vx, cal.v_sp, cal.max_vx, fwhm, sigma}) << "\n";
}

void cmd_delay_scan(const KeyValues& kv, const std::string& out) {
  ExperimentConfig cfg = experiment_from(kv);
  std::vector<double> grid;
  for (int k = -20; k <= 20; ++k) grid.push_back(20.0 * k);
  const auto delays = kv.numbers("delays_um", grid);
  maybe_calibrate(cfg, kv);
  kv.require_all_used();
  auto f = open_out(out);
  header(f, "delay-scan", "delay_um,p_R,p_L,visibility");
  for (const auto& p : delay_scan(cfg, delays))
    f << row({p.delay_um, p.p_r, p.p_l, p.visibility}) << "\n";
}

void cmd_tomography(const KeyValues& kv, const std::string& out) {
  const ExperimentConfig cfg = experiment_from(kv);
  kv.require_all_used();
  auto f = open_out(out);
  header(f, "tomography", "noise,fidelity,max_hh_vv_coherence,row,col,re,im");
  for (bool noise : {false, true}) {
    const TomographyResult r = tomography_experiment(cfg, noise);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        f << (noise ? 1 : 0) << ',' << csv_number(r.fidelity) << ','
          << csv_number(r.max_hh_vv_coherence) << ',' << i << ',' << j << ','
          << csv_number(r.dm.rho(i, j).real()) << ',' << csv_number(r.dm.rho(i, j).imag()) << "\n";
  }
}

void cmd_sample(const KeyValues& kv, const std::string& out, std::uint64_t seed) {
  const ExperimentConfig cfg = experiment_from(kv);
  const long long n = kv.integer("n_pulses", 1000000);
  if (n < 0) throw ConfigError("n_pulses must be nonnegative");
  kv.require_all_used();
  const auto dist = event_distribution(cfg);
  const auto events = sample_events(dist, static_cast<std::uint64_t>(n), seed);
  auto f = open_out(out);
  // Pulses with no click at all are omitted.
  header(f, "sample", "pulse,E,F,G");
  std::array<std::uint64_t, 8> counts{};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto e = events[i];
    ++counts[e];
    if (e) f << i << ',' << ((e >> 2) & 1) << ',' << ((e >> 1) & 1) << ',' << (e & 1) << "\n";
  }
  nlohmann::json summary;
  summary["n_pulses"] = n;
  summary["seed"] = seed;
  summary["counts"] = counts;
  summary["probabilities"] = dist;
  std::cout << summary.dump() << "\n";
}

void cmd_oracle_check(const KeyValues& kv, const std::string& out) {
  const ExperimentConfig cfg = experiment_from(kv);
  const long long n_random = kv.integer("random_configs", 0);
  const long long seed_base = kv.integer("random_seed", 1);
  const double tol = kv.number("tolerance", 1e-9);
  kv.require_all_used();
  std::vector<std::pair<std::string, ExperimentConfig>> cases = {{"config", cfg}};
  for (long long k = 0; k < n_random; ++k)
    cases.emplace_back("random_" + std::to_string(seed_base + k),
                       random_oracle_config(static_cast<std::uint64_t>(seed_base + k)));
  auto f = open_out(out);
  header(f, "oracle-check", "case,variant,cutoff,compared,max_deviation,passed");
  double worst = 0.0;
  bool ok = true;
  for (const auto& [name, c] : cases) {
    const OracleReport r = oracle_check(c, tol);
    f << name << ',' << to_string(c.variant) << ',' << c.cutoff << ',' << r.compared << ','
      << csv_number(r.max_deviation) << ',' << (r.passed ? 1 : 0) << "\n";
    worst = std::max(worst, r.max_deviation);
    ok = ok && r.passed;
  }
  if (!ok) throw OracleMismatch("engine and oracle differ by " + csv_number(worst));
}

void cmd_qubit(const KeyValues& kv, const std::string& out) {
  ExperimentConfig cfg = experiment_from(kv);
  kv.require_all_used();
  cfg.source = SourceKind::Pair;
  const double fid = distribute_qubit(cfg);
  const Visibilities v = visibilities(run_phase_averaged(cfg));
  auto f = open_out(out);
  header(f, "qubit", "alpha_re,alpha_im,beta_re,beta_im,fidelity,V_Z,V_X");
  f << row({cfg.alpha.real(), cfg.alpha.imag(), cfg.beta.real(), cfg.beta.imag(), fid, v.vz, v.vx})
    << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective-noise-immune entanglement distribution simulator"};
  app.require_subcommand(1);
  std::string config, out;
  std::uint64_t seed = 1;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "key=value parameter file")->required();
    sub->add_option("--out", out, "output CSV path")->required();
    return sub;
  };
  auto* sweep = add("sweep", "F_low and rates over transmittance (CSV and JSON)");
  auto* calibrate = add("calibrate", "fit s0 to the V_X anchor and sigma to the dip FWHM");
  auto* delay = add("delay-scan", "coincidences and visibility against A-R delay");
  auto* tomo = add("tomography", "direct transmission with and without phase noise");
  auto* sample = add("sample", "seeded click records");
  sample->add_option("--seed", seed, "random seed");
  auto* oracle = add("oracle-check", "compare against the dense reference");
  auto* qubit = add("qubit", "distribute alpha|H> + beta|V>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err{{"error", "usage"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 64;
  }

  try {
    const KeyValues kv = KeyValues::load(config);
    if (*sweep) cmd_sweep(kv, out);
    else if (*calibrate) cmd_calibrate(kv, out);
    else if (*delay) cmd_delay_scan(kv, out);
    else if (*tomo) cmd_tomography(kv, out);
    else if (*sample) cmd_sample(kv, out, seed);
    else if (*oracle) cmd_oracle_check(kv, out);
    else if (*qubit) cmd_qubit(kv, out);
  } catch (const Error& e) {
    nlohmann::json err{{"error", e.kind()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return e.kind() == "config" ? 2 : 1;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
