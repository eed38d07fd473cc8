#include <gtest/gtest.h>

#include "dfsim/errors.hpp"
#include "dfsim/oracle.hpp"

using namespace dfsim;

namespace {

double max_gap(const ProtocolOutcome& e, const OracleOutcome& o) {
  double d = std::abs(e.success_probability - o.success_probability);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) d = std::max(d, std::abs(e.coincidences[a][b] - o.coincidences[a][b]));
  return d;
}

ExperimentConfig small_reference() {
  ExperimentConfig c;
  c.s0 = 0.94;
  c.cutoff = 3;
  c.phases = {0.0, 1.3};
  return c;
}

}  // namespace

TEST(Oracle, IdealAgreement) {
  auto cfg = ExperimentConfig::ideal();
  cfg.cutoff = 3;
  cfg.phases = {0.0, 0.9};
  const auto r = oracle_check(cfg);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_deviation, 1e-12);
  EXPECT_EQ(r.compared, 2u * 37u);
}

TEST(Oracle, ReferenceParametersAtCutoffThree) {
  const auto r = oracle_check(small_reference());
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_deviation, 1e-9);
}

TEST(Oracle, RandomConfigs) {
  for (std::uint64_t seed = 101; seed < 105; ++seed) {
    const auto cfg = random_oracle_config(seed);
    const auto r = oracle_check(cfg);
    EXPECT_TRUE(r.passed) << "seed " << seed << " " << to_string(cfg.variant) << " dev " << r.max_deviation;
  }
}

TEST(Oracle, RandomConfigsAreReproducible) {
  const auto a = random_oracle_config(5), b = random_oracle_config(5);
  EXPECT_EQ(a.variant, b.variant);
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.phases, b.phases);
  EXPECT_LE(a.cutoff, kOracleMaxCutoff);
}

// The check must notice small changes to the model.
TEST(Oracle, DetectsMutations) {
  auto base = small_reference();
  base.gamma = 0.05;
  base.eta = base.eta_g = 0.8;
  base.transmittance = 0.3;
  const auto engine = run_fixed_phase(base, 0.0, 0.7);
  EXPECT_LT(max_gap(engine, oracle_fixed_phase(base, 0.0, 0.7)), 1e-9);
  const std::vector<std::pair<const char*, void (*)(ExperimentConfig&)>> mutations = {
      {"T", [](ExperimentConfig& c) { c.transmittance *= 1.01; }},
      {"mu", [](ExperimentConfig& c) { c.mu *= 1.01; }},
      {"gamma", [](ExperimentConfig& c) { c.gamma *= 1.01; }},
      {"eta", [](ExperimentConfig& c) { c.eta *= 0.99; }},
      {"s0", [](ExperimentConfig& c) { c.s0 -= 0.01; }},
      {"gp", [](ExperimentConfig& c) { c.gp_reflectance += 0.01; }},
      {"delta", [](ExperimentConfig& c) { c.phase_delta = 0.05; }},
  };
  for (const auto& [name, mutate] : mutations) {
    auto m = base;
    mutate(m);
    EXPECT_GT(max_gap(engine, oracle_fixed_phase(m, 0.0, 0.7)), 1e-9) << name;
  }
}

TEST(Oracle, RejectsLargeProblems) {
  ExperimentConfig cfg;
  cfg.cutoff = 4;
  EXPECT_THROW(oracle_fixed_phase(cfg, 0, 0), ConfigError);
}
