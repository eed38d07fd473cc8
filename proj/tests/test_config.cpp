#include <gtest/gtest.h>

#include <numbers>

#include "dfsim/config.hpp"
#include "dfsim/errors.hpp"

using namespace dfsim;

TEST(KeyValues, ParsesCommentsAndBlanks) {
  const auto kv = KeyValues::parse("# header\n\n  gamma = 3e-3  # pairs\nT=0.1\nvariant = direct_no_dfs\n");
  EXPECT_DOUBLE_EQ(kv.number("gamma", 0), 3e-3);
  EXPECT_DOUBLE_EQ(kv.number("T", 0), 0.1);
  EXPECT_EQ(*kv.text("variant"), "direct_no_dfs");
  EXPECT_DOUBLE_EQ(kv.number("missing", 7.0), 7.0);
  EXPECT_NO_THROW(kv.require_all_used());
}

TEST(KeyValues, Errors) {
  EXPECT_THROW(KeyValues::parse("gamma 3e-3\n"), ConfigError);
  EXPECT_THROW(KeyValues::parse("= 3\n"), ConfigError);
  EXPECT_THROW(KeyValues::parse("a=1\na=2\n"), ConfigError);
  const auto kv = KeyValues::parse("x = abc\nn = 2.5\nb = maybe\nl = 1,,2\n");
  EXPECT_THROW(kv.number("x", 0), ConfigError);
  EXPECT_THROW(kv.integer("n", 0), ConfigError);
  EXPECT_THROW(kv.flag("b", false), ConfigError);
  EXPECT_THROW(kv.numbers("l", {}), ConfigError);
  EXPECT_THROW(KeyValues::load("/nonexistent/file.conf"), ConfigError);
}

TEST(KeyValues, UnknownKeysAreReported) {
  const auto kv = KeyValues::parse("gamma = 1e-3\ngama = 2e-3\n");
  kv.number("gamma", 0);
  try {
    kv.require_all_used();
    FAIL() << "expected an error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gama"), std::string::npos);
  }
}

TEST(KeyValues, Lists) {
  const auto kv = KeyValues::parse("T_values = 0.1, 0.03,0.01\n");
  EXPECT_EQ(kv.numbers("T_values", {}), (std::vector<double>{0.1, 0.03, 0.01}));
  EXPECT_EQ(kv.numbers("other", {1.0}), (std::vector<double>{1.0}));
}

TEST(ExperimentFrom, MuEtaAndPhaseSteps) {
  const auto kv = KeyValues::parse(
      "gamma = 3.0e-3\nmu_eta = 1.4e-2\neta = 0.13\neta_G = 0.09\ndark_G = 1.5e-6\nT = 0.01\n"
      "phase_steps = 4\nvariant = counter_propagating\nsource = spdc\ninclude_dbar = true\n");
  const auto c = experiment_from(kv);
  EXPECT_NEAR(c.mu, 1.4e-2 / 0.13, 1e-15);
  EXPECT_DOUBLE_EQ(c.transmittance, 0.01);
  ASSERT_EQ(c.phases.size(), 4u);
  EXPECT_NEAR(c.phases[1], std::numbers::pi / 2, 1e-15);
  EXPECT_TRUE(c.include_dbar_branch);
  EXPECT_NO_THROW(kv.require_all_used());
}

TEST(ExperimentFrom, Rejections) {
  EXPECT_THROW(experiment_from(KeyValues::parse("mu = 0.1\nmu_eta = 0.01\n")), ConfigError);
  EXPECT_THROW(experiment_from(KeyValues::parse("phases = 0\nphase_steps = 8\n")), ConfigError);
  EXPECT_THROW(experiment_from(KeyValues::parse("T = 2\n")), ConfigError);
  EXPECT_THROW(experiment_from(KeyValues::parse("variant = sideways\n")), ConfigError);
  EXPECT_THROW(experiment_from(KeyValues::parse("source = laser\n")), ConfigError);
  EXPECT_THROW(experiment_from(KeyValues::parse("eta = 1.5\n")), ConfigError);
  EXPECT_THROW(experiment_from(KeyValues::parse("source = pair\nalpha_re = 1\nbeta_re = 1\n")), ConfigError);
}

TEST(ExperimentFrom, VariantNamesRoundTrip) {
  for (auto v : {Variant::CounterPropagating, Variant::ForwardAllFromBob, Variant::SinglePhotonAncilla,
                 Variant::DirectNoDfs})
    EXPECT_EQ(parse_variant(to_string(v)), v);
  for (auto s : {SourceKind::Spdc, SourceKind::Pair}) EXPECT_EQ(parse_source(to_string(s)), s);
}
