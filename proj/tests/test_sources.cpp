#include <gtest/gtest.h>

#include "dfsim/errors.hpp"
#include "dfsim/sources.hpp"
#include "helpers.hpp"

using namespace dfsim;
using dfsim::testing::registry;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }
double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Expansion of exp[sqrt(g)(a_H^dag b_H^dag + a_V^dag b_V^dag)] |0> up to
// `pairs` pairs, as amplitudes on (n_AH, n_AV, n_BH, n_BV), not normalized.
std::map<std::array<int, 4>, double> spdc_expansion(double g, int pairs) {
  std::map<std::array<int, 4>, double> out;
  for (int n = 0; n <= pairs; ++n)
    for (int k = 0; k <= n; ++k) {
      // (x + y)^n / n!, x^k |0> = k! |k, k>, y^(n-k) |0> = (n-k)! |n-k, n-k>.
      const double amp = std::pow(std::sqrt(g), n) / factorial(n) * binomial(n, k) * factorial(k) *
                         factorial(n - k);
      out[{k, n - k, k, n - k}] += amp;
    }
  return out;
}

double pair_sector(const FockStateVector& s, int n) {
  double p = 0.0;
  for (const auto& [occ, amp] : s.terms())
    if (total_photons(occ) == 2 * n) p += std::norm(amp);
  return p;
}

}  // namespace

TEST(Spdc, ZeroGammaIsVacuum) {
  auto reg = registry({{"A"}, {"B"}});
  auto s = spdc_state({0.0, 2}, reg, "A", "B", 4);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_NEAR(std::abs(s.amplitude(Occupation{0, 0, 0, 0})), 1.0, 1e-15);
}

TEST(Spdc, MatchesExponentialExpansion) {
  auto reg = registry({{"A"}, {"B"}});
  const double g = 3.0e-3;
  auto s = spdc_state({g, 2}, reg, "A", "B", 4);
  auto ref = spdc_expansion(g, 2);
  double norm = 0.0;
  for (const auto& [occ, a] : ref) norm += a * a;
  ASSERT_EQ(s.size(), ref.size());
  for (const auto& [occ, a] : ref) {
    const Occupation o{std::uint8_t(occ[0]), std::uint8_t(occ[1]), std::uint8_t(occ[2]),
                       std::uint8_t(occ[3])};
    EXPECT_NEAR(s.amplitude(o).real(), a / std::sqrt(norm), 1e-15);
  }
  // One-pair sector is phi+.
  EXPECT_NEAR(std::abs(s.amplitude(Occupation{1, 0, 1, 0}) - s.amplitude(Occupation{0, 1, 0, 1})), 0.0,
              1e-15);
}

TEST(Spdc, PairProbabilitiesFromExpansion) {
  const double g = 3.0e-3;
  // Untruncated normalization from a long expansion.
  auto ref = spdc_expansion(g, 30);
  std::vector<double> w(31, 0.0);
  double total = 0.0;
  for (const auto& [occ, a] : ref) {
    w[std::size_t(occ[0] + occ[1])] += a * a;
    total += a * a;
  }
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(spdc_pair_probability(g, k), w[std::size_t(k)] / total, 1e-15);
  const double p1 = w[1] / total, p2 = w[2] / total;
  EXPECT_NEAR(p1, 6.0e-3, 0.06 * 6.0e-3);
  EXPECT_NEAR(p1 / (2 * g), 1.0, 3 * g);
  EXPECT_NEAR(p2 / p1 / (1.5 * g), 1.0, 3 * g);

  auto reg = registry({{"A"}, {"B"}});
  auto s = spdc_state({g, 2}, reg, "A", "B", 4);
  EXPECT_NEAR(pair_sector(s, 1) / pair_sector(s, 0), w[1] / w[0], 1e-12);
  EXPECT_NEAR(s.truncated_weight(), 1.0 - (w[0] + w[1] + w[2]) / total, 1e-12);
}

TEST(Spdc, CutoffLimitsPairs) {
  auto reg = registry({{"A"}, {"B"}});
  auto s = spdc_state({1e-2, 3}, reg, "A", "B", 4);
  EXPECT_EQ(pair_sector(s, 3), 0.0);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(Coherent, Examples) {
  auto reg = registry({{"R"}});
  CoherentParams p;
  p.mean_photons = 0.0;
  EXPECT_EQ(coherent_state(p, reg, "R", 4).size(), 1u);

  p.mean_photons = 0.1;
  auto s = coherent_state(p, reg, "R", 6);
  double p1 = 0.0, mean = 0.0;
  for (const auto& [occ, amp] : s.terms()) {
    if (total_photons(occ) == 1) p1 += std::norm(amp);
    mean += total_photons(occ) * std::norm(amp);
  }
  EXPECT_NEAR(p1, 0.1 * std::exp(-0.1), 1e-14);
  EXPECT_NEAR(p1, 0.0905, 5e-5);
  EXPECT_NEAR(mean, 0.1, 1e-8);
  EXPECT_LT(s.truncated_weight(), 1e-9);
}

TEST(Coherent, DefaultPolarizationIsDiagonal) {
  auto reg = registry({{"R"}});
  CoherentParams p;
  p.mean_photons = 0.2;
  auto f = coherent_field(p, reg, "R");
  EXPECT_NEAR(std::abs(f.amplitude(0) - f.amplitude(1)), 0.0, 1e-15);
  EXPECT_NEAR(f.mean_photon_number(), 0.2, 1e-15);
}

TEST(EncodedPair, Normalized) {
  auto reg = registry({{"A"}, {"B"}});
  auto s = encoded_pair_state(std::sqrt(0.8), std::sqrt(0.2), reg, "A", "B", 4);
  EXPECT_NEAR(std::norm(s.amplitude(Occupation{1, 0, 1, 0})), 0.8, 1e-15);
  EXPECT_NEAR(std::norm(s.amplitude(Occupation{0, 1, 0, 1})), 0.2, 1e-15);
}
