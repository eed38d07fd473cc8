#include <gtest/gtest.h>

#include <numbers>

#include "dfsim/errors.hpp"
#include "dfsim/fock.hpp"
#include "dfsim/optics.hpp"
#include "helpers.hpp"

using namespace dfsim;
using dfsim::testing::random_state;
using dfsim::testing::random_unitary;
using dfsim::testing::registry;

namespace {

constexpr double kPi = std::numbers::pi;

FockStateVector ket(RegistryPtr reg, std::vector<std::pair<std::size_t, int>> photons, int cutoff = 4) {
  return FockStateVector::basis(reg, cutoff, photons);
}

// Permanent by Ryser's formula.
Amplitude permanent(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  Amplitude total = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Amplitude prod = 1.0;
    for (int i = 0; i < n; ++i) {
      Amplitude row = 0.0;
      for (int j = 0; j < n; ++j)
        if (mask & (1u << j)) row += a(i, j);
      prod *= row;
    }
    total += (__builtin_popcount(mask) % 2 == n % 2 ? 1.0 : -1.0) * prod;
  }
  return total;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(Registry, CountsModes) {
  EXPECT_EQ(registry({{"A"}, {"B"}})->size(), 4u);
  EXPECT_EQ(registry({{"R", true}})->size(), 4u);
  EXPECT_EQ(registry({})->size(), 0u);
  auto reg = registry({{"A"}, {"R", true}});
  EXPECT_EQ(reg->index("R", Pol::V, Temporal::Orthogonal), 5u);
  EXPECT_FALSE(reg->find("A", Pol::H, Temporal::Orthogonal).has_value());
  EXPECT_TRUE(reg->is_split("R"));
}

TEST(Registry, DuplicateLabelIsConfigError) {
  std::vector<LabelSpec> spec = {{"A"}, {"A"}};
  EXPECT_THROW(make_registry(spec), ConfigError);
}

TEST(Transform, RejectsNonIsometry) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 0.0, 0.0, 0.5;
  EXPECT_THROW(ModeTransform({0, 1}, {0, 1}, m), ValidationError);
}

TEST(Transform, IdentityLeavesStateUnchanged) {
  auto reg = registry({{"A"}, {"B"}});
  std::mt19937_64 rng(1);
  auto s = random_state(reg, {0, 1, 2, 3}, 3, 4, rng);
  auto out = apply_transform(s, ModeTransform::identity({0, 1, 2, 3}));
  EXPECT_LT(max_abs_difference(s, out), 1e-15);
}

TEST(Transform, BalancedSplitterOnOnePhoton) {
  auto reg = registry({{"A"}});
  auto out = apply_transform(ket(reg, {{0, 1}}), beamsplitter(0, 1, kPi / 4));
  FockStateVector want(reg, 4);
  want.add(Occupation{1, 0}, 1.0 / std::sqrt(2.0));
  want.add(Occupation{0, 1}, 1.0 / std::sqrt(2.0));
  EXPECT_LT(max_abs_difference(out, want), 1e-15);
}

TEST(Transform, HongOuMandel) {
  auto reg = registry({{"A"}});
  auto out = apply_transform(ket(reg, {{0, 1}, {1, 1}}), beamsplitter(0, 1, kPi / 4));
  FockStateVector want(reg, 4);
  want.add(Occupation{2, 0}, 1.0 / std::sqrt(2.0));
  want.add(Occupation{0, 2}, -1.0 / std::sqrt(2.0));
  EXPECT_NEAR(std::abs(out.amplitude(Occupation{1, 1})), 0.0, 1e-15);
  // The rotation convention gives the opposite overall sign.
  EXPECT_TRUE(equal_up_to_phase(out, want, 1e-14));
}

TEST(Transform, MatchesPermanentFormula) {
  auto reg = registry({{"A"}, {"B"}});
  std::mt19937_64 rng(7);
  const Eigen::MatrixXcd u = random_unitary(3, rng);
  const ModeTransform t({0, 1, 2}, {0, 1, 2}, u);
  const std::vector<int> in = {2, 1, 0};
  auto out = apply_transform(ket(reg, {{0, 2}, {1, 1}}), t);
  // <m| U |n> = Perm(U[m, n]) / sqrt(prod n! prod m!).
  for (const auto& [occ, amp] : out.terms()) {
    std::vector<int> rows, cols;
    for (int k = 0; k < 3; ++k) {
      for (int r = 0; r < occ[static_cast<std::size_t>(k)]; ++r) rows.push_back(k);
      for (int c = 0; c < in[static_cast<std::size_t>(k)]; ++c) cols.push_back(k);
    }
    ASSERT_EQ(rows.size(), 3u);
    Eigen::MatrixXcd sub(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sub(i, j) = u(rows[std::size_t(i)], cols[std::size_t(j)]);
    double norm = factorial(2) * factorial(1);
    for (int k = 0; k < 3; ++k) norm *= factorial(occ[static_cast<std::size_t>(k)]);
    EXPECT_LT(std::abs(amp - permanent(sub) / std::sqrt(norm)), 1e-12);
  }
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-12);
}

TEST(Transform, IsometryPreservesNorm) {
  auto reg = registry({{"A"}, {"B"}});
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_state(reg, {0, 1, 2, 3}, 4, 4, rng);
    const ModeTransform t({0, 1, 2, 3}, {0, 1, 2, 3}, random_unitary(4, rng));
    EXPECT_NEAR(apply_transform(s, t).norm_squared(), s.norm_squared(), 1e-10);
  }
}

TEST(Transform, LossDilationKeepsTotalProbability) {
  auto reg = registry({{"A"}, {"lossA"}});
  std::mt19937_64 rng(3);
  auto s = random_state(reg, {0, 1}, 3, 4, rng);
  auto out = apply_transform(s, loss_channel(*reg, "A", 0.3, "lossA"));
  double total = 0.0;
  for (int nh = 0; nh <= 4; ++nh)
    for (int nv = 0; nv <= 4; ++nv)
      total += project_occupation(project_occupation(out, 2, nh), 3, nv).norm_squared();
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(Transform, CompositionMatchesSequentialApplication) {
  auto reg = registry({{"A"}, {"B"}, {"lossB"}});
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_state(reg, {0, 1, 2, 3}, 3, 4, rng);
    const ModeTransform t1({0, 1, 2}, {0, 1, 2}, random_unitary(3, rng));
    const ModeTransform t2 = loss_channel(*reg, "B", 0.4, "lossB");
    auto seq = apply_transform(apply_transform(s, t1), t2);
    auto comp = apply_transform(s, compose(t2, t1));
    EXPECT_LT(max_abs_difference(seq, comp), 1e-10);
  }
}

TEST(Transform, CoherentStateStaysCoherentThroughLoss) {
  auto reg = registry({{"B"}, {"lossB"}});
  const Amplitude alpha{0.4, -0.3};
  const double t = 0.35;
  const int cutoff = 6;
  CoherentField f(reg);
  f.set(0, alpha);
  const std::size_t in_modes[] = {0};
  auto out = apply_transform(materialize(f, in_modes, cutoff), loss_channel(*reg, "B", t, "lossB"));
  // Product of coherent states sqrt(T) alpha (x) sqrt(1 - T) alpha, term by term.
  const Amplitude a = std::sqrt(t) * alpha, b = std::sqrt(1 - t) * alpha;
  for (int n = 0; n <= cutoff; ++n)
    for (int m = 0; n + m <= cutoff; ++m) {
      Occupation occ(reg->size(), 0);
      occ[0] = static_cast<std::uint8_t>(n);
      occ[2] = static_cast<std::uint8_t>(m);
      const Amplitude want = std::exp(-0.5 * std::norm(alpha)) * std::pow(a, n) * std::pow(b, m) /
                             std::sqrt(factorial(n) * factorial(m));
      EXPECT_LT(std::abs(out.amplitude(occ) - want), 1e-14) << n << "," << m;
    }
  // The analytic field gives the same split.
  auto g = apply_transform(f, loss_channel(*reg, "B", t, "lossB"));
  EXPECT_LT(std::abs(g.amplitude(0) - a), 1e-15);
  EXPECT_LT(std::abs(g.amplitude(2) - b), 1e-15);
}

TEST(Tensor, Examples) {
  auto reg = registry({{"A"}, {"B"}});
  auto a = ket(reg, {{0, 1}});
  auto b = FockStateVector::vacuum(reg, 4);
  auto ab = tensor(a, b);
  EXPECT_NEAR(std::abs(ab.amplitude(Occupation{1, 0, 0, 0})), 1.0, 1e-15);
  auto vv = tensor(FockStateVector::vacuum(reg, 4), FockStateVector::vacuum(reg, 4));
  EXPECT_EQ(vv.size(), 1u);
  EXPECT_THROW(tensor(a, ket(reg, {{0, 1}})), ValidationError);
}

TEST(Tensor, NormsMultiply) {
  auto reg = registry({{"A"}, {"B"}});
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_state(reg, {0, 1}, 2, 4, rng).scaled(0.7);
    auto b = random_state(reg, {2, 3}, 2, 4, rng).scaled(1.3);
    EXPECT_NEAR(tensor(a, b).norm_squared(), a.norm_squared() * b.norm_squared(), 1e-12);
  }
}

TEST(Project, Examples) {
  auto reg = registry({{"A"}});
  auto s = ket(reg, {{0, 1}});
  EXPECT_LT(max_abs_difference(project_occupation(s, 0, 1), s), 1e-15);
  FockStateVector sup(reg, 4);
  sup.add(Occupation{1, 0}, 1.0 / std::sqrt(2.0));
  sup.add(Occupation{0, 1}, 1.0 / std::sqrt(2.0));
  auto p = project_occupation(sup, 0, 0);
  EXPECT_NEAR(p.norm_squared(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(p.amplitude(Occupation{0, 1})), 1.0 / std::sqrt(2.0), 1e-15);
  double total = 0.0;
  for (int n = 0; n <= 4; ++n) total += project_occupation(sup, 0, n).norm_squared();
  EXPECT_NEAR(total, sup.norm_squared(), 1e-15);
  EXPECT_THROW(project_occupation(sup, 9, 0), ConfigError);
}

TEST(State, CreationOverCutoffIsRecorded) {
  auto reg = registry({{"A"}});
  auto s = ket(reg, {{0, 2}}, 2);
  auto up = create(s, 0);
  EXPECT_TRUE(up.empty());
  EXPECT_NEAR(up.truncated_weight(), 3.0, 1e-12);
}

TEST(Reduce, PhiPlusRoundTrips) {
  auto reg = registry({{"A"}, {"B"}});
  FockStateVector s(reg, 4);
  s.add(Occupation{1, 0, 1, 0}, 1.0 / std::sqrt(2.0));
  s.add(Occupation{0, 1, 0, 1}, 1.0 / std::sqrt(2.0));
  auto dm = reduce_to_polarization_dm(s, "A", "B");
  EXPECT_NEAR(dm.trace(), 1.0, 1e-15);
  EXPECT_LT((dm.rho - pure_dm(phi_plus()).rho).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Reduce, EntangledLossModeMixes) {
  auto reg = registry({{"A"}, {"B"}, {"lossB"}});
  FockStateVector s(reg, 4);
  s.add(Occupation{1, 0, 1, 0, 0, 0}, 1.0 / std::sqrt(2.0));
  s.add(Occupation{0, 1, 0, 1, 1, 0}, 1.0 / std::sqrt(2.0));
  auto dm = reduce_to_polarization_dm(s, "A", "B");
  // Tracing the loss photon leaves diag(1/2, 0, 0, 1/2).
  Eigen::Matrix4cd want = Eigen::Matrix4cd::Zero();
  want(0, 0) = want(3, 3) = 0.5;
  EXPECT_LT((dm.rho - want).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((dm.rho * dm.rho).trace().real(), 1.0);
}

TEST(Reduce, PhaseAveragedSuperpositionIsDiagonal) {
  auto reg = registry({{"A"}, {"B"}});
  PolarizationDensityMatrix avg;
  for (int n = 0; n < 8; ++n) {
    FockStateVector s(reg, 4);
    s.add(Occupation{1, 0, 1, 0}, 1.0 / std::sqrt(2.0));
    s.add(Occupation{0, 1, 0, 1}, std::polar(1.0 / std::sqrt(2.0), n * kPi / 4));
    avg.rho += reduce_to_polarization_dm(s, "A", "B").rho / 8.0;
  }
  EXPECT_LT(std::abs(avg.rho(0, 3)), 1e-15);
  EXPECT_NEAR(avg.rho(0, 0).real(), 0.5, 1e-15);
}

TEST(Fidelity, Examples) {
  EXPECT_NEAR(fidelity_to_phi_plus(pure_dm(phi_plus())), 1.0, 1e-15);
  PolarizationDensityMatrix mixed;
  mixed.rho = Eigen::Matrix4cd::Identity() / 4.0;
  EXPECT_NEAR(fidelity_to_phi_plus(mixed), 0.25, 1e-15);
  PolarizationDensityMatrix deph;
  deph.rho(0, 0) = deph.rho(3, 3) = 0.5;
  EXPECT_NEAR(fidelity_to_phi_plus(deph), 0.5, 1e-15);
  EXPECT_THROW(fidelity_to_phi_plus(PolarizationDensityMatrix{}), UndefinedError);
}

TEST(Fidelity, TraceDistance) {
  PolarizationDensityMatrix deph;
  deph.rho(0, 0) = deph.rho(3, 3) = 0.5;
  EXPECT_NEAR(trace_distance(pure_dm(phi_plus()), deph), 0.5, 1e-12);
  EXPECT_NEAR(trace_distance(deph, deph), 0.0, 1e-15);
}
