#include "dfsim/oracle.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "dfsim/errors.hpp"

namespace dfsim {

namespace {

using Cplx = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using Sparse = Eigen::SparseMatrix<Cplx>;
using Occ = std::vector<int>;
constexpr double kPi = std::numbers::pi;

// Fock space of `modes` modes holding at most `cutoff` photons in total.
class DenseSpace {
 public:
  DenseSpace(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
    Occ occ(static_cast<std::size_t>(modes), 0);
    enumerate(occ, 0, cutoff);
    for (std::size_t i = 0; i < basis_.size(); ++i) index_[basis_[i]] = static_cast<Eigen::Index>(i);
  }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  int modes() const { return modes_; }
  const Occ& occ(Eigen::Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  Eigen::Index find(const Occ& o) const {
    auto it = index_.find(o);
    return it == index_.end() ? -1 : it->second;
  }

  // exp(sum_jk G_jk a_j^dag a_k) with G = log(M), M acting on the given modes.
  Sparse passive(const std::vector<int>& on, const Dense& m) const {
    const Dense g = m.log();
    if ((g.exp() - m).cwiseAbs().maxCoeff() > 1e-12)
      throw OracleMismatch("mode matrix logarithm is inaccurate");
    Dense gen = Dense::Zero(dim(), dim());
    for (Eigen::Index c = 0; c < dim(); ++c) {
      const Occ& n = occ(c);
      for (std::size_t j = 0; j < on.size(); ++j)
        for (std::size_t k = 0; k < on.size(); ++k) {
          const Cplx gjk = g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
          if (gjk == Cplx{}) continue;
          const auto mj = static_cast<std::size_t>(on[j]), mk = static_cast<std::size_t>(on[k]);
          if (n[mk] == 0) continue;
          Occ out = n;
          double amp = std::sqrt(double(out[mk]));
          out[mk] -= 1;
          amp *= std::sqrt(double(out[mj] + 1));
          out[mj] += 1;
          gen(find(out), c) += gjk * amp;
        }
    }
    return block_exp(gen);
  }

  // Kraus operators of a loss channel with transmittance t on one mode.
  std::vector<Sparse> loss(int mode, double t) const {
    std::vector<Sparse> ks;
    for (int k = 0; k <= cutoff_; ++k) {
      std::vector<Eigen::Triplet<Cplx>> trip;
      for (Eigen::Index c = 0; c < dim(); ++c) {
        const Occ& n = occ(c);
        const int nm = n[static_cast<std::size_t>(mode)];
        if (nm < k) continue;
        Occ out = n;
        out[static_cast<std::size_t>(mode)] -= k;
        const double amp = std::sqrt(binomial(nm, k) * std::pow(t, nm - k) * std::pow(1.0 - t, k));
        trip.emplace_back(find(out), c, amp);
      }
      Sparse s(dim(), dim());
      s.setFromTriplets(trip.begin(), trip.end());
      ks.push_back(s);
    }
    return ks;
  }

  // exp(gen), one connected block of the coupling graph at a time.
  Sparse block_exp(const Dense& gen) const {
    std::vector<Eigen::Index> root(static_cast<std::size_t>(dim()));
    for (Eigen::Index k = 0; k < dim(); ++k) root[std::size_t(k)] = k;
    auto find_root = [&root](Eigen::Index k) {
      while (root[std::size_t(k)] != k) k = root[std::size_t(k)] = root[std::size_t(root[std::size_t(k)])];
      return k;
    };
    for (Eigen::Index r = 0; r < dim(); ++r)
      for (Eigen::Index c = 0; c < dim(); ++c)
        if (gen(r, c) != Cplx{}) root[std::size_t(find_root(r))] = find_root(c);
    std::map<Eigen::Index, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index k = 0; k < dim(); ++k) blocks[find_root(k)].push_back(k);
    std::vector<Eigen::Triplet<Cplx>> trip;
    for (const auto& [r, members] : blocks) {
      const auto n = static_cast<Eigen::Index>(members.size());
      Dense sub(n, n);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = gen(members[std::size_t(a)], members[std::size_t(b)]);
      const Dense e = sub.exp();
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          if (std::abs(e(a, b)) > 1e-16) trip.emplace_back(members[std::size_t(a)], members[std::size_t(b)], e(a, b));
    }
    Sparse out(dim(), dim());
    out.setFromTriplets(trip.begin(), trip.end());
    out.makeCompressed();
    return out;
  }

 private:
  void enumerate(Occ& occ, int mode, int left) {
    if (mode == modes_) {
      basis_.push_back(occ);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      occ[static_cast<std::size_t>(mode)] = n;
      enumerate(occ, mode + 1, left - n);
    }
    occ[static_cast<std::size_t>(mode)] = 0;
  }

  static double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  }

  int modes_;
  int cutoff_;
  std::vector<Occ> basis_;
  std::map<Occ, Eigen::Index> index_;
};

Dense conjugate(const Sparse& u, const Dense& rho) {
  const Dense left = u * rho;
  return left * Dense(u.adjoint());
}

Dense apply_kraus(const std::vector<Sparse>& ks, const Dense& rho) {
  Dense out = Dense::Zero(rho.rows(), rho.cols());
  for (const auto& k : ks) out += conjugate(k, rho);
  return out;
}

Eigen::Vector2cd jones(AnalyzerBasis b) {
  const double r = 1.0 / std::sqrt(2.0);
  const Cplx i{0.0, 1.0};
  switch (b) {
    case AnalyzerBasis::H: return {1.0, 0.0};
    case AnalyzerBasis::V: return {0.0, 1.0};
    case AnalyzerBasis::D: return {r, r};
    case AnalyzerBasis::A: return {r, -r};
    case AnalyzerBasis::R: return {r, i * r};
    case AnalyzerBasis::L: return {r, -i * r};
  }
  return {1.0, 0.0};
}

// 2x2 mode matrix that sends polarization p to H.
Eigen::Matrix2cd to_h(const Eigen::Vector2cd& p) {
  Eigen::Matrix2cd m;
  m << std::conj(p(0)), std::conj(p(1)), -p(1), p(0);
  return m;
}

// Mode matrix acting with `m2` on the (H, V) pairs listed.
Dense on_pairs(int modes, const std::vector<std::pair<int, int>>& pairs, const Eigen::Matrix2cd& m2) {
  Dense m = Dense::Identity(modes, modes);
  for (auto [h, v] : pairs) {
    m(h, h) = m2(0, 0);
    m(h, v) = m2(0, 1);
    m(v, h) = m2(1, 0);
    m(v, v) = m2(1, 1);
  }
  return m;
}

struct Detector {
  std::vector<int> modes;
  double eta;
  double dark;
};

double click_weight(const Occ& n, const std::vector<Detector>& dets) {
  double w = 1.0;
  for (const auto& d : dets) {
    int k = 0;
    for (int m : d.modes) k += n[static_cast<std::size_t>(m)];
    w *= 1.0 - std::pow(1.0 - d.eta, k) * (1.0 - d.dark);
  }
  return w;
}

double all_click(const DenseSpace& sp, const Eigen::VectorXcd& diag, const std::vector<Detector>& dets) {
  double p = 0.0;
  for (Eigen::Index i = 0; i < sp.dim(); ++i) p += diag(i).real() * click_weight(sp.occ(i), dets);
  return p;
}

double gaussian_overlap(const ExperimentConfig& c) {
  const double x = c.delay_um / c.sigma_um;
  return c.s0 * std::exp(-0.5 * x * x);
}

// Pair amplitudes sqrt(g)^(p+q) on |p, q>_x |p, q>_y, normalized, as a map
// from (p, q) to amplitude.
std::map<std::pair<int, int>, Cplx> pair_source(const ExperimentConfig& c) {
  std::map<std::pair<int, int>, Cplx> out;
  if (c.source == SourceKind::Pair) {
    const double n = std::sqrt(std::norm(c.alpha) + std::norm(c.beta));
    out[{1, 0}] = c.alpha / n;
    out[{0, 1}] = c.beta / n;
    return out;
  }
  const double g = 0.5 * c.gamma;
  const int max_pairs = std::min(c.pair_cutoff, c.cutoff / 2);
  double norm = 0.0;
  for (int p = 0; p <= max_pairs; ++p)
    for (int q = 0; p + q <= max_pairs; ++q) {
      const double a = std::pow(g, 0.5 * (p + q));
      out[{p, q}] = a;
      norm += a * a;
    }
  for (auto& [k, v] : out) v /= std::sqrt(norm);
  return out;
}

}  // namespace

OracleOutcome oracle_fixed_phase(const ExperimentConfig& cfg, double phi_h, double phi_v) {
  cfg.validate();
  if (cfg.cutoff > kOracleMaxCutoff)
    throw ConfigError("oracle needs cutoff <= " + std::to_string(kOracleMaxCutoff));
  const bool direct = cfg.variant == Variant::DirectNoDfs;
  const int modes = direct ? 4 : 10;
  const DenseSpace sp(modes, cfg.cutoff);
  const Cplx i{0.0, 1.0};
  const Cplx eh = std::exp(i * phi_h), ev = std::exp(i * phi_v);
  const Cplx ev_r = std::exp(i * (phi_v + cfg.phase_delta));
  const auto source = pair_source(cfg);

  // Slots: x pair photon (A, later E), r ancilla (R, later F), y pair
  // photon (B, later G).
  const int xh = 0, xv = 1;
  const int rh = 4, rv = 5;
  const int yh = direct ? 2 : 8, yv = direct ? 3 : 9;

  // Ancilla amplitudes on (n_H, n_V) of the matched R modes.
  std::map<std::pair<int, int>, Cplx> ancilla;
  const double r2 = 1.0 / std::sqrt(2.0);
  if (direct) {
    ancilla[{0, 0}] = 1.0;
  } else if (cfg.variant == Variant::SinglePhotonAncilla) {
    ancilla[{1, 0}] = r2 * eh;
    ancilla[{0, 1}] = r2 * ev_r;
  } else {
    const double mu = cfg.transmittance > 0.0 ? cfg.mu : 0.0;
    const Cplx ah = std::sqrt(0.5 * mu) * eh, av = std::sqrt(0.5 * mu) * ev_r;
    for (int a = 0; a <= cfg.cutoff; ++a)
      for (int b = 0; a + b <= cfg.cutoff; ++b) {
        ancilla[{a, b}] = std::exp(-0.5 * mu) * std::pow(ah, a) * std::pow(av, b) /
                          std::sqrt(std::tgamma(a + 1.0) * std::tgamma(b + 1.0));
      }
  }

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sp.dim());
  // The channel phase multiplies |p, q> of either pair photon alike.
  for (const auto& [pq, amp] : source)
    for (const auto& [ab, anc] : ancilla) {
      Occ n(static_cast<std::size_t>(modes), 0);
      n[xh] = pq.first;
      n[xv] = pq.second;
      n[yh] = pq.first;
      n[yv] = pq.second;
      if (!direct) {
        n[rh] = ab.first;
        n[rv] = ab.second;
      }
      const Eigen::Index k = sp.find(n);
      if (k < 0) continue;
      psi(k) += amp * anc * std::pow(eh, pq.first) * std::pow(ev, pq.second);
    }
  Dense rho = psi * psi.adjoint();

  // Losses.
  auto lose = [&](int mode, double t) { rho = apply_kraus(sp.loss(mode, t), rho); };
  if (cfg.variant == Variant::ForwardAllFromBob) {
    lose(xh, cfg.transmittance);
    lose(xv, cfg.transmittance);
  } else {
    lose(yh, cfg.transmittance);
    lose(yv, cfg.transmittance);
    lose(yh, 1.0 - cfg.gp_reflectance);
    lose(yv, 1.0 - cfg.gp_reflectance);
  }
  if (cfg.variant == Variant::SinglePhotonAncilla) {
    lose(rh, cfg.transmittance);
    lose(rv, cfg.transmittance);
  }

  std::vector<std::pair<int, int>> e_pairs, f_pairs;
  const std::vector<std::pair<int, int>> g_pairs = {{yh, yv}};
  std::vector<int> e_modes, f_h, g_modes = {yh, yv};
  if (direct) {
    e_pairs = {{0, 1}};
    e_modes = {0, 1};
  } else {
    // HWP at 45 degrees on R, temporal mismatch, then the PBS, which swaps
    // the V components of the A and R slots.
    Dense m = on_pairs(modes, {{4, 5}, {6, 7}}, (Eigen::Matrix2cd() << 0, 1, 1, 0).finished());
    const double s = gaussian_overlap(cfg), c = std::sqrt(1.0 - s * s);
    Dense split = Dense::Identity(modes, modes);
    for (auto [m0, m1] : {std::pair{4, 6}, std::pair{5, 7}}) {
      split(m0, m0) = s;
      split(m1, m0) = c;
      split(m0, m1) = -c;
      split(m1, m1) = s;
    }
    Dense swap = Dense::Identity(modes, modes);
    for (auto [a, b] : {std::pair{1, 5}, std::pair{3, 7}}) {
      swap(a, a) = swap(b, b) = 0.0;
      swap(a, b) = swap(b, a) = 1.0;
    }
    const Dense total = swap * split * m;
    rho = conjugate(sp.passive({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, total), rho);
    e_pairs = {{0, 1}, {2, 3}};
    f_pairs = {{4, 5}, {6, 7}};
    e_modes = {0, 1, 2, 3};
    f_h = {4, 6};
  }

  std::vector<int> all(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) all[static_cast<std::size_t>(k)] = k;

  // Herald branches: |D>_F, and optionally |Dbar>_F with Z on E.
  std::vector<Dense> branches;
  if (direct) {
    branches.push_back(rho);
  } else {
    branches.push_back(conjugate(sp.passive(all, on_pairs(modes, f_pairs, to_h(jones(AnalyzerBasis::D)))), rho));
    if (cfg.include_dbar_branch) {
      Eigen::Matrix2cd z;
      z << 1, 0, 0, -1;
      const Dense m = on_pairs(modes, f_pairs, to_h(jones(AnalyzerBasis::A))) * on_pairs(modes, e_pairs, z);
      branches.push_back(conjugate(sp.passive(all, m), rho));
    }
  }

  const Detector det_e_open{e_modes, cfg.eta, cfg.dark_e};
  const Detector det_g_open{g_modes, cfg.eta_g, cfg.dark_g};
  std::vector<int> e_h, g_h = {yh};
  for (auto [h, v] : e_pairs) e_h.push_back(h);
  const Detector det_e{e_h, cfg.eta, cfg.dark_e};
  const Detector det_f{f_h, cfg.eta, cfg.dark_f};
  const Detector det_g{g_h, cfg.eta_g, cfg.dark_g};

  std::vector<Detector> open = {det_e_open, det_g_open};
  std::vector<Detector> analyzed = {det_e, det_g};
  if (!direct) {
    open.push_back(det_f);
    analyzed.push_back(det_f);
  }

  std::array<Sparse, 6> rot_e, rot_g;
  for (auto b : kAnalyzerBases) {
    rot_e[static_cast<std::size_t>(b)] = sp.passive(all, on_pairs(modes, e_pairs, to_h(jones(b))));
    rot_g[static_cast<std::size_t>(b)] = sp.passive(all, on_pairs(modes, g_pairs, to_h(jones(b))));
  }

  OracleOutcome out;
  for (const Dense& br : branches) {
    out.success_probability += all_click(sp, br.diagonal(), open);
    for (auto a : kAnalyzerBases) {
      const Dense ra = conjugate(rot_e[static_cast<std::size_t>(a)], br);
      for (auto b : kAnalyzerBases) {
        const Sparse& u = rot_g[static_cast<std::size_t>(b)];
        const Dense left = u * ra;
        const Eigen::VectorXcd diag = left.cwiseProduct(Dense(u).conjugate()).rowwise().sum();
        at(out.coincidences, a, b) += all_click(sp, diag, analyzed);
      }
    }
  }
  return out;
}

OracleReport oracle_check(const ExperimentConfig& cfg, double tolerance) {
  OracleReport r;
  for (double phase : cfg.phases) {
    const ProtocolOutcome engine = run_fixed_phase(cfg, 0.0, phase);
    const OracleOutcome ref = oracle_fixed_phase(cfg, 0.0, phase);
    auto note = [&r](double a, double b) {
      r.max_deviation = std::max(r.max_deviation, std::abs(a - b));
      ++r.compared;
    };
    note(engine.success_probability, ref.success_probability);
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) note(engine.coincidences[a][b], ref.coincidences[a][b]);
  }
  r.passed = r.max_deviation <= tolerance;
  return r;
}

ExperimentConfig random_oracle_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  auto log_uni = [&uni](double lo, double hi) { return std::exp(uni(std::log(lo), std::log(hi))); };
  ExperimentConfig c;
  const Variant variants[] = {Variant::CounterPropagating, Variant::ForwardAllFromBob,
                              Variant::SinglePhotonAncilla, Variant::DirectNoDfs};
  c.variant = variants[rng() % 4];
  c.source = rng() % 3 == 0 ? SourceKind::Pair : SourceKind::Spdc;
  c.cutoff = 2 + static_cast<int>(rng() % 2);
  c.pair_cutoff = 1 + static_cast<int>(rng() % 2);
  c.gamma = log_uni(1e-3, 0.2);
  c.mu = log_uni(1e-2, 0.8);
  c.transmittance = log_uni(0.01, 1.0);
  c.eta = uni(0.05, 1.0);
  c.eta_g = uni(0.05, 1.0);
  c.dark_e = rng() % 2 ? log_uni(1e-6, 1e-2) : 0.0;
  c.dark_f = rng() % 2 ? log_uni(1e-6, 1e-2) : 0.0;
  c.dark_g = log_uni(1e-6, 1e-2);
  c.s0 = uni(0.3, 1.0);
  c.sigma_um = uni(50.0, 200.0);
  c.delay_um = uni(-100.0, 100.0);
  c.gp_reflectance = uni(0.01, 0.5);
  c.phase_delta = uni(-0.3, 0.3);
  c.phases = {uni(0.0, 2.0 * kPi)};
  const double th = uni(0.0, kPi), ph = uni(0.0, 2.0 * kPi);
  c.alpha = std::cos(th / 2.0);
  c.beta = std::polar(std::sin(th / 2.0), ph);
  c.include_dbar_branch = rng() % 2 == 1;
  c.validate();
  return c;
}

}  // namespace dfsim
