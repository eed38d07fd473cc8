#include "dfsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "dfsim/errors.hpp"

namespace dfsim {

namespace {

constexpr double kIsometryTol = 1e-12;

double sqrt_factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= std::sqrt(static_cast<double>(k));
  return r;
}

const char* pol_name(Pol p) { return p == Pol::H ? "H" : "V"; }

}  // namespace

std::string ModeKey::str() const {
  std::string s = label + ":" + pol_name(pol);
  if (temporal == Temporal::Orthogonal) s += "'";
  return s;
}

// ---------------------------------------------------------------------------
// ModeRegistry

ModeRegistry make_registry(std::span<const LabelSpec> spec) {
  ModeRegistry reg;
  for (const auto& entry : spec) {
    if (entry.label.empty()) throw ConfigError("empty mode label");
    if (reg.labels_.count(entry.label))
      throw ConfigError("duplicate mode label '" + entry.label + "'");
    reg.labels_.emplace(entry.label, entry.split_temporal);
    std::vector<Temporal> temporals{Temporal::Matched};
    if (entry.split_temporal) temporals.push_back(Temporal::Orthogonal);
    for (Temporal t : temporals) {
      for (Pol p : {Pol::H, Pol::V}) {
        ModeKey key{entry.label, p, t};
        reg.index_.emplace(key, reg.modes_.size());
        reg.modes_.push_back(std::move(key));
      }
    }
  }
  return reg;
}

RegistryPtr make_registry_ptr(std::span<const LabelSpec> spec) {
  return std::make_shared<const ModeRegistry>(make_registry(spec));
}

std::optional<std::size_t> ModeRegistry::find(std::string_view label, Pol pol,
                                              Temporal temporal) const {
  auto it = index_.find(ModeKey{std::string(label), pol, temporal});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ModeRegistry::index(std::string_view label, Pol pol, Temporal temporal) const {
  if (auto i = find(label, pol, temporal)) return *i;
  throw ConfigError("unknown mode " + ModeKey{std::string(label), pol, temporal}.str());
}

bool ModeRegistry::has_label(std::string_view label) const {
  return labels_.find(label) != labels_.end();
}

bool ModeRegistry::is_split(std::string_view label) const {
  auto it = labels_.find(label);
  return it != labels_.end() && it->second;
}

std::vector<std::size_t> ModeRegistry::modes_of(std::string_view label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].label == label) out.push_back(i);
  return out;
}

std::vector<std::string> ModeRegistry::labels() const {
  std::vector<std::string> out;
  for (const auto& m : modes_)
    if (out.empty() || out.back() != m.label) out.push_back(m.label);
  return out;
}

// ---------------------------------------------------------------------------
// ModeTransform

ModeTransform::ModeTransform(std::vector<std::size_t> inputs, std::vector<std::size_t> outputs,
                             Eigen::MatrixXcd matrix)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != static_cast<Eigen::Index>(outputs_.size()) ||
      matrix_.cols() != static_cast<Eigen::Index>(inputs_.size()))
    throw ValidationError("transform matrix shape does not match its mode lists");
  if (std::set<std::size_t>(inputs_.begin(), inputs_.end()).size() != inputs_.size() ||
      std::set<std::size_t>(outputs_.begin(), outputs_.end()).size() != outputs_.size())
    throw ValidationError("transform mode lists contain duplicates");
  if (!matrix_.allFinite()) throw ValidationError("transform matrix is not finite");
  const Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  const double dev = gram.rows() == 0 ? 0.0 : (gram - eye).cwiseAbs().maxCoeff();
  if (dev > kIsometryTol) {
    std::ostringstream os;
    os << "transform is not an isometry (max |M^dag M - I| = " << dev << ")";
    throw ValidationError(os.str());
  }
}

ModeTransform ModeTransform::identity(std::vector<std::size_t> modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  return ModeTransform(modes, modes, Eigen::MatrixXcd::Identity(n, n));
}

bool ModeTransform::is_lossless() const {
  return std::set<std::size_t>(inputs_.begin(), inputs_.end()) ==
         std::set<std::size_t>(outputs_.begin(), outputs_.end());
}

std::vector<std::size_t> ModeTransform::fresh_outputs() const {
  std::vector<std::size_t> out;
  for (auto o : outputs_)
    if (std::find(inputs_.begin(), inputs_.end(), o) == inputs_.end()) out.push_back(o);
  return out;
}

ModeTransform compose(const ModeTransform& second, const ModeTransform& first) {
  // Embed both maps into the union of all touched modes; modes a map does not
  // take as input pass through unchanged.
  std::set<std::size_t> all;
  for (const auto* t : {&first, &second}) {
    all.insert(t->inputs().begin(), t->inputs().end());
    all.insert(t->outputs().begin(), t->outputs().end());
  }
  std::vector<std::size_t> modes(all.begin(), all.end());
  const auto n = static_cast<Eigen::Index>(modes.size());
  auto pos = [&](std::size_t m) {
    return static_cast<Eigen::Index>(std::lower_bound(modes.begin(), modes.end(), m) -
                                     modes.begin());
  };
  auto embed = [&](const ModeTransform& t) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t j = 0; j < t.inputs().size(); ++j) {
      const auto col = pos(t.inputs()[j]);
      e.col(col).setZero();
      for (std::size_t i = 0; i < t.outputs().size(); ++i)
        e(pos(t.outputs()[i]), col) = t.matrix()(i, j);
    }
    return e;
  };
  const Eigen::MatrixXcd full = embed(second) * embed(first);

  // Inputs of the composite: inputs of `first`, plus inputs of `second` that
  // `first` does not produce.
  std::vector<std::size_t> inputs = first.inputs();
  for (auto m : second.inputs()) {
    const bool produced = std::find(first.outputs().begin(), first.outputs().end(), m) !=
                          first.outputs().end();
    if (!produced && std::find(inputs.begin(), inputs.end(), m) == inputs.end())
      inputs.push_back(m);
  }
  std::vector<std::size_t> outputs;
  for (auto m : modes) {
    bool reached = false;
    for (auto in : inputs) reached = reached || std::abs(full(pos(m), pos(in))) > 0.0;
    if (reached) outputs.push_back(m);
  }
  Eigen::MatrixXcd m(outputs.size(), inputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i)
    for (std::size_t j = 0; j < inputs.size(); ++j)
      m(i, j) = full(pos(outputs[i]), pos(inputs[j]));
  return ModeTransform(std::move(inputs), std::move(outputs), std::move(m));
}

// ---------------------------------------------------------------------------
// FockStateVector

int total_photons(const Occupation& occ) {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

FockStateVector::FockStateVector(RegistryPtr registry, int cutoff)
    : registry_(std::move(registry)), cutoff_(cutoff) {
  if (!registry_) throw ConfigError("state requires a registry");
  if (cutoff_ < 0 || cutoff_ > 255) throw ConfigError("cutoff must be in [0, 255]");
}

FockStateVector FockStateVector::vacuum(RegistryPtr registry, int cutoff) {
  FockStateVector s(std::move(registry), cutoff);
  s.add(Occupation(s.registry().size(), 0), 1.0);
  return s;
}

FockStateVector FockStateVector::basis(RegistryPtr registry, int cutoff,
                                       std::span<const std::pair<std::size_t, int>> photons) {
  FockStateVector s(std::move(registry), cutoff);
  Occupation occ(s.registry().size(), 0);
  for (auto [mode, n] : photons) {
    if (mode >= occ.size()) throw ConfigError("basis state references an unknown mode");
    if (n < 0) throw ConfigError("negative photon number");
    occ[mode] = static_cast<std::uint8_t>(occ[mode] + n);
  }
  if (total_photons(occ) > cutoff) throw ConfigError("basis state exceeds the cutoff");
  s.add(occ, 1.0);
  return s;
}

Amplitude FockStateVector::amplitude(const Occupation& occ) const {
  auto it = terms_.find(occ);
  return it == terms_.end() ? Amplitude{} : it->second;
}

void FockStateVector::add(const Occupation& occ, Amplitude amp) {
  if (occ.size() != registry_->size())
    throw ValidationError("occupation tuple length does not match the registry");
  if (total_photons(occ) > cutoff_) {
    truncated_weight_ += std::norm(amp);
    return;
  }
  terms_[occ] += amp;
}

double FockStateVector::norm_squared() const {
  double n = 0.0;
  for (const auto& [occ, amp] : terms_) n += std::norm(amp);
  return n;
}

FockStateVector FockStateVector::scaled(Amplitude factor) const {
  FockStateVector out = *this;
  for (auto& [occ, amp] : out.terms_) amp *= factor;
  out.prune();
  return out;
}

FockStateVector FockStateVector::normalized() const {
  const double n = norm_squared();
  if (n <= 0.0) throw UndefinedError("cannot normalize the zero state");
  return scaled(1.0 / std::sqrt(n));
}

std::vector<std::size_t> FockStateVector::support() const {
  std::vector<bool> used(registry_->size(), false);
  for (const auto& [occ, amp] : terms_)
    for (std::size_t i = 0; i < occ.size(); ++i) used[i] = used[i] || occ[i] > 0;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (used[i]) out.push_back(i);
  return out;
}

void FockStateVector::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
}

namespace {

// Expansion of prod_j (a_j^dag)^{n_j} / sqrt(n_j!) with each a_j^dag replaced
// by sum_o M(o, j) a_o^dag, expressed on normalized output basis states.
using Expansion = std::vector<std::pair<Occupation, Amplitude>>;

Expansion expand(const Occupation& input_occ, const Eigen::MatrixXcd& m) {
  std::map<Occupation, Amplitude> poly;
  poly.emplace(Occupation(static_cast<std::size_t>(m.rows()), 0), 1.0);
  double input_norm = 1.0;
  for (std::size_t j = 0; j < input_occ.size(); ++j) {
    input_norm *= sqrt_factorial(input_occ[j]);
    for (int rep = 0; rep < input_occ[j]; ++rep) {
      std::map<Occupation, Amplitude> next;
      for (const auto& [mono, c] : poly) {
        for (Eigen::Index o = 0; o < m.rows(); ++o) {
          const Amplitude coeff = m(o, static_cast<Eigen::Index>(j));
          if (coeff == Amplitude{}) continue;
          Occupation grown = mono;
          ++grown[static_cast<std::size_t>(o)];
          next[grown] += c * coeff;
        }
      }
      poly = std::move(next);
    }
  }
  Expansion out;
  out.reserve(poly.size());
  for (auto& [mono, c] : poly) {
    double out_norm = 1.0;
    for (auto k : mono) out_norm *= sqrt_factorial(k);
    out.emplace_back(mono, c * out_norm / input_norm);
  }
  return out;
}

void require_same_registry(const FockStateVector& a, const FockStateVector& b) {
  if (a.registry_ptr() != b.registry_ptr() && a.registry().modes() != b.registry().modes())
    throw ValidationError("states live on different mode registries");
}

}  // namespace

FockStateVector apply_transform(const FockStateVector& state, const ModeTransform& t) {
  const std::size_t n_modes = state.registry().size();
  for (auto m : t.inputs())
    if (m >= n_modes) throw ValidationError("transform input mode not in registry");
  for (auto m : t.outputs())
    if (m >= n_modes) throw ValidationError("transform output mode not in registry");
  const auto fresh = t.fresh_outputs();

  FockStateVector out(state.registry_ptr(), state.cutoff());
  out.add_truncated_weight(state.truncated_weight());

  std::map<Occupation, Expansion> cache;
  Occupation key(t.inputs().size());
  for (const auto& [occ, amp] : state.terms()) {
    for (auto f : fresh)
      if (occ[f] != 0)
        throw ValidationError("transform output mode " + state.registry().mode(f).str() +
                              " must be vacuum");
    Occupation rest = occ;
    for (std::size_t j = 0; j < t.inputs().size(); ++j) {
      key[j] = occ[t.inputs()[j]];
      rest[t.inputs()[j]] = 0;
    }
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, expand(key, t.matrix())).first;
    for (const auto& [out_occ, coeff] : it->second) {
      Occupation next = rest;
      for (std::size_t i = 0; i < t.outputs().size(); ++i)
        next[t.outputs()[i]] = static_cast<std::uint8_t>(next[t.outputs()[i]] + out_occ[i]);
      out.add(next, amp * coeff);
    }
  }
  out.prune();
  return out;
}

FockStateVector tensor(const FockStateVector& a, const FockStateVector& b) {
  require_same_registry(a, b);
  if (a.cutoff() != b.cutoff()) throw ValidationError("tensor of states with different cutoffs");
  const auto sa = a.support();
  const auto sb = b.support();
  std::vector<std::size_t> both;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
  if (!both.empty())
    throw ValidationError("tensor of states with overlapping modes (" +
                          a.registry().mode(both.front()).str() + ")");
  FockStateVector out(a.registry_ptr(), a.cutoff());
  // Truncated weight of a product: 1 - (1 - wa)(1 - wb) for unit-norm factors.
  out.add_truncated_weight(a.truncated_weight() + b.truncated_weight() -
                           a.truncated_weight() * b.truncated_weight());
  for (const auto& [oa, xa] : a.terms()) {
    for (const auto& [ob, xb] : b.terms()) {
      Occupation occ(oa.size());
      for (std::size_t i = 0; i < occ.size(); ++i)
        occ[i] = static_cast<std::uint8_t>(oa[i] + ob[i]);
      out.add(occ, xa * xb);
    }
  }
  out.prune();
  return out;
}

FockStateVector project_occupation(const FockStateVector& state, std::size_t mode, int n) {
  if (mode >= state.registry().size()) throw ConfigError("projection onto an unknown mode");
  if (n < 0 || n > state.cutoff()) throw ConfigError("projection photon number outside [0, cutoff]");
  FockStateVector out(state.registry_ptr(), state.cutoff());
  for (const auto& [occ, amp] : state.terms())
    if (occ[mode] == n) out.add(occ, amp);
  return out;
}

FockStateVector create(const FockStateVector& state, std::size_t mode) {
  if (mode >= state.registry().size()) throw ConfigError("creation on an unknown mode");
  FockStateVector out(state.registry_ptr(), state.cutoff());
  out.add_truncated_weight(state.truncated_weight());
  for (const auto& [occ, amp] : state.terms()) {
    Occupation next = occ;
    ++next[mode];
    out.add(next, amp * std::sqrt(static_cast<double>(next[mode])));
  }
  return out;
}

FockStateVector add(const FockStateVector& a, const FockStateVector& b) {
  require_same_registry(a, b);
  FockStateVector out = a;
  for (const auto& [occ, amp] : b.terms()) out.add(occ, amp);
  out.add_truncated_weight(b.truncated_weight());
  out.prune();
  return out;
}

double norm_squared(const FockStateVector& state) { return state.norm_squared(); }

Amplitude inner_product(const FockStateVector& a, const FockStateVector& b) {
  require_same_registry(a, b);
  Amplitude r{};
  for (const auto& [occ, amp] : a.terms()) r += std::conj(amp) * b.amplitude(occ);
  return r;
}

bool equal_up_to_phase(const FockStateVector& a, const FockStateVector& b, double tol) {
  const double na = std::sqrt(a.norm_squared());
  const double nb = std::sqrt(b.norm_squared());
  if (std::abs(na - nb) > tol) return false;
  if (na == 0.0) return true;
  const Amplitude ip = inner_product(a, b);
  if (std::abs(ip) == 0.0) return false;
  const Amplitude phase = ip / std::abs(ip);
  return max_abs_difference(a.scaled(phase), b) <= tol;
}

double max_abs_difference(const FockStateVector& a, const FockStateVector& b) {
  double d = 0.0;
  for (const auto& [occ, amp] : a.terms()) d = std::max(d, std::abs(amp - b.amplitude(occ)));
  for (const auto& [occ, amp] : b.terms())
    if (!a.terms().count(occ)) d = std::max(d, std::abs(amp));
  return d;
}

// ---------------------------------------------------------------------------
// Polarization density matrices

bool PolarizationDensityMatrix::is_hermitian(double tol) const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double PolarizationDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (rho + rho.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PolarizationDensityMatrix PolarizationDensityMatrix::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw UndefinedError("density matrix has zero trace");
  return {rho / tr};
}

PolarizationDensityMatrix reduce_to_polarization_dm(const FockStateVector& state,
                                                    std::string_view label_a,
                                                    std::string_view label_b) {
  const auto& reg = state.registry();
  const auto modes_a = reg.modes_of(label_a);
  const auto modes_b = reg.modes_of(label_b);
  if (modes_a.empty() || modes_b.empty())
    throw ConfigError("reduction onto an unknown spatial label");

  // Environment key: the occupation with both kept photons removed, plus the
  // temporal component each kept photon occupied.
  std::map<Occupation, Eigen::Vector4cd> branches;
  for (const auto& [occ, amp] : state.terms()) {
    int count_a = 0, count_b = 0;
    std::size_t hit_a = 0, hit_b = 0;
    for (auto m : modes_a)
      if (occ[m]) count_a += occ[m], hit_a = m;
    for (auto m : modes_b)
      if (occ[m]) count_b += occ[m], hit_b = m;
    if (count_a != 1 || count_b != 1) continue;
    Occupation env = occ;
    env[hit_a] = 0;
    env[hit_b] = 0;
    env.push_back(static_cast<std::uint8_t>(reg.mode(hit_a).temporal));
    env.push_back(static_cast<std::uint8_t>(reg.mode(hit_b).temporal));
    const int idx = 2 * static_cast<int>(reg.mode(hit_a).pol) + static_cast<int>(reg.mode(hit_b).pol);
    auto [it, inserted] = branches.try_emplace(env, Eigen::Vector4cd::Zero());
    it->second(idx) += amp;
  }
  PolarizationDensityMatrix dm;
  for (const auto& [env, v] : branches) dm.rho += v * v.adjoint();
  return dm;
}

Eigen::Vector4cd phi_plus() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

PolarizationDensityMatrix pure_dm(const Eigen::Vector4cd& psi) { return {psi * psi.adjoint()}; }

double fidelity(const PolarizationDensityMatrix& dm, const Eigen::Vector4cd& target) {
  const auto n = dm.normalized();
  return (target.adjoint() * n.rho * target)(0, 0).real() / target.squaredNorm();
}

double fidelity_to_phi_plus(const PolarizationDensityMatrix& dm) {
  return fidelity(dm, phi_plus());
}

double trace_distance(const PolarizationDensityMatrix& a, const PolarizationDensityMatrix& b) {
  const Eigen::Matrix4cd diff = a.rho - b.rho;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (diff + diff.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Coherent fields

void CoherentField::set(std::size_t mode, Amplitude alpha) {
  if (mode >= registry_->size()) throw ConfigError("coherent amplitude on an unknown mode");
  if (alpha == Amplitude{})
    amps_.erase(mode);
  else
    amps_[mode] = alpha;
}

Amplitude CoherentField::amplitude(std::size_t mode) const {
  auto it = amps_.find(mode);
  return it == amps_.end() ? Amplitude{} : it->second;
}

double CoherentField::mean_photon_number() const {
  double n = 0.0;
  for (const auto& [m, a] : amps_) n += std::norm(a);
  return n;
}

double CoherentField::mean_photon_number(std::span<const std::size_t> modes) const {
  double n = 0.0;
  for (auto m : modes) n += std::norm(amplitude(m));
  return n;
}

CoherentField apply_transform(const CoherentField& field, const ModeTransform& t) {
  CoherentField out = field;
  for (auto m : t.fresh_outputs())
    if (field.amplitude(m) != Amplitude{})
      throw ValidationError("transform output mode must be vacuum in the coherent field");
  Eigen::VectorXcd in(t.inputs().size());
  for (std::size_t j = 0; j < t.inputs().size(); ++j) {
    in(static_cast<Eigen::Index>(j)) = field.amplitude(t.inputs()[j]);
    out.set(t.inputs()[j], 0.0);
  }
  const Eigen::VectorXcd result = t.matrix() * in;
  for (std::size_t i = 0; i < t.outputs().size(); ++i) {
    const Amplitude a = out.amplitude(t.outputs()[i]) + result(static_cast<Eigen::Index>(i));
    out.set(t.outputs()[i], std::abs(a) < kPruneThreshold ? Amplitude{} : a);
  }
  return out;
}

FockStateVector materialize(const CoherentField& field, std::span<const std::size_t> modes,
                            int cutoff) {
  FockStateVector state = FockStateVector::vacuum(field.registry_ptr(), cutoff);
  for (auto m : modes) {
    const Amplitude alpha = field.amplitude(m);
    if (alpha == Amplitude{}) continue;
    FockStateVector single(field.registry_ptr(), cutoff);
    Occupation occ(field.registry_ptr()->size(), 0);
    Amplitude term = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n <= cutoff; ++n) {
      occ[m] = static_cast<std::uint8_t>(n);
      single.add(occ, term);
      term *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    state = tensor(state, single);
  }
  // The dropped tail is whatever is missing from unit norm.
  FockStateVector out(field.registry_ptr(), cutoff);
  for (const auto& [occ, amp] : state.terms()) out.add(occ, amp);
  out.add_truncated_weight(std::max(0.0, 1.0 - out.norm_squared()));
  return out;
}

}  // namespace dfsim
