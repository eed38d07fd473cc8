#pragma once

// Multimode bosonic pure states in the occupation-number basis.
//
// A state is a sparse map from occupation tuples (one entry per registered
// mode) to complex amplitudes, truncated at a total photon number. Linear
// optical elements act by substituting creation operators, which keeps the
// total photon number fixed; loss is represented by an isometry into fresh
// loss modes that are later traced out.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dfsim {

using Amplitude = std::complex<double>;
using Occupation = std::vector<std::uint8_t>;

enum class Pol : std::uint8_t { H = 0, V = 1 };
enum class Temporal : std::uint8_t { Matched = 0, Orthogonal = 1 };

/// Amplitudes below this magnitude are dropped from a state.
inline constexpr double kPruneThreshold = 1e-15;
inline constexpr int kDefaultCutoff = 4;

struct ModeKey {
  std::string label;
  Pol pol = Pol::H;
  Temporal temporal = Temporal::Matched;

  auto operator<=>(const ModeKey&) const = default;
  std::string str() const;
};

struct LabelSpec {
  std::string label;
  bool split_temporal = false;
};

class ModeRegistry {
 public:
  ModeRegistry() = default;

  std::size_t size() const noexcept { return modes_.size(); }
  const ModeKey& mode(std::size_t i) const { return modes_.at(i); }
  const std::vector<ModeKey>& modes() const noexcept { return modes_; }

  /// Throws ConfigError for an unknown triple.
  std::size_t index(std::string_view label, Pol pol,
                    Temporal temporal = Temporal::Matched) const;
  std::optional<std::size_t> find(std::string_view label, Pol pol,
                                  Temporal temporal = Temporal::Matched) const;

  bool has_label(std::string_view label) const;
  bool is_split(std::string_view label) const;
  /// All modes carrying `label`, in registry order.
  std::vector<std::size_t> modes_of(std::string_view label) const;
  std::vector<std::string> labels() const;

  friend ModeRegistry make_registry(std::span<const LabelSpec> spec);

 private:
  std::vector<ModeKey> modes_;
  std::map<ModeKey, std::size_t> index_;
  std::map<std::string, bool, std::less<>> labels_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

/// H and V modes per label, plus orthogonal temporal twins where flagged.
ModeRegistry make_registry(std::span<const LabelSpec> spec);
RegistryPtr make_registry_ptr(std::span<const LabelSpec> spec);

/// Linear map on creation operators: a_in^dag -> sum_out M(out, in) a_out^dag.
///
/// Column j of the matrix is the image of input mode j, so the same matrix
/// acts on single-photon amplitudes and on coherent-state amplitudes.
class ModeTransform {
 public:
  /// Throws ValidationError unless M^dag M = I within 1e-12 elementwise.
  ModeTransform(std::vector<std::size_t> inputs, std::vector<std::size_t> outputs,
                Eigen::MatrixXcd matrix);

  static ModeTransform identity(std::vector<std::size_t> modes);

  const std::vector<std::size_t>& inputs() const noexcept { return inputs_; }
  const std::vector<std::size_t>& outputs() const noexcept { return outputs_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

  /// Same input and output mode sets (and therefore unitary).
  bool is_lossless() const;
  /// Outputs that are not also inputs; they must be vacuum when applied.
  std::vector<std::size_t> fresh_outputs() const;

 private:
  std::vector<std::size_t> inputs_;
  std::vector<std::size_t> outputs_;
  Eigen::MatrixXcd matrix_;
};

/// `second` applied after `first`.
ModeTransform compose(const ModeTransform& second, const ModeTransform& first);

class FockStateVector {
 public:
  using Terms = std::map<Occupation, Amplitude>;

  /// The zero vector (no terms).
  FockStateVector(RegistryPtr registry, int cutoff);

  static FockStateVector vacuum(RegistryPtr registry, int cutoff);
  /// Normalized basis state with the given photons per mode.
  static FockStateVector basis(RegistryPtr registry, int cutoff,
                               std::span<const std::pair<std::size_t, int>> photons);

  const ModeRegistry& registry() const noexcept { return *registry_; }
  const RegistryPtr& registry_ptr() const noexcept { return registry_; }
  int cutoff() const noexcept { return cutoff_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  /// Weight dropped by truncation while building this state.
  double truncated_weight() const noexcept { return truncated_weight_; }

  Amplitude amplitude(const Occupation& occ) const;
  /// Accumulates into a term; terms over the cutoff are counted as truncated.
  void add(const Occupation& occ, Amplitude amp);
  void add_truncated_weight(double w) noexcept { truncated_weight_ += w; }

  double norm_squared() const;
  FockStateVector scaled(Amplitude factor) const;
  FockStateVector normalized() const;
  /// Modes with a nonzero occupation in at least one term.
  std::vector<std::size_t> support() const;
  /// Drops terms with magnitude below kPruneThreshold.
  void prune();

 private:
  RegistryPtr registry_;
  int cutoff_ = kDefaultCutoff;
  Terms terms_;
  double truncated_weight_ = 0.0;
};

int total_photons(const Occupation& occ);

FockStateVector apply_transform(const FockStateVector& state, const ModeTransform& t);
FockStateVector tensor(const FockStateVector& a, const FockStateVector& b);
FockStateVector project_occupation(const FockStateVector& state, std::size_t mode, int n);
/// a^dag on one mode; the result is dropped into the truncation weight if it
/// exceeds the cutoff.
FockStateVector create(const FockStateVector& state, std::size_t mode);
FockStateVector add(const FockStateVector& a, const FockStateVector& b);
double norm_squared(const FockStateVector& state);
Amplitude inner_product(const FockStateVector& a, const FockStateVector& b);
/// |<a|b>| == |a||b| within tol, i.e. equal up to a global phase.
bool equal_up_to_phase(const FockStateVector& a, const FockStateVector& b,
                       double tol = 1e-10);
/// Largest elementwise amplitude difference.
double max_abs_difference(const FockStateVector& a, const FockStateVector& b);

/// Two-qubit polarization matrix over {HH, HV, VH, VV}.
struct PolarizationDensityMatrix {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

  double trace() const { return rho.trace().real(); }
  bool is_hermitian(double tol = 1e-12) const;
  double min_eigenvalue() const;
  /// Trace one; throws UndefinedError on an empty matrix.
  PolarizationDensityMatrix normalized() const;
  std::complex<double> at(Pol a, Pol b, Pol c, Pol d) const {
    return rho(2 * int(a) + int(b), 2 * int(c) + int(d));
  }
};

/// Projects onto one photon per spatial label and traces out everything else
/// (other modes and the temporal index of the two kept photons). The trace
/// of the result is the probability of that sector.
PolarizationDensityMatrix reduce_to_polarization_dm(const FockStateVector& state,
                                                    std::string_view label_a,
                                                    std::string_view label_b);

Eigen::Vector4cd phi_plus();
PolarizationDensityMatrix pure_dm(const Eigen::Vector4cd& psi);
/// <target|rho|target> after normalizing rho. Throws UndefinedError if rho is empty.
double fidelity(const PolarizationDensityMatrix& dm, const Eigen::Vector4cd& target);
double fidelity_to_phi_plus(const PolarizationDensityMatrix& dm);
double trace_distance(const PolarizationDensityMatrix& a, const PolarizationDensityMatrix& b);

/// Product coherent state tracked by its amplitude vector. Linear optics maps
/// coherent states to coherent states, so this can pass through elements
/// without any Fock truncation and be materialized late.
class CoherentField {
 public:
  explicit CoherentField(RegistryPtr registry) : registry_(std::move(registry)) {}

  void set(std::size_t mode, Amplitude alpha);
  Amplitude amplitude(std::size_t mode) const;
  const std::map<std::size_t, Amplitude>& amplitudes() const noexcept { return amps_; }
  double mean_photon_number() const;
  double mean_photon_number(std::span<const std::size_t> modes) const;
  const RegistryPtr& registry_ptr() const noexcept { return registry_; }

 private:
  RegistryPtr registry_;
  std::map<std::size_t, Amplitude> amps_;
};

CoherentField apply_transform(const CoherentField& field, const ModeTransform& t);

/// Fock expansion of the field restricted to `modes`, truncated at `cutoff`
/// total photons (not renormalized; the tail goes into truncated_weight).
/// Field amplitudes on other modes are discarded, which equals tracing them
/// out because the field is a product state.
FockStateVector materialize(const CoherentField& field, std::span<const std::size_t> modes,
                            int cutoff);

}  // namespace dfsim
