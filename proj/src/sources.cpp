#include "dfsim/sources.hpp"

#include <cmath>

#include "dfsim/errors.hpp"

namespace dfsim {

FockStateVector spdc_state(const SpdcParams& p, RegistryPtr reg, std::string_view a,
                           std::string_view b, int cutoff) {
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (p.pair_cutoff < 1) throw ConfigError("pair cutoff must be at least 1");
  const std::size_t ah = reg->index(a, Pol::H), av = reg->index(a, Pol::V);
  const std::size_t bh = reg->index(b, Pol::H), bv = reg->index(b, Pol::V);
  const int max_pairs = std::min(p.pair_cutoff, cutoff / 2);

  // sum_n gamma^{n/2} / n! (K^dag)^n |0>, built by repeated pair creation.
  FockStateVector power = FockStateVector::vacuum(reg, cutoff);
  FockStateVector sum = power;
  double coeff = 1.0;
  for (int n = 1; n <= max_pairs; ++n) {
    power = add(create(create(power, ah), bh), create(create(power, av), bv));
    coeff *= std::sqrt(p.gamma) / n;
    sum = add(sum, power.scaled(coeff));
  }
  FockStateVector out(reg, cutoff);
  const double kept = sum.norm_squared();
  for (const auto& [occ, amp] : sum.terms()) out.add(occ, amp / std::sqrt(kept));
  // The untruncated norm^2 is 1 / (1 - gamma)^2.
  out.add_truncated_weight(std::max(0.0, 1.0 - kept * (1.0 - p.gamma) * (1.0 - p.gamma)));
  out.prune();
  return out;
}

double spdc_pair_probability(double gamma, int k) {
  if (k < 0) return 0.0;
  return (k + 1) * std::pow(gamma, k) * (1.0 - gamma) * (1.0 - gamma);
}

FockStateVector encoded_pair_state(std::complex<double> alpha, std::complex<double> beta,
                                   RegistryPtr reg, std::string_view a, std::string_view b,
                                   int cutoff) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (!(n > 0.0)) throw ConfigError("encoded qubit amplitudes must not both vanish");
  if (cutoff < 2) throw ConfigError("encoded pair needs a cutoff of at least 2");
  FockStateVector out(reg, cutoff);
  Occupation hh(reg->size(), 0), vv(reg->size(), 0);
  hh[reg->index(a, Pol::H)] = hh[reg->index(b, Pol::H)] = 1;
  vv[reg->index(a, Pol::V)] = vv[reg->index(b, Pol::V)] = 1;
  out.add(hh, alpha / std::sqrt(n));
  out.add(vv, beta / std::sqrt(n));
  out.prune();
  return out;
}

FockStateVector single_photon_state(const JonesVector& pol, RegistryPtr reg, std::string_view label,
                                    int cutoff) {
  if (cutoff < 1) throw ConfigError("single photon needs a cutoff of at least 1");
  const JonesVector u = pol.normalized();
  FockStateVector out(reg, cutoff);
  Occupation h(reg->size(), 0), v(reg->size(), 0);
  h[reg->index(label, Pol::H)] = 1;
  v[reg->index(label, Pol::V)] = 1;
  out.add(h, u(0));
  out.add(v, u(1));
  out.prune();
  return out;
}

CoherentField coherent_field(const CoherentParams& p, RegistryPtr reg, std::string_view label) {
  if (!(p.mean_photons >= 0.0)) throw ConfigError("mean photon number must be nonnegative");
  CoherentField field(reg);
  const JonesVector u = p.polarization.normalized();
  const double amp = std::sqrt(p.mean_photons);
  field.set(reg->index(label, Pol::H), amp * u(0));
  field.set(reg->index(label, Pol::V), amp * u(1));
  return field;
}

FockStateVector coherent_state(const CoherentParams& p, RegistryPtr reg, std::string_view label,
                               int cutoff) {
  const CoherentField field = coherent_field(p, reg, label);
  const std::size_t modes[] = {reg->index(label, Pol::H), reg->index(label, Pol::V)};
  return materialize(field, modes, cutoff);
}

}  // namespace dfsim
