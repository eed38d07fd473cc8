#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dfsim/fock.hpp"

namespace dfsim::testing {

inline RegistryPtr registry(std::initializer_list<LabelSpec> labels) {
  std::vector<LabelSpec> v(labels);
  return make_registry_ptr(v);
}

/// Random normalized state with support on `modes` and at most `max_photons`.
inline FockStateVector random_state(RegistryPtr reg, std::vector<std::size_t> modes,
                                    int max_photons, int cutoff, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(modes.size()) - 1);
  FockStateVector s(reg, cutoff);
  for (int k = 0; k < 6; ++k) {
    Occupation occ(reg->size(), 0);
    std::uniform_int_distribution<int> n(0, max_photons);
    const int photons = n(rng);
    for (int p = 0; p < photons; ++p) ++occ[modes[static_cast<std::size_t>(pick(rng))]];
    s.add(occ, {g(rng), g(rng)});
  }
  return s.normalized();
}

/// Haar-ish random unitary from the QR decomposition of a Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace dfsim::testing
