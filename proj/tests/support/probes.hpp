#pragma once

// Seeded random inputs shared by the unit tests.

#include <complex>
#include <random>
#include <vector>

#include "alone/kspace.hpp"
#include "alone/tensor.hpp"

namespace alone::testing {

inline ComplexVolume random_volume(const Dims& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexVolume v(d);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    v[i] = {re, im};
  }
  return v;
}

inline std::vector<cx> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<cx> v(n);
  for (cx& c : v) {
    const double re = dist(rng);
    const double im = dist(rng);
    c = {re, im};
  }
  return v;
}

inline KSpaceData random_kspace(const SamplingDescriptor& desc, std::uint64_t seed) {
  return {desc, random_vector(desc.n_samples, seed)};
}

inline double relative_difference(const ComplexVolume& a, const ComplexVolume& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace alone::testing
