#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "levdyn/model.hpp"

namespace levdyn {

using Rng = std::mt19937_64;

/// Deterministic child seed for an independent stream (splitmix64 mixing).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform draw from the box [1, 1 + gamma]^N.
inline std::vector<double> sample_box(const ModelParams& params, Rng& rng) {
  std::uniform_real_distribution<double> u(1.0, params.market.cap());
  std::vector<double> x(params.n_banks());
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace levdyn
