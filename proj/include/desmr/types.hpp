#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace desmr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Derives an independent child seed from (seed, stream) via splitmix64.
/// Used everywhere a component needs its own RNG stream (one per node,
/// per repetition, ...) so that streams never overlap.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace desmr
