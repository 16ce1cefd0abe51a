#pragma once

#include <cstdint>
#include <random>

namespace relstoch {

/// Salts separating independent uses of one base seed.
enum class StreamPurpose : std::uint64_t {
  path_increments = 0x7061746800000000ULL,
  bridge = 0x6272696467650000ULL,
};

/// Deterministic Gaussian stream for one (base seed, purpose, index) key.
///
/// The key fully determines the sequence, so a path draws the same numbers no
/// matter which worker simulates it or in which order paths are visited.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t base_seed, StreamPurpose purpose, std::uint64_t index);

  double normal() { return dist_(engine_); }
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace relstoch
