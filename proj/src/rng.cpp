#include "relstoch/rng.hpp"

namespace relstoch {

namespace {

std::seed_seq make_seq(std::uint64_t base_seed, StreamPurpose purpose, std::uint64_t index) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffULL); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  const auto p = static_cast<std::uint64_t>(purpose);
  return std::seed_seq{lo(base_seed), hi(base_seed), lo(p), hi(p), lo(index), hi(index)};
}

}  // namespace

GaussianStream::GaussianStream(std::uint64_t base_seed, StreamPurpose purpose,
                               std::uint64_t index) {
  auto seq = make_seq(base_seed, purpose, index);
  engine_.seed(seq);
}

}  // namespace relstoch
