#pragma once

#include <array>
#include <cstdint>

namespace orthorot {

// Philox4x32-10 counter-based generator (Salmon et al. 2011 constants).
// Counter-based so independent streams can be carved out of one seed by
// counter packing alone; no state has to be skipped or shared between
// threads, which is what makes the outputs independent of scheduling.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// One logical stream of a seeded generator. `domain` separates unrelated
// consumers (simulation noise vs solver constants), `stream` identifies the
// consumer instance (schedule/replicate/stage/row packing for perturbation).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain);

  std::uint64_t next_u64();
  // uniform on [0, 1), 53-bit mantissa
  double uniform01();
  // uniform on [-1, 1)
  double uniform_sym();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint32_t domain_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_words_ = 0;
};

namespace rng_domain {
inline constexpr std::uint32_t simulation = 0;
inline constexpr std::uint32_t solver = 1;
}  // namespace rng_domain

}  // namespace orthorot
