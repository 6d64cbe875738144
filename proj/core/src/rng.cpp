#include "orthorot/rng.hpp"

namespace orthorot {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t prod = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> c = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      domain_(domain) {}

std::uint64_t RngStream::next_u64() {
  if (buffered_words_ < 2) {
    // counter = (block index, domain, stream lo, stream hi); every
    // (seed, domain, stream, block) combination is a distinct counter value.
    // 2^32 blocks = 2^33 doubles per stream before the index wraps.
    std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(block_index_),
        domain_,
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
    };
    buffer_ = philox4x32(counter, key_);
    buffered_words_ = 4;
    ++block_index_;
  }
  buffered_words_ -= 2;
  std::uint64_t hi = buffer_[static_cast<std::size_t>(buffered_words_)];
  std::uint64_t lo = buffer_[static_cast<std::size_t>(buffered_words_) + 1];
  return (hi << 32) | lo;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_sym() {
  return 2.0 * uniform01() - 1.0;
}

}  // namespace orthorot
