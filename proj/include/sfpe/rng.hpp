#pragma once

#include <cstdint>

namespace sfpe {

// SplitMix64 finalizer (Steele, Lea & Flood; same mixer as Java's
// SplittableRandom). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Purpose tags keeping substreams of unrelated consumers disjoint.
enum class StreamDomain : std::uint64_t {
  kPopDyn = 1,       // pool element (level, index)
  kOracle = 2,       // exact-sampler draw
  kDiagnostics = 3,  // experiment orchestration
  kBootstrap = 4,    // bootstrap resamples
};

// Substream seed derivation: one master seed plus a (domain, a, b) address.
// Each coordinate is folded through the SplitMix64 finalizer, so every
// substream is an independently-placed counter offset of a single PRF.
constexpr std::uint64_t substream_seed(std::uint64_t master, StreamDomain domain,
                                       std::uint64_t a,
                                       std::uint64_t b) noexcept {
  std::uint64_t h = mix64(master ^ (static_cast<std::uint64_t>(domain) * kGolden));
  h = mix64(h ^ ((a + 1) * kGolden));
  h = mix64(h ^ ((b + 1) * kGolden));
  return h;
}

// SplitMix64 stream. Output t of the stream seeded with s is
// mix64(s + (t+1)*kGolden): counter mode, so streams never share state and
// construction is free. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on the open interval (0,1): midpoints (j + 1/2) * 2^-53.
  // Never returns 0 or 1, which keeps log(u) and quantile(u) total.
  double u01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n). Lemire multiply-shift with rejection.
  std::uint64_t uniform_index(std::uint64_t n) noexcept {
    unsigned __int128 prod =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    auto low = static_cast<std::uint64_t>(prod);
    if (low < n) {
      const std::uint64_t cutoff = (0 - n) % n;
      while (low < cutoff) {
        prod = static_cast<unsigned __int128>(next_u64()) *
               static_cast<unsigned __int128>(n);
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  // Derive a fresh independent key from this stream.
  std::uint64_t split() noexcept { return next_u64(); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~0ull; }
  result_type operator()() noexcept { return next_u64(); }

 private:
  std::uint64_t state_;
};

}  // namespace sfpe
