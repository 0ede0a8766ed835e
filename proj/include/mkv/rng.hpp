#pragma once

#include <cstdint>
#include <limits>

namespace mkv {

/// What a stream is used for. Part of the stream key, so the same particle gets
/// unrelated draws for its initial segment, media and Brownian increments.
enum class Purpose : std::uint32_t {
  Initial = 1,
  Media = 2,
  Brownian = 3,
  Subsample = 4,
  Dictionary = 5,
  Probe = 6,
  Bootstrap = 7,
  Generic = 8,
};

/// SplitMix64 as a counter-based generator: output k is a bijective mix of
/// key + k * gamma, so a stream is fully determined by its key.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Identifies one reproducible random stream:
/// (master_seed, replicate, particle, purpose).
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;
  std::uint64_t particle = 0;
  Purpose purpose = Purpose::Generic;

  RngStream with(std::uint64_t particle_id, Purpose p) const {
    return RngStream{master_seed, replicate, particle_id, p};
  }
  RngStream with_replicate(std::uint64_t rep) const {
    return RngStream{master_seed, rep, particle, purpose};
  }

  /// Same stream layout under an unrelated master seed; used to give each
  /// sub-experiment (fresh noise, bootstrap, replicate sweep) its own noise.
  RngStream fork(std::uint64_t tag) const {
    return RngStream{SplitMix64::mix(master_seed ^ SplitMix64::mix(tag + 0x510E527FADE682D1ULL)), replicate,
                     particle, purpose};
  }

  std::uint64_t key() const;
  SplitMix64 engine() const { return SplitMix64(key()); }
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(SplitMix64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace mkv
