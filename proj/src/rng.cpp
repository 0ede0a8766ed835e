#include "mkv/rng.hpp"

namespace mkv {

std::uint64_t RngStream::key() const {
  std::uint64_t h = SplitMix64::mix(master_seed ^ 0x6A09E667F3BCC908ULL);
  h = SplitMix64::mix(h ^ (replicate + 0xBB67AE8584CAA73BULL));
  h = SplitMix64::mix(h ^ (particle + 0x3C6EF372FE94F82BULL));
  h = SplitMix64::mix(h ^ (static_cast<std::uint64_t>(purpose) + 0xA54FF53A5F1D36F1ULL));
  return h;
}

}  // namespace mkv
