#pragma once

#include <cstdint>
#include <random>

namespace vmma {

/// Deterministic stream splitter.
///
/// A stream is identified by a 64-bit key. Substreams are derived by hashing
/// (key, index) with the splitmix64 finalizer, so any tree of substreams is
/// reproducible from the master seed alone and substreams with different
/// paths are statistically independent. Engines created from distinct keys
/// may be consumed concurrently; RngStream itself is an immutable value.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    /// Substream `index` of this stream.
    RngStream child(std::uint64_t index) const {
        // golden-ratio increment, then two finalizer rounds
        std::uint64_t z = key_ + 0x9e3779b97f4a7c15ULL * (index + 1);
        return RngStream(mix(mix(z)));
    }

    /// Fresh engine seeded from this stream's key.
    std::mt19937_64 engine() const { return std::mt19937_64(mix(key_ ^ 0x5851f42d4c957f2dULL)); }

    std::uint64_t key() const { return key_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
};

} // namespace vmma
