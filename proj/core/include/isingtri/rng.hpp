#pragma once

#include <cstdint>

namespace isingtri {

// Counter-based generator: output n = mix(key, n). Streams derived from
// (seed, stream) are independent for all practical purposes and a run is
// reproducible from its (seed, stream) pair alone, regardless of how many
// draws other runs consumed.
class CounterRng {
  public:
    CounterRng() : CounterRng(0, 0) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        key_ = mix64(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix64(stream * 0xbf58476d1ce4e5b9ULL + 1);
        ctr_ = 0;
    }

    std::uint64_t next_u64() {
        std::uint64_t x = key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL;
        return mix64(x);
    }

    // uniform in [0,1)
    double next_double() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in {0,...,n-1}, n > 0
    std::uint64_t next_below(std::uint64_t n) {
        // multiply-shift; bias < 2^-64, irrelevant at our sample sizes
        unsigned __int128 m = (unsigned __int128)next_u64() * n;
        return (std::uint64_t)(m >> 64);
    }

    std::uint64_t counter() const { return ctr_; }

  private:
    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27; z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
};

} // namespace isingtri
