#pragma once

#include <array>
#include <cstdint>

namespace smca {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic per-path random stream. Streams are derived from
/// (master_seed, stream_index), so path i can be re-sampled bit for bit
/// without replaying paths 0..i-1. Generator is xoshiro256++ seeded
/// through splitmix64; doubles are built directly from the high 53 bits,
/// keeping output identical across platforms and standard libraries.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t mix = master_seed;
        (void)detail::splitmix64(mix);
        mix ^= stream_index + 0x9e3779b97f4a7c15ull + (mix << 6) + (mix >> 2);
        for (auto& word : s_) word = detail::splitmix64(mix);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1; // xoshiro state must be nonzero
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_;
};

} // namespace smca
