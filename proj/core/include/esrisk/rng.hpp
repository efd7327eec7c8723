#pragma once

#include <array>
#include <cstdint>

namespace esrisk {

// SplitMix64 finalizer (Steele/Lea/Flood). Used both to seed generator state
// and to derive independent stream seeds from (master, indices).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna, public domain reference implementation).
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : state_) {
            z = splitmix64_mix(z);
            word = z;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform draw in the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_;
};

// Stream seed for replication `rep` of the `size_index`-th sample size.
// A pure function of its arguments, independent of scheduling, so any worker
// can reproduce a replication in isolation.
inline std::uint64_t replication_seed(std::uint64_t master_seed,
                                      std::uint64_t size_index,
                                      std::uint64_t rep_index) {
    std::uint64_t h = splitmix64_mix(master_seed);
    h = splitmix64_mix(h ^ (size_index + 1));
    h = splitmix64_mix(h ^ (rep_index + 1));
    return h;
}

}  // namespace esrisk
