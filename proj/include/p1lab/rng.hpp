#pragma once

// Splittable counter-based generator (splitmix64 over key xor counter).
// Every sampled report records its seed, so estimates are reproducible.

#include <cstdint>

namespace p1lab {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * (++ctr_)); }

    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) {
        return next() % bound; // modulo bias immaterial at desk scale
    }

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
    std::uint64_t ctr_ = 0;
};

} // namespace p1lab
