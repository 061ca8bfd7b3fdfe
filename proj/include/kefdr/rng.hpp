#ifndef KEFDR_RNG_HPP
#define KEFDR_RNG_HPP

#include <cstdint>

namespace kefdr {

// splitmix64 output mix applied to a counter-like state. Pure integer ops,
// so streams are bit-reproducible across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Documented seed derivation: stream i of a master seed is
// mix64(master + (i+1) * golden_gamma). Replication results therefore do not
// depend on execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller; pairs are cached
    double gauss();

    // uniform integer in [0, n), rejection sampling
    int below(int n);

private:
    std::uint64_t state_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

} // namespace kefdr

#endif
