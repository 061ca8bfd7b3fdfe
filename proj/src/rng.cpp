#include "kefdr/rng.hpp"

#include <cmath>

#include "kefdr/errors.hpp"

namespace kefdr {

double Rng::gauss() {
    if (has_cache_) {
        has_cache_ = false;
        return cache_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    has_cache_ = true;
    return r * std::cos(a);
}

int Rng::below(int n) {
    if (n <= 0) throw DomainError("Rng::below: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = ~0ULL - ~0ULL % un;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return static_cast<int>(v % un);
}

} // namespace kefdr
