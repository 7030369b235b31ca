#include "gcsim/rng.hpp"

#include <cmath>

#include "gcsim/errors.hpp"

namespace gcsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t replication, StreamLabel label,
                     std::uint64_t cell) {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ replication);
    h = splitmix64(h ^ static_cast<std::uint64_t>(label));
    h = splitmix64(h ^ cell);
    gen_.seed(h);
}

double RngStream::uniform01() {
    // 53-bit mantissa mapped into [0, 1); zero is rejected so logs stay finite.
    double u;
    do {
        u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_below: n must be positive");
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
    for (;;) {
        std::uint64_t r = gen_();
        if (r >= threshold) return r % n;
    }
}

double draw_exponential(RngStream& stream, double rate) {
    if (!(rate > 0)) throw DomainError("draw_exponential: rate must be positive");
    return -std::log(stream.uniform01()) / rate;
}

} // namespace gcsim
