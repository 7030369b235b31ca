#pragma once

#include <cstdint>
#include <random>

namespace gcsim {

/// Purpose tag for a random stream; part of the stream key.
enum class StreamLabel : std::uint64_t {
    NewArrivals = 1,
    HandoffArrivals = 2,
    Lifecycle = 3,
    Routing = 4,
};

/// Named substream keyed by (base_seed, replication, label, cell). Identical
/// keys replay the identical sequence; distinct keys are decorrelated through
/// a splitmix64 hash chain before seeding the underlying mt19937_64. All
/// draws go through explicit integer-to-double maps, so sequences are
/// bit-reproducible across platforms.
class RngStream {
public:
    RngStream(std::uint64_t base_seed, std::uint64_t replication, StreamLabel label,
              std::uint64_t cell = 0);

    /// Uniform double in the open interval (0, 1).
    double uniform01();

    /// Unbiased uniform integer in [0, n). Throws DomainError when n == 0.
    std::uint64_t uniform_below(std::uint64_t n);

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// Exponential variate with the given rate: -ln(U)/rate, U uniform on (0, 1).
/// Strictly positive and finite. Throws DomainError unless rate > 0.
double draw_exponential(RngStream& stream, double rate);

} // namespace gcsim
