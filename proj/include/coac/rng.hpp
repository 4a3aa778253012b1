#pragma once

#include <cstdint>
#include <optional>

namespace coac {

/// xoshiro256** with SplitMix64 seeding.
///
/// Everything is specified down to the bit so that simulation output is
/// identical across compilers and standard libraries (std::normal_distribution
/// is not):
///   * uniform01: ((u >> 11) + 0.5) · 2⁻⁵³, strictly inside (0, 1)
///   * normal: Marsaglia polar method on 2·uniform01 − 1 pairs, the second
///     variate of each accepted pair is cached and returned next
///   * below(k): Lemire's multiply-shift with rejection, unbiased
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream keyed by (master_seed, stream_id). Streams with
    /// different ids do not overlap in practice and do not depend on the
    /// order in which they are created.
    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64() noexcept;
    double uniform01() noexcept;
    double uniform(double low, double high) noexcept;
    double normal() noexcept;
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t s_[4];
    std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

} // namespace coac
