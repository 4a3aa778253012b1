#include <doctest.h>

#include <cmath>
#include <vector>

#include "coac/rng.hpp"

using namespace coac;

// Reference outputs from an independent transcription of SplitMix64 and
// xoshiro256**.

TEST_CASE("splitmix64 reference value")
{
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("xoshiro256** stream is frozen")
{
    Rng rng(42);
    CHECK(rng.next_u64() == 0x15780B2E0C2EC716ULL);
    CHECK(rng.next_u64() == 0x6104D9866D113A7EULL);
    CHECK(rng.next_u64() == 0xAE17533239E499A1ULL);
    CHECK(Rng(42).uniform01() == 0.08386297105988222);
    CHECK(Rng::for_stream(7, 3).next_u64() == 0xC04C9FFCB8B44319ULL);
}

TEST_CASE("polar normals with cached spare")
{
    Rng rng(42);
    CHECK(rng.normal() == doctest::Approx(-0.7262191382447859).epsilon(1e-15));
    CHECK(rng.normal() == doctest::Approx(-0.21119691823195985).epsilon(1e-15));
    CHECK(rng.normal() == doctest::Approx(0.22162270150359337).epsilon(1e-15));
}

TEST_CASE("distribution sanity")
{
    Rng rng(2);
    double sum = 0.0, sum_sq = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::fabs(sum / count) < 0.01);
    CHECK(std::fabs(sum_sq / count - 1.0) < 0.02);

    std::vector<int> buckets(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto b = rng.below(7);
        REQUIRE(b < 7);
        ++buckets[b];
    }
    for (int c : buckets) {
        CHECK(std::abs(c - 10000) < 500);
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(3.0, 4.0);
        CHECK(u > 3.0);
        CHECK(u < 4.0);
    }
    CHECK(rng.below(1) == 0);
}

TEST_CASE("streams are independent of creation order")
{
    Rng a = Rng::for_stream(11, 5);
    Rng b = Rng::for_stream(11, 6);
    const auto b_first = b.next_u64();
    const auto a_first = a.next_u64();
    CHECK(Rng::for_stream(11, 6).next_u64() == b_first);
    CHECK(Rng::for_stream(11, 5).next_u64() == a_first);
    CHECK(a_first != b_first);
    CHECK(Rng::for_stream(12, 5).next_u64() != a_first);
}
