#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "jumpeuler/rng.hpp"
#include "oracles.hpp"

using namespace jumpeuler;

TEST_CASE("normal sampler moments match the standard normal") {
    RandomStream rs(StreamKey{1234, 0, Channel::WienerFine});
    const std::int64_t n = 10'000'000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = rs.normal();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    const double inv = 1.0 / static_cast<double>(n);
    m1 *= inv;
    m2 *= inv;
    m4 *= inv;
    const double rootn = std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(m1) < 4.0 / rootn);                       // Var X = 1
    CHECK(std::fabs(m2 - 1.0) < 4.0 * std::sqrt(2.0) / rootn);  // Var X^2 = 2
    CHECK(std::fabs(m4 - 3.0) < 4.0 * std::sqrt(96.0) / rootn); // Var X^4 = 105 - 9
}

TEST_CASE("normal sampler tail probability") {
    RandomStream rs(StreamKey{99, 7, Channel::WienerFine});
    const std::int64_t n = 10'000'000;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i)
        if (std::fabs(rs.normal()) > 3.0) ++hits;
    const double p = 2.0 * (1.0 - oracles::normal_cdf(3.0));
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CHECK(std::fabs(static_cast<double>(hits) / static_cast<double>(n) - p) < 4.0 * se);
}

TEST_CASE("uniform and exponential basics") {
    RandomStream rs(StreamKey{5, 0, Channel::ThetaRare});
    const std::int64_t n = 2'000'000;
    double su = 0, se_sum = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rs.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double o = rs.uniform_open();
        REQUIRE(o > 0.0);
        REQUIRE(o <= 1.0);
        se_sum += rs.exponential();
    }
    const double rootn = std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(su / n - 0.5) < 4.0 / (std::sqrt(12.0) * rootn));
    CHECK(std::fabs(se_sum / n - 1.0) < 4.0 / rootn);
}

TEST_CASE("streams are deterministic and channel-distinct") {
    const StreamKey key{42, 17, Channel::Jumps};
    RandomStream a(key), b(key);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RandomStream c(key.with_channel(Channel::Marks));
    RandomStream d(key);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += c.next_u64() == d.next_u64();
    CHECK(same == 0);

    RandomStream e(StreamKey{42, 18, Channel::Jumps});
    RandomStream f(key);
    same = 0;
    for (int i = 0; i < 64; ++i) same += e.next_u64() == f.next_u64();
    CHECK(same == 0);
}

TEST_CASE("mix_seed separates inputs") {
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(mix_seed(0, 0) != mix_seed(0, 1));
    CHECK(mix_seed(7, 0) != mix_seed(0, 7));
}
