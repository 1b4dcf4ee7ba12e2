#include "oracles.hpp"
#include "sqfree/arith.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <stdexcept>

using namespace sqfree::arith;

TEST_CASE("mobius on small values")
{
    CHECK(mobius(1) == 1);
    CHECK(mobius(4) == 0);
    CHECK(mobius(6) == oracle::mobius(6));
    CHECK(mobius(6) == 1);
    CHECK(mobius(30) == oracle::mobius(30));
    CHECK(mobius(30) == -1);
    CHECK_THROWS_AS(mobius(0), std::invalid_argument);
}

TEST_CASE("mu2 on small values")
{
    CHECK(mu2(1) == 1);
    CHECK(mu2(18) == 0);
    CHECK(mu2(10) == 1);
    CHECK(mu2(0) == 0);
}

TEST_CASE("totient")
{
    CHECK(totient(1) == 1);
    CHECK(totient(169) == oracle::totient_by_count(169));
    CHECK(totient(169) == 156);
    CHECK(totient(36) == oracle::totient_by_count(36));
    CHECK(totient(36) == 12);
    CHECK_THROWS_AS(totient(0), std::invalid_argument);
}

TEST_CASE("is_prime examples")
{
    CHECK(is_prime(2));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(0));
    CHECK(oracle::is_prime(10'000'000'019ull));
    CHECK(is_prime(10'000'000'019ull));
}

TEST_CASE("is_prime near the top of the 64-bit range")
{
    CHECK(is_prime(18446744073709551557ull)); // largest 64-bit prime
    CHECK_FALSE(is_prime(18446744073709551615ull));
    // Strong pseudoprimes to several small bases.
    CHECK_FALSE(is_prime(3215031751ull));
    CHECK_FALSE(is_prime(3825123056546413051ull));
    CHECK_FALSE(is_prime(341550071728321ull)); // 10670053 * 32010157
    // Product of two primes just under 2^32.
    CHECK_FALSE(is_prime(4294967291ull * 4294967279ull));
}

TEST_CASE("factorize")
{
    CHECK(factorize(1).factors.empty());
    CHECK(factorize(12).factors == std::vector<PrimePower>{{2, 2}, {3, 1}});
    CHECK(is_prime(9999999967ull));
    CHECK(factorize(9999999967ull).factors == std::vector<PrimePower>{{9999999967ull, 1}});
    CHECK(factorize(4294967291ull * 4294967279ull).factors ==
          std::vector<PrimePower>{{4294967279ull, 1}, {4294967291ull, 1}});
    CHECK(factorize(1048583ull * 1048583ull * 7).factors == std::vector<PrimePower>{{7, 1}, {1048583ull, 2}});
    CHECK(factorize(1048583ull * 1048589ull).factors == std::vector<PrimePower>{{1048583ull, 1}, {1048589ull, 1}});
}

TEST_CASE("factorization invariants on random 64-bit inputs")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t n = (rng() >> 20) + 1; // up to 2^44
        const auto f = factorize(n);
        std::uint64_t product = 1;
        std::uint64_t prev = 0;
        for (const auto& pf : f.factors) {
            CHECK(pf.prime > prev);
            CHECK(is_prime(pf.prime));
            CHECK(pf.exponent >= 1);
            for (unsigned e = 0; e < pf.exponent; ++e)
                product *= pf.prime;
            prev = pf.prime;
        }
        CHECK(product == n);
    }
}

TEST_CASE("mobius is nonzero exactly on square-free n")
{
    for (std::uint64_t n = 1; n <= 100'000; ++n) {
        if ((mobius(n) != 0) != (mu2(n) == 1))
            FAIL("mismatch at ", n);
    }
}

TEST_CASE("multiplicativity on coprime pairs")
{
    for (std::uint64_t a = 1; a <= 1000; a += 7) {
        for (std::uint64_t b = 1; b <= 1000; b += 11) {
            if (std::gcd(a, b) != 1)
                continue;
            REQUIRE(mobius(a * b) == mobius(a) * mobius(b));
            REQUIRE(totient(a * b) == totient(a) * totient(b));
        }
    }
}

TEST_CASE("divisor sum of mobius is the indicator of 1")
{
    for (std::uint64_t n = 1; n <= 10'000; ++n) {
        int sum = 0;
        for (std::uint64_t d = 1; d <= n; ++d) {
            if (n % d == 0)
                sum += mobius(d);
        }
        REQUIRE(sum == (n == 1 ? 1 : 0));
    }
}

TEST_CASE("mu2 equals the sum of mobius over square divisors")
{
    for (std::uint64_t n = 1; n <= 100'000; ++n) {
        int sum = 0;
        for (std::uint64_t a = 1; a * a <= n; ++a) {
            if (n % (a * a) == 0)
                sum += oracle::mobius(a);
        }
        if (mu2(n) != sum)
            FAIL("mismatch at ", n);
    }
}

TEST_CASE("is_prime agrees with a sieve up to 10^7")
{
    constexpr std::uint32_t kLimit = 10'000'000;
    const auto primes = oracle::primes_up_to(kLimit);
    std::size_t k = 0;
    for (std::uint64_t n = 0; n <= kLimit; ++n) {
        const bool expected = k < primes.size() && primes[k] == n;
        if (expected)
            ++k;
        if (is_prime(n) != expected)
            FAIL("mismatch at ", n);
    }
}

TEST_CASE("isqrt")
{
    CHECK(isqrt(0) == 0);
    CHECK(isqrt(15) == 3);
    CHECK(isqrt(16) == 4);
    CHECK(isqrt(18446744073709551615ull) == 4294967295ull);
    CHECK(isqrt(4294967296ull * 4294967295ull) == 4294967295ull);
}
