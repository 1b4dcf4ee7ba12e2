#include "sqfree/arith.hpp"

#include <array>
#include <stdexcept>

namespace sqfree::arith {

namespace {

__extension__ typedef unsigned __int128 uint128;

constexpr std::uint64_t kSmallPrimeLimit = 1u << 20;

const std::vector<std::uint32_t>& small_primes()
{
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<bool> composite(kSmallPrimeLimit + 1, false);
        std::vector<std::uint32_t> out;
        for (std::uint64_t i = 2; i <= kSmallPrimeLimit; ++i) {
            if (composite[i])
                continue;
            out.push_back(static_cast<std::uint32_t>(i));
            for (std::uint64_t j = i * i; j <= kSmallPrimeLimit; j += i)
                composite[j] = true;
        }
        return out;
    }();
    return primes;
}

bool miller_rabin_round(std::uint64_t n, std::uint64_t d, unsigned r, std::uint64_t a)
{
    a %= n;
    if (a == 0)
        return true;
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1)
        return true;
    for (unsigned i = 1; i < r; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1)
            return true;
    }
    return false;
}

} // namespace

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<uint128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(__builtin_sqrtl(static_cast<long double>(n)));
    while (r > 0 && (r > 0xFFFFFFFFull || r * r > n))
        --r;
    while (r + 1 <= 0xFFFFFFFFull && (r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    static constexpr std::array<std::uint64_t, 12> kTrial = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto p : kTrial) {
        if (n == p)
            return true;
        if (n % p == 0)
            return false;
    }
    if (n < 41 * 41)
        return true;

    std::uint64_t d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // This base set has no strong pseudoprime below 2^64.
    static constexpr std::array<std::uint64_t, 7> kBases = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    for (auto a : kBases) {
        if (!miller_rabin_round(n, d, r, a))
            return false;
    }
    return true;
}

bool Factorization::squarefree() const
{
    for (const auto& f : factors) {
        if (f.exponent > 1)
            return false;
    }
    return true;
}

bool Factorization::divisible_by(std::uint64_t prime) const
{
    for (const auto& f : factors) {
        if (f.prime == prime)
            return true;
    }
    return false;
}

Factorization factorize(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("factorize: n must be positive");

    Factorization out;
    out.n = n;
    std::uint64_t rest = n;

    // Returns true when p divided the cofactor.
    auto strip = [&](std::uint64_t p) {
        unsigned e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        if (e > 0)
            out.factors.push_back({p, e});
        return e > 0;
    };

    bool cofactor_prime = rest > kSmallPrimeLimit && is_prime(rest);
    if (!cofactor_prime) {
        for (std::uint32_t p : small_primes()) {
            if (static_cast<std::uint64_t>(p) * p > rest)
                break;
            if (strip(p) && rest > kSmallPrimeLimit && is_prime(rest)) {
                cofactor_prime = true;
                break;
            }
        }
    }

    // Cofactors with no divisor in the table: walk 6k +/- 1 past it.
    if (!cofactor_prime && rest > kSmallPrimeLimit * kSmallPrimeLimit && !is_prime(rest)) {
        for (std::uint64_t p = (kSmallPrimeLimit / 6) * 6 + 5; p <= rest / p; p += 6) {
            bool hit = strip(p);
            hit = strip(p + 2) || hit;
            if (hit && is_prime(rest))
                break;
        }
    }
    if (rest > 1)
        out.factors.push_back({rest, 1});
    return out;
}

int mobius(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("mobius: n must be positive");
    auto f = factorize(n);
    if (!f.squarefree())
        return 0;
    return (f.omega() % 2 == 0) ? 1 : -1;
}

int mu2(std::uint64_t n)
{
    if (n == 0)
        return 0;
    return factorize(n).squarefree() ? 1 : 0;
}

std::uint64_t totient(const Factorization& f)
{
    std::uint64_t phi = f.n;
    for (const auto& pf : f.factors)
        phi = phi / pf.prime * (pf.prime - 1);
    return phi;
}

std::uint64_t totient(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("totient: n must be positive");
    return totient(factorize(n));
}

} // namespace sqfree::arith
