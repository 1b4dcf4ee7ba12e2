#pragma once

// Exact integer arithmetic on 64-bit values: Moebius, square-free indicator,
// totient, factorization, and deterministic primality.

#include <cstdint>
#include <utility>
#include <vector>

namespace sqfree::arith {

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Prime factorization of n >= 1. Factors are sorted by strictly increasing
// prime; the empty list stands for n = 1.
struct Factorization {
    std::uint64_t n = 1;
    std::vector<PrimePower> factors;

    // Number of distinct prime factors.
    std::size_t omega() const { return factors.size(); }
    bool squarefree() const;
    bool divisible_by(std::uint64_t prime) const;
};

// Deterministic over the whole 64-bit range.
bool is_prime(std::uint64_t n);

// Trial division by sieved primes up to sqrt(n), with a primality
// short-circuit once the cofactor is prime.
Factorization factorize(std::uint64_t n);

// Throws std::invalid_argument for n = 0.
int mobius(std::uint64_t n);

// 1 iff n >= 1 and no prime square divides n. mu2(0) = 0.
int mu2(std::uint64_t n);

// Throws std::invalid_argument for n = 0.
std::uint64_t totient(std::uint64_t n);
std::uint64_t totient(const Factorization& f);

std::uint64_t isqrt(std::uint64_t n);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

} // namespace sqfree::arith
