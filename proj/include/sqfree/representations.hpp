#pragma once

// Counts of representations n = p + s with p prime and s square-free: the
// plain count T(n), the log-weighted count R(n), its Moebius rearrangement
// over square moduli, and the three-range split of that rearrangement.

#include "sqfree/sieve.hpp"

#include <cstdint>
#include <vector>

namespace sqfree::rep {

struct Representation {
    std::uint64_t n;
    std::uint64_t p;
    std::uint64_t s;

    // n = p + s, p prime, s square-free (checked per element).
    bool valid() const;

    friend bool operator==(const Representation&, const Representation&) = default;
};

// Terms mu(a) theta(n - 1; a^2, n) of the rearranged R(n), grouped by range of a.
// The theta sums stop below n because s = n - p must be at least 1.
// sigma1: a <= 13, sigma2: 13 < a <= floor(n^A), sigma3: max(13, floor(n^A)) < a <= sqrt(n),
// each restricted to (a, n) = 1. Terms with (a, n) > 1 land in gcd_correction.
struct SigmaSplit {
    std::uint64_t n = 0;
    double A = 0.0;
    std::uint64_t a_split = 0; // floor(n^A)
    std::uint64_t a_max = 0;   // floor(sqrt(n))
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma3 = 0.0;
    // Sum over floor(n^A) < a <= sqrt(n), (a, n) = 1, ignoring the a <= 13
    // cut. Equals sigma3 whenever n^A >= 13.
    double sigma3_full = 0.0;
    double gcd_correction = 0.0;
    // n^(1/2) log n, the bound on |gcd_correction|.
    double gcd_bound = 0.0;
    double r_exact = 0.0;

    double partition_total() const { return sigma1 + sigma2 + sigma3 + gcd_correction; }
};

// floor(n^A) by exact comparison against integer candidates.
std::uint64_t floor_power(std::uint64_t n, double A);

// Work shared across many n: a prime/square-free table covering [0, limit].
class RepresentationTable {
public:
    explicit RepresentationTable(std::uint64_t limit);

    std::uint64_t limit() const { return table_.limit() - 1; }
    const sieve::PrimeTable& primes() const { return table_; }

    std::uint64_t count_T(std::uint64_t n) const;
    double compute_R(std::uint64_t n) const;
    double compute_R_mobius(std::uint64_t n) const;
    SigmaSplit sigma_split(std::uint64_t n, double A) const;
    std::vector<Representation> witnesses(std::uint64_t n, std::size_t cap) const;

private:
    void check(std::uint64_t n) const;

    sieve::PrimeTable table_;
};

// The free functions below stream windows instead of holding a table.
// All of them throw std::invalid_argument for n < 3.

std::uint64_t count_T(std::uint64_t n);
double compute_R(std::uint64_t n);
double compute_R_mobius(std::uint64_t n);
SigmaSplit sigma_split(std::uint64_t n, double A);

// All representations in increasing p, at most cap of them.
std::vector<Representation> witnesses(std::uint64_t n, std::size_t cap);

// c (n / log n) prod_{p | n} (1 + 1/(p^2 - p - 1)).
double estermann_prediction(std::uint64_t n);
double singular_factor(std::uint64_t n);

// count_T(n) / estermann_prediction(n).
double asymptotic_ratio(std::uint64_t n);

} // namespace sqfree::rep
