#pragma once

// Explicit constants and inequalities behind the lower bound on R(n)/n for
// large n: Artin's constant, the singular product S_n, the epsilon-weighted
// sum over small square moduli, the Brun-Titchmarsh factor, and the tails.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sqfree::bounds {

// Values the certified pipeline takes as given.
inline constexpr double kSnFloor = 0.373;
inline constexpr double kEpsSumCap = 0.005;
inline constexpr double kTailSumCap = 0.086;
inline constexpr double kInfiniteSumCap = 1.95;
inline constexpr std::uint64_t kSmallModulusLimit = 13;
inline constexpr std::uint64_t kCertifiedFrom = 10'000'000'000ull;
// Padding applied to every term before a sign decision.
inline constexpr double kTermSlack = 1e-12;

struct CertifiedValue {
    double value;
    double error_bound;
};

// Product over all primes of (1 - 1/(p(p-1))), with |value - c| <= error_bound
// < 10^-target_digits. Throws std::invalid_argument for target_digits outside
// [1, 15]; beyond 15 digits double precision cannot carry the certificate.
CertifiedValue artin_constant(int target_digits);

// S_n = prod over p not dividing n of (1 - 1/(p(p-1))).
double sn_exact(std::uint64_t n);
// max(S_n, floor). S_n >= c > 0.373 so the floor only guards rounding.
double sn_lower_bound(std::uint64_t n, double floor = kSnFloor);

struct EpsilonEntry {
    std::uint64_t a;
    double epsilon;
    std::uint64_t valid_from;
};

// Error coefficients for theta(x; a^2, .) over a <= 13.
class EpsilonTable {
public:
    // Structural checks only: a in [1, 13], no duplicates, every square-free
    // a present, epsilon >= 0, valid_from <= 10^10, weighted sum below the cap.
    static EpsilonTable from_entries(std::vector<EpsilonEntry> entries, std::string source_label);

    // Text format:
    //   source: <label>
    //   <a> <epsilon> <valid_from>     (one record per line, '#' comments)
    // Throws std::runtime_error on malformed or invalid input.
    static EpsilonTable parse(std::istream& in);
    static EpsilonTable load(const std::string& path);

    const std::vector<EpsilonEntry>& entries() const { return entries_; }
    const std::string& source_label() const { return source_label_; }
    // Largest validity threshold over the weighted entries.
    std::uint64_t valid_from() const;

private:
    std::vector<EpsilonEntry> entries_;
    std::string source_label_;
};

// Sum over a <= 13 of epsilon_a mu^2(a) / phi(a^2). The coprimality
// condition (a, n) = 1 is dropped, which can only enlarge the sum.
double epsilon_term(const EpsilonTable& table, std::uint64_t n);

// Sum over a <= limit of mu^2(a) / phi(a^2).
double squarefree_phi_partial_sum(std::uint64_t limit);

// Upper bound 1.95 - sum_{a <= cutoff} mu^2(a)/phi(a^2) on the sum over
// a > cutoff. Throws std::domain_error if the partial sum reaches the cap.
double squarefree_phi_tail(std::uint64_t cutoff);

// 2 (log n / log(n / a^2)) n / phi(a^2). Requires a^2 < n.
double brun_titchmarsh_bound(std::uint64_t n, std::uint64_t a);

// n^(1-2A) log n + n^(1-A) log n. Requires 0 < A < 1/2 and n >= 2.
double sigma3_trivial_bound(std::uint64_t n, double A);

struct BoundParams {
    double A = 0.25;
    double sn_floor = kSnFloor;
    double eps_sum_cap = kEpsSumCap;
    double tail_sum_cap = kTailSumCap;
    double infinite_sum_cap = kInfiniteSumCap;

    // Throws std::invalid_argument unless 0 < A < 1/2 and every cap is positive.
    void validate() const;
};

struct BoundBreakdown {
    // Real-valued so the bound can be evaluated past 2^64.
    double n = 0.0;
    double A = 0.0;
    double sn_lower = 0.0;
    double eps_term = 0.0;
    double bt_factor = 0.0;
    double tail_sum_cap = 0.0;
    double bt_term = 0.0;
    double tail_half = 0.0;
    double tail_2A = 0.0;
    double tail_A = 0.0;
    double lower_bound = 0.0;

    // Reported alongside the certified terms; zero when n is beyond 64 bits.
    double sn_exact = 0.0;
    double table_eps_sum = 0.0;
    std::string table_source;

    // n below the range where the imported estimates hold.
    bool heuristic = false;
    // lower_bound stays positive after padding every term by kTermSlack.
    bool positive = false;

    double recompute() const;
};

// sn_lower is the configured floor and eps_term the configured cap; the
// table's own weighted sum must sit below that cap.
BoundBreakdown lower_bound(std::uint64_t n, const BoundParams& params, const EpsilonTable& table);
// Same terms for n given as a real number, for n beyond 64 bits.
BoundBreakdown lower_bound_real(double n, const BoundParams& params, const EpsilonTable& table);

// The right-hand side alone, for a given A.
double lower_bound_value(double n, double A, const BoundParams& params);

struct OptimizedBound {
    double A_best;
    double lower_bound;
};

// Golden-section search over A in (0, 1/2), tolerance 1e-6 in A. Requires n >= 100.
OptimizedBound optimize_A(double n, const BoundParams& params);

} // namespace sqfree::bounds
