#pragma once

// Segmented sieves over half-open intervals: primality and square-freeness
// bitmaps, and Chebyshev theta sums over arithmetic progressions.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace sqfree::sieve {

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kMaxHi = std::uint64_t{1} << 63;

class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t size, bool value = false);

    std::size_t size() const { return size_; }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    std::size_t count() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

    friend bool operator==(const Bitset&, const Bitset&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

// Primality and square-freeness marks for every integer in [lo, hi).
struct SieveWindow {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    Bitset prime_mask;
    Bitset squarefree_mask;

    std::uint64_t size() const { return hi - lo; }
    bool contains(std::uint64_t v) const { return v >= lo && v < hi; }
    bool is_prime(std::uint64_t v) const { return prime_mask.test(v - lo); }
    bool is_squarefree(std::uint64_t v) const { return squarefree_mask.test(v - lo); }
};

// Read-only table of primes up to a bound, shared by every window built
// from it.
class BasePrimes {
public:
    explicit BasePrimes(std::uint64_t limit);

    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }

    // Table large enough to sieve any window with hi <= max_hi.
    static std::shared_ptr<const BasePrimes> for_range(std::uint64_t max_hi);

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> primes_;
};

class Sieve {
public:
    // Windows up to max_hi, each at most segment_size integers long.
    explicit Sieve(std::uint64_t max_hi, std::uint64_t segment_size = kDefaultSegmentSize);

    std::uint64_t max_hi() const { return max_hi_; }
    std::uint64_t segment_size() const { return segment_size_; }

    // Throws std::invalid_argument for hi <= lo, hi > max_hi, or a window
    // longer than the segment size.
    SieveWindow build_window(std::uint64_t lo, std::uint64_t hi) const;

private:
    std::uint64_t max_hi_;
    std::uint64_t segment_size_;
    std::shared_ptr<const BasePrimes> base_;
};

// One-off window with its own base-prime table.
SieveWindow build_window(std::uint64_t lo, std::uint64_t hi,
                         std::uint64_t segment_size = kDefaultSegmentSize);

// Full coverage of [0, limit) as consecutive windows.
class PrimeTable {
public:
    explicit PrimeTable(std::uint64_t limit, std::uint64_t segment_size = kDefaultSegmentSize);

    std::uint64_t limit() const { return limit_; }
    const std::vector<SieveWindow>& windows() const { return windows_; }

    bool is_prime(std::uint64_t v) const;
    bool is_squarefree(std::uint64_t v) const;

    template <typename F>
    void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const;

private:
    const SieveWindow& window_for(std::uint64_t v) const { return windows_[v / segment_size_]; }

    std::uint64_t limit_;
    std::uint64_t segment_size_;
    std::vector<SieveWindow> windows_;
};

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + correction_; }
    CompensatedSum& operator+=(double x)
    {
        add(x);
        return *this;
    }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

struct ThetaQuery {
    std::uint64_t x;
    std::uint64_t modulus;
    std::uint64_t residue;

    // Throws std::invalid_argument unless x >= 1, modulus >= 1, residue < modulus.
    ThetaQuery(std::uint64_t x, std::uint64_t modulus, std::uint64_t residue);
};

// Sum of log p over primes p <= x with p = residue (mod modulus).
double theta(const ThetaQuery& q);
double theta(const PrimeTable& table, const ThetaQuery& q);

// a -> theta(n; a^2, n mod a^2) for 1 <= a <= a_max, from one pass over the
// primes up to n. Requires a_max <= sqrt(n).
std::map<std::uint64_t, double> theta_all_moduli(std::uint64_t n, std::uint64_t a_max);
std::map<std::uint64_t, double> theta_all_moduli(const PrimeTable& table, std::uint64_t n,
                                                 std::uint64_t a_max);

// theta(x; a^2, n mod a^2) for each a in roots, in the same order, from one
// pass over the primes up to x. Every a must satisfy 1 <= a <= sqrt(n).
std::vector<double> theta_for_moduli(std::uint64_t x, std::uint64_t n, const std::vector<std::uint64_t>& roots);
std::vector<double> theta_for_moduli(const PrimeTable& table, std::uint64_t x, std::uint64_t n,
                                     const std::vector<std::uint64_t>& roots);

// Calls f(p) for each prime p in [lo, hi) intersected with the window, in
// increasing order.
template <typename F>
void for_each_prime(const SieveWindow& w, std::uint64_t lo, std::uint64_t hi, F&& f)
{
    if (lo < w.lo)
        lo = w.lo;
    if (hi > w.hi)
        hi = w.hi;
    if (lo >= hi)
        return;
    const auto& words = w.prime_mask.words();
    std::uint64_t i = lo - w.lo;
    const std::uint64_t stop = hi - w.lo;
    while (i < stop) {
        const std::uint64_t word = words[i >> 6] >> (i & 63);
        if (word == 0) {
            i = (i | 63) + 1;
            continue;
        }
        i += static_cast<std::uint64_t>(__builtin_ctzll(word));
        if (i >= stop)
            break;
        f(w.lo + i);
        ++i;
    }
}

template <typename F>
void PrimeTable::for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const
{
    if (hi > limit_)
        hi = limit_;
    for (const auto& w : windows_) {
        if (w.lo >= hi)
            break;
        if (w.hi > lo)
            sieve::for_each_prime(w, lo, hi, f);
    }
}

} // namespace sqfree::sieve
