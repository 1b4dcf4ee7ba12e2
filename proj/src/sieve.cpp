#include "sqfree/sieve.hpp"

#include "sqfree/arith.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace sqfree::sieve {

namespace {

// Cap on the per-modulus state kept by theta_all_moduli.
constexpr std::uint64_t kMaxModuli = std::uint64_t{1} << 26;
// Cap on the integers covered by a PrimeTable (two bits each).
constexpr std::uint64_t kMaxTableLimit = std::uint64_t{1} << 34;

std::uint64_t first_at_or_above(std::uint64_t lo, std::uint64_t modulus, std::uint64_t residue)
{
    if (lo <= residue)
        return residue;
    const std::uint64_t k = (lo - residue + modulus - 1) / modulus;
    return residue + k * modulus;
}

void fill_window(SieveWindow& w, const BasePrimes& base)
{
    const std::uint64_t lo = w.lo;
    const std::uint64_t hi = w.hi;
    const std::size_t len = static_cast<std::size_t>(hi - lo);
    w.prime_mask = Bitset(len, true);
    w.squarefree_mask = Bitset(len, true);

    for (std::uint64_t v = lo; v < std::min<std::uint64_t>(hi, 2); ++v) {
        w.prime_mask.reset(v - lo);
    }
    if (lo == 0)
        w.squarefree_mask.reset(0);

    for (std::uint32_t p32 : base.primes()) {
        const std::uint64_t p = p32;
        if (p * p >= hi)
            break;
        std::uint64_t start = std::max(p * p, first_at_or_above(lo, p, 0));
        for (std::uint64_t v = start; v < hi; v += p)
            w.prime_mask.reset(v - lo);

        const std::uint64_t sq = p * p;
        for (std::uint64_t v = first_at_or_above(lo, sq, 0); v < hi; v += sq)
            w.squarefree_mask.reset(v - lo);
    }
}

} // namespace

Bitset::Bitset(std::size_t size, bool value)
    : size_(size)
    , words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0)
{
    if (value && size % 64 != 0)
        words_.back() = (std::uint64_t{1} << (size % 64)) - 1;
}

std::size_t Bitset::count() const
{
    std::size_t c = 0;
    for (auto w : words_)
        c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
}

BasePrimes::BasePrimes(std::uint64_t limit)
    : limit_(limit)
{
    if (limit > 0xFFFFFFFFull)
        throw std::invalid_argument("BasePrimes: limit exceeds 32 bits");
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i])
            continue;
        primes_.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i)
            composite[j] = true;
    }
}

std::shared_ptr<const BasePrimes> BasePrimes::for_range(std::uint64_t max_hi)
{
    static std::mutex mutex;
    static std::shared_ptr<const BasePrimes> cached;

    const std::uint64_t need = arith::isqrt(max_hi == 0 ? 0 : max_hi - 1) + 1;
    std::lock_guard lock(mutex);
    if (!cached || cached->limit() < need) {
        // Grow geometrically so that a run of increasing requests resieves rarely.
        std::uint64_t limit = std::max<std::uint64_t>(need, 1u << 16);
        if (cached)
            limit = std::max(limit, std::min<std::uint64_t>(cached->limit() * 2, 0xFFFFFFFFull));
        cached = std::make_shared<const BasePrimes>(limit);
    }
    return cached;
}

Sieve::Sieve(std::uint64_t max_hi, std::uint64_t segment_size)
    : max_hi_(max_hi)
    , segment_size_(segment_size)
{
    if (max_hi > kMaxHi)
        throw std::invalid_argument("Sieve: max_hi exceeds 2^63");
    if (segment_size == 0)
        throw std::invalid_argument("Sieve: segment size must be positive");
    base_ = BasePrimes::for_range(max_hi);
}

SieveWindow Sieve::build_window(std::uint64_t lo, std::uint64_t hi) const
{
    if (hi <= lo)
        throw std::invalid_argument("build_window: require hi > lo");
    if (hi > max_hi_)
        throw std::invalid_argument("build_window: hi " + std::to_string(hi) + " above sieve bound " +
                                    std::to_string(max_hi_));
    if (hi - lo > segment_size_)
        throw std::invalid_argument("build_window: window of " + std::to_string(hi - lo) +
                                    " integers exceeds segment budget " + std::to_string(segment_size_));
    SieveWindow w;
    w.lo = lo;
    w.hi = hi;
    fill_window(w, *base_);
    return w;
}

SieveWindow build_window(std::uint64_t lo, std::uint64_t hi, std::uint64_t segment_size)
{
    if (hi <= lo)
        throw std::invalid_argument("build_window: require hi > lo");
    return Sieve(hi, segment_size).build_window(lo, hi);
}

PrimeTable::PrimeTable(std::uint64_t limit, std::uint64_t segment_size)
    : limit_(limit)
    , segment_size_(segment_size)
{
    if (limit > kMaxTableLimit)
        throw std::invalid_argument("PrimeTable: limit exceeds memory budget");
    if (limit == 0)
        return;
    Sieve sieve(limit, segment_size);
    for (std::uint64_t lo = 0; lo < limit; lo += segment_size)
        windows_.push_back(sieve.build_window(lo, std::min(limit, lo + segment_size)));
}

bool PrimeTable::is_prime(std::uint64_t v) const
{
    if (v >= limit_)
        throw std::out_of_range("PrimeTable::is_prime: value beyond table");
    return window_for(v).is_prime(v);
}

bool PrimeTable::is_squarefree(std::uint64_t v) const
{
    if (v >= limit_)
        throw std::out_of_range("PrimeTable::is_squarefree: value beyond table");
    return window_for(v).is_squarefree(v);
}

void CompensatedSum::add(double x)
{
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
        correction_ += (sum_ - t) + x;
    else
        correction_ += (x - t) + sum_;
    sum_ = t;
}

ThetaQuery::ThetaQuery(std::uint64_t x_, std::uint64_t modulus_, std::uint64_t residue_)
    : x(x_)
    , modulus(modulus_)
    , residue(residue_)
{
    if (x < 1)
        throw std::invalid_argument("ThetaQuery: x must be positive");
    if (modulus < 1)
        throw std::invalid_argument("ThetaQuery: modulus must be positive");
    if (residue >= modulus)
        throw std::invalid_argument("ThetaQuery: residue must be below the modulus");
}

namespace {

// Adds log v for every prime v = residue (mod modulus) in [w.lo, end).
void accumulate_progression(const SieveWindow& w, std::uint64_t end, std::uint64_t modulus,
                            std::uint64_t residue, CompensatedSum& acc)
{
    for (std::uint64_t v = first_at_or_above(w.lo, modulus, residue); v < end; v += modulus) {
        if (w.is_prime(v))
            acc += std::log(static_cast<double>(v));
    }
}

void check_roots(std::uint64_t n, const std::vector<std::uint64_t>& roots)
{
    if (n < 1)
        throw std::invalid_argument("theta_for_moduli: n must be positive");
    if (roots.size() > kMaxModuli)
        throw std::invalid_argument("theta_for_moduli: modulus count exceeds memory budget");
    const std::uint64_t root_n = arith::isqrt(n);
    for (auto a : roots) {
        if (a < 1 || a > root_n)
            throw std::invalid_argument("theta_for_moduli: require 1 <= a <= sqrt(n)");
    }
}

struct ModulusState {
    std::uint64_t modulus;
    std::uint64_t residue;
    CompensatedSum sum;
};

std::vector<ModulusState> init_moduli(std::uint64_t n, const std::vector<std::uint64_t>& roots)
{
    std::vector<ModulusState> states;
    states.reserve(roots.size());
    for (auto a : roots)
        states.push_back({a * a, n % (a * a), {}});
    return states;
}

std::vector<double> collect(const std::vector<ModulusState>& states)
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states)
        out.push_back(s.sum.value());
    return out;
}

std::vector<std::uint64_t> roots_up_to(std::uint64_t n, std::uint64_t a_max)
{
    if (n < 1)
        throw std::invalid_argument("theta_all_moduli: n must be positive");
    if (a_max < 1 || a_max > arith::isqrt(n))
        throw std::invalid_argument("theta_all_moduli: require 1 <= a_max <= sqrt(n)");
    if (a_max > kMaxModuli)
        throw std::invalid_argument("theta_all_moduli: modulus count exceeds memory budget");
    std::vector<std::uint64_t> roots(static_cast<std::size_t>(a_max));
    for (std::uint64_t a = 1; a <= a_max; ++a)
        roots[a - 1] = a;
    return roots;
}

std::map<std::uint64_t, double> as_map(const std::vector<std::uint64_t>& roots, const std::vector<double>& values)
{
    std::map<std::uint64_t, double> out;
    for (std::size_t i = 0; i < roots.size(); ++i)
        out.emplace(roots[i], values[i]);
    return out;
}

} // namespace

double theta(const ThetaQuery& q)
{
    const std::uint64_t end = q.x + 1;
    Sieve sieve(end);
    CompensatedSum acc;
    for (std::uint64_t lo = 0; lo < end; lo += sieve.segment_size()) {
        const std::uint64_t hi = std::min(end, lo + sieve.segment_size());
        accumulate_progression(sieve.build_window(lo, hi), hi, q.modulus, q.residue, acc);
    }
    return acc.value();
}

double theta(const PrimeTable& table, const ThetaQuery& q)
{
    if (q.x >= table.limit())
        throw std::invalid_argument("theta: x beyond the prime table");
    const std::uint64_t end = q.x + 1;
    CompensatedSum acc;
    for (const auto& w : table.windows()) {
        if (w.lo >= end)
            break;
        accumulate_progression(w, std::min(end, w.hi), q.modulus, q.residue, acc);
    }
    return acc.value();
}

std::vector<double> theta_for_moduli(std::uint64_t x, std::uint64_t n, const std::vector<std::uint64_t>& roots)
{
    check_roots(n, roots);
    auto states = init_moduli(n, roots);
    if (x < 2)
        return collect(states);
    const std::uint64_t end = x + 1;
    Sieve sieve(end);
    for (std::uint64_t lo = 0; lo < end; lo += sieve.segment_size()) {
        const std::uint64_t hi = std::min(end, lo + sieve.segment_size());
        const auto w = sieve.build_window(lo, hi);
        for (auto& s : states)
            accumulate_progression(w, hi, s.modulus, s.residue, s.sum);
    }
    return collect(states);
}

std::vector<double> theta_for_moduli(const PrimeTable& table, std::uint64_t x, std::uint64_t n,
                                     const std::vector<std::uint64_t>& roots)
{
    check_roots(n, roots);
    if (x >= table.limit())
        throw std::invalid_argument("theta_for_moduli: x beyond the prime table");
    auto states = init_moduli(n, roots);
    const std::uint64_t end = x + 1;
    for (const auto& w : table.windows()) {
        if (w.lo >= end)
            break;
        const std::uint64_t hi = std::min(end, w.hi);
        for (auto& s : states)
            accumulate_progression(w, hi, s.modulus, s.residue, s.sum);
    }
    return collect(states);
}

std::map<std::uint64_t, double> theta_all_moduli(std::uint64_t n, std::uint64_t a_max)
{
    const auto roots = roots_up_to(n, a_max);
    return as_map(roots, theta_for_moduli(n, n, roots));
}

std::map<std::uint64_t, double> theta_all_moduli(const PrimeTable& table, std::uint64_t n,
                                                 std::uint64_t a_max)
{
    const auto roots = roots_up_to(n, a_max);
    return as_map(roots, theta_for_moduli(table, n, n, roots));
}

} // namespace sqfree::sieve
