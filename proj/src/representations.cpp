#include "sqfree/representations.hpp"

#include "sqfree/arith.hpp"
#include "sqfree/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sqfree::rep {

namespace {

using sieve::CompensatedSum;

void require_n(std::uint64_t n, const char* what)
{
    if (n < 3)
        throw std::invalid_argument(std::string(what) + ": n must be at least 3");
}

// Visits every prime p < n with n - p square-free, in increasing p.
template <typename Visit>
void stream_representations(std::uint64_t n, Visit&& visit)
{
    sieve::Sieve sieve(n + 1);
    const std::uint64_t seg = sieve.segment_size();
    for (std::uint64_t lo = 0; lo < n; lo += seg) {
        const std::uint64_t hi = std::min(n, lo + seg);
        const auto primes = sieve.build_window(lo, hi);
        // s = n - p runs over [n - hi + 1, n - lo].
        const auto partners = sieve.build_window(n - hi + 1, n - lo + 1);
        sieve::for_each_prime(primes, lo, hi, [&](std::uint64_t p) {
            if (partners.is_squarefree(n - p))
                visit(p);
        });
    }
}

template <typename Visit>
void table_representations(const sieve::PrimeTable& table, std::uint64_t n, Visit&& visit)
{
    table.for_each_prime(0, n, [&](std::uint64_t p) {
        if (table.is_squarefree(n - p))
            visit(p);
    });
}

// The rearranged sums run over primes p < n: the p = n term would carry
// mu2(0) = 0, yet every a^2 divides 0, so including it would add
// log n * sum_{a <= sqrt(n)} mu(a) whenever n is prime.
std::vector<std::uint64_t> squarefree_roots(std::uint64_t n)
{
    std::vector<std::uint64_t> roots;
    const std::uint64_t a_max = arith::isqrt(n);
    for (std::uint64_t a = 1; a <= a_max; ++a) {
        if (arith::mu2(a) == 1)
            roots.push_back(a);
    }
    return roots;
}

double mobius_sum(const std::vector<std::uint64_t>& roots, const std::vector<double>& thetas)
{
    CompensatedSum acc;
    for (std::size_t i = 0; i < roots.size(); ++i)
        acc += arith::mobius(roots[i]) * thetas[i];
    return acc.value();
}

SigmaSplit split_terms(std::uint64_t n, double A, const std::vector<std::uint64_t>& roots,
                       const std::vector<double>& thetas)
{
    SigmaSplit out;
    out.n = n;
    out.A = A;
    out.a_split = floor_power(n, A);
    out.a_max = arith::isqrt(n);
    const double nd = static_cast<double>(n);
    out.gcd_bound = std::sqrt(nd) * std::log(nd);

    const std::uint64_t small = bounds::kSmallModulusLimit;
    CompensatedSum s1, s2, s3, s3_full, gcd;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const std::uint64_t a = roots[i];
        const double term = arith::mobius(a) * thetas[i];
        if (std::gcd(a, n) > 1) {
            gcd += term;
            continue;
        }
        if (a > out.a_split)
            s3_full += term;
        if (a <= small)
            s1 += term;
        else if (a <= out.a_split)
            s2 += term;
        else
            s3 += term;
    }
    out.sigma1 = s1.value();
    out.sigma2 = s2.value();
    out.sigma3 = s3.value();
    out.sigma3_full = s3_full.value();
    out.gcd_correction = gcd.value();
    return out;
}

void require_A(double A)
{
    if (!(A > 0.0 && A < 0.5))
        throw std::invalid_argument("sigma_split: A must lie in (0, 1/2)");
}

} // namespace

bool Representation::valid() const
{
    return p <= n && n - p == s && arith::is_prime(p) && arith::mu2(s) == 1;
}

std::uint64_t floor_power(std::uint64_t n, double A)
{
    if (n == 0)
        return 0;
    const double target = A * std::log(static_cast<double>(n));
    auto fits = [&](std::uint64_t a) { return std::log(static_cast<double>(a)) <= target; };
    auto a = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(n), A)));
    if (a == 0)
        a = 1;
    while (a > 1 && !fits(a))
        --a;
    while (fits(a + 1))
        ++a;
    return a;
}

RepresentationTable::RepresentationTable(std::uint64_t limit)
    : table_(limit + 1)
{
}

void RepresentationTable::check(std::uint64_t n) const
{
    require_n(n, "representations");
    if (n > limit())
        throw std::invalid_argument("representations: n beyond the table limit");
}

std::uint64_t RepresentationTable::count_T(std::uint64_t n) const
{
    check(n);
    std::uint64_t count = 0;
    table_representations(table_, n, [&](std::uint64_t) { ++count; });
    return count;
}

double RepresentationTable::compute_R(std::uint64_t n) const
{
    check(n);
    CompensatedSum acc;
    table_representations(table_, n, [&](std::uint64_t p) { acc += std::log(static_cast<double>(p)); });
    return acc.value();
}

double RepresentationTable::compute_R_mobius(std::uint64_t n) const
{
    check(n);
    const auto roots = squarefree_roots(n);
    return mobius_sum(roots, sieve::theta_for_moduli(table_, n - 1, n, roots));
}

SigmaSplit RepresentationTable::sigma_split(std::uint64_t n, double A) const
{
    check(n);
    require_A(A);
    const auto roots = squarefree_roots(n);
    auto out = split_terms(n, A, roots, sieve::theta_for_moduli(table_, n - 1, n, roots));
    out.r_exact = compute_R(n);
    return out;
}

std::vector<Representation> RepresentationTable::witnesses(std::uint64_t n, std::size_t cap) const
{
    check(n);
    std::vector<Representation> out;
    table_representations(table_, n, [&](std::uint64_t p) {
        if (out.size() < cap)
            out.push_back({n, p, n - p});
    });
    return out;
}

std::uint64_t count_T(std::uint64_t n)
{
    require_n(n, "count_T");
    std::uint64_t count = 0;
    stream_representations(n, [&](std::uint64_t) { ++count; });
    return count;
}

double compute_R(std::uint64_t n)
{
    require_n(n, "compute_R");
    CompensatedSum acc;
    stream_representations(n, [&](std::uint64_t p) { acc += std::log(static_cast<double>(p)); });
    return acc.value();
}

double compute_R_mobius(std::uint64_t n)
{
    require_n(n, "compute_R_mobius");
    const auto roots = squarefree_roots(n);
    return mobius_sum(roots, sieve::theta_for_moduli(n - 1, n, roots));
}

SigmaSplit sigma_split(std::uint64_t n, double A)
{
    require_n(n, "sigma_split");
    require_A(A);
    const auto roots = squarefree_roots(n);
    auto out = split_terms(n, A, roots, sieve::theta_for_moduli(n - 1, n, roots));
    out.r_exact = compute_R(n);
    return out;
}

std::vector<Representation> witnesses(std::uint64_t n, std::size_t cap)
{
    require_n(n, "witnesses");
    std::vector<Representation> out;
    stream_representations(n, [&](std::uint64_t p) {
        if (out.size() < cap)
            out.push_back({n, p, n - p});
    });
    return out;
}

double singular_factor(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("singular_factor: n must be positive");
    double factor = 1.0;
    for (const auto& f : arith::factorize(n).factors) {
        const double p = static_cast<double>(f.prime);
        factor *= 1.0 + 1.0 / (p * p - p - 1.0);
    }
    return factor;
}

double estermann_prediction(std::uint64_t n)
{
    require_n(n, "estermann_prediction");
    static const double c = bounds::artin_constant(12).value;
    const double nd = static_cast<double>(n);
    return c * (nd / std::log(nd)) * singular_factor(n);
}

double asymptotic_ratio(std::uint64_t n)
{
    require_n(n, "asymptotic_ratio");
    return static_cast<double>(count_T(n)) / estermann_prediction(n);
}

} // namespace sqfree::rep
