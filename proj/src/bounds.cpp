#include "sqfree/bounds.hpp"

#include "sqfree/arith.hpp"
#include "sqfree/sieve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sqfree::bounds {

namespace {

using sieve::CompensatedSum;

// Primes up to this bound enter the product directly; the rest through the
// prime zeta series.
constexpr std::uint32_t kArtinHeadLimit = 1000;
// Rounding allowance on the final value. The head sum is compensated and each
// prime zeta value carries a few ulps, so the true rounding error sits well
// under this.
constexpr double kArtinRounding = 4e-16;
constexpr int kArtinMaxDigits = 15;

// zeta(s) - 1 for integer s >= 2 by Euler-Maclaurin with cutoff 16 and eight
// Bernoulli corrections; the remainder is below 1e-21 for every s >= 2.
double zeta_minus_one(int s)
{
    constexpr int kCut = 16;
    static constexpr std::array<double, 8> kBernoulli = {
        1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};

    const double N = kCut;
    CompensatedSum acc;
    double corr = 0.0;
    double rising = s; // s (s+1) ... (s+2j-2)
    double fact = 2.0; // (2j)!
    double power = std::pow(N, -s - 1);
    for (int j = 1; j <= 8; ++j) {
        corr += kBernoulli[j - 1] / fact * rising * power;
        rising *= (s + 2 * j - 1) * static_cast<double>(s + 2 * j);
        fact *= (2.0 * j + 1) * (2.0 * j + 2);
        power /= N * N;
    }
    acc += corr;
    acc += std::pow(N, -s) / 2;
    acc += std::pow(N, 1 - s) / (s - 1);
    for (int k = kCut - 1; k >= 2; --k)
        acc += std::pow(static_cast<double>(k), -s);
    return acc.value();
}

// Sum over all primes of p^-k, via sum_m mu(m)/m log zeta(mk).
double prime_zeta(int k)
{
    CompensatedSum acc;
    for (int m = 1; m * k <= 70; ++m) {
        const int mu = arith::mobius(static_cast<std::uint64_t>(m));
        if (mu == 0)
            continue;
        acc += mu * std::log1p(zeta_minus_one(m * k)) / m;
    }
    return acc.value();
}

} // namespace

CertifiedValue artin_constant(int target_digits)
{
    if (target_digits < 1 || target_digits > kArtinMaxDigits)
        throw std::invalid_argument("artin_constant: target_digits must be in [1, 15]");
    const double target = std::pow(10.0, -target_digits);

    const sieve::BasePrimes head(kArtinHeadLimit);
    CompensatedSum log_c;
    for (std::uint32_t p : head.primes()) {
        const double pd = p;
        log_c += std::log1p(-1.0 / (pd * (pd - 1.0)));
    }

    // log(1 - 1/(p(p-1))) = -sum_{k>=2} (L_k - 1)/k p^-k with L_k the Lucas
    // numbers. Truncating after K terms costs at most
    // P (phi/P)^{K+1} / (K (K+1) (1 - phi/P)), using sum_{p>P} p^-k <= P^{1-k}/(k-1).
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double P = kArtinHeadLimit;
    const double ratio = golden / P;
    auto truncation = [&](int K) {
        return P * std::pow(ratio, K + 1) / (K * (K + 1.0) * (1.0 - ratio));
    };
    int K = 2;
    while (truncation(K) > target * 1e-3)
        ++K;

    double lucas_prev = 1.0; // L_1
    double lucas = 3.0;      // L_2
    for (int k = 2; k <= K; ++k) {
        CompensatedSum head_power;
        for (auto it = head.primes().rbegin(); it != head.primes().rend(); ++it)
            head_power += std::pow(static_cast<double>(*it), -k);
        const double tail_power = prime_zeta(k) - head_power.value();
        log_c += -(lucas - 1.0) / k * tail_power;
        const double next = lucas + lucas_prev;
        lucas_prev = lucas;
        lucas = next;
    }

    const double value = std::exp(log_c.value());
    const double error = value * std::expm1(truncation(K)) + kArtinRounding;
    return {value, error};
}

double sn_exact(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("sn_exact: n must be positive");
    static const double c = artin_constant(kArtinMaxDigits).value;
    double local = 1.0;
    for (const auto& f : arith::factorize(n).factors) {
        const double p = static_cast<double>(f.prime);
        local *= 1.0 - 1.0 / (p * (p - 1.0));
    }
    return c / local;
}

double sn_lower_bound(std::uint64_t n, double floor)
{
    return std::max(sn_exact(n), floor);
}

EpsilonTable EpsilonTable::from_entries(std::vector<EpsilonEntry> entries, std::string source_label)
{
    std::set<std::uint64_t> seen;
    for (const auto& e : entries) {
        if (e.a < 1 || e.a > kSmallModulusLimit)
            throw std::runtime_error("epsilon table: a = " + std::to_string(e.a) + " outside [1, 13]");
        if (!seen.insert(e.a).second)
            throw std::runtime_error("epsilon table: duplicate entry for a = " + std::to_string(e.a));
        if (!(e.epsilon >= 0.0) || !std::isfinite(e.epsilon))
            throw std::runtime_error("epsilon table: epsilon for a = " + std::to_string(e.a) +
                                     " must be finite and nonnegative");
        if (e.valid_from > kCertifiedFrom)
            throw std::runtime_error("epsilon table: valid_from for a = " + std::to_string(e.a) +
                                     " exceeds 10^10");
    }
    for (std::uint64_t a = 1; a <= kSmallModulusLimit; ++a) {
        if (arith::mu2(a) == 1 && !seen.count(a))
            throw std::runtime_error("epsilon table: missing entry for square-free a = " + std::to_string(a));
    }
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.a < y.a; });

    EpsilonTable table;
    table.entries_ = std::move(entries);
    table.source_label_ = std::move(source_label);
    const double sum = epsilon_term(table, 1);
    if (sum >= kEpsSumCap) {
        std::ostringstream msg;
        msg << "epsilon table: weighted sum " << sum << " is not below " << kEpsSumCap;
        throw std::runtime_error(msg.str());
    }
    return table;
}

EpsilonTable EpsilonTable::parse(std::istream& in)
{
    std::string line;
    std::string label;
    bool have_label = false;
    std::vector<EpsilonEntry> entries;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);

        if (!have_label) {
            constexpr std::string_view kKey = "source:";
            if (line.compare(0, kKey.size(), kKey) != 0)
                throw std::runtime_error("epsilon table: line " + std::to_string(line_no) +
                                         ": expected 'source:' header");
            label = line.substr(kKey.size());
            label.erase(0, label.find_first_not_of(" \t"));
            if (label.empty())
                throw std::runtime_error("epsilon table: empty source label");
            have_label = true;
            continue;
        }

        std::istringstream fields(line);
        EpsilonEntry e{};
        std::string extra;
        if (!(fields >> e.a >> e.epsilon >> e.valid_from) || (fields >> extra))
            throw std::runtime_error("epsilon table: line " + std::to_string(line_no) +
                                     ": expected '<a> <epsilon> <valid_from>'");
        if (!(e.epsilon > 0.0))
            throw std::runtime_error("epsilon table: line " + std::to_string(line_no) +
                                     ": epsilon must be positive");
        entries.push_back(e);
    }
    if (!have_label)
        throw std::runtime_error("epsilon table: missing 'source:' header");
    return from_entries(std::move(entries), std::move(label));
}

EpsilonTable EpsilonTable::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("epsilon table: cannot open " + path);
    return parse(in);
}

std::uint64_t EpsilonTable::valid_from() const
{
    std::uint64_t v = 0;
    for (const auto& e : entries_) {
        if (arith::mu2(e.a) == 1)
            v = std::max(v, e.valid_from);
    }
    return v;
}

double epsilon_term(const EpsilonTable& table, std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("epsilon_term: n must be positive");
    CompensatedSum acc;
    for (std::uint64_t a = 1; a <= kSmallModulusLimit; ++a) {
        if (arith::mu2(a) == 0)
            continue;
        const auto it = std::find_if(table.entries().begin(), table.entries().end(),
                                     [a](const auto& e) { return e.a == a; });
        if (it == table.entries().end())
            throw std::invalid_argument("epsilon_term: table has no entry for a = " + std::to_string(a));
        acc += it->epsilon / static_cast<double>(arith::totient(a * a));
    }
    return acc.value();
}

double squarefree_phi_partial_sum(std::uint64_t limit)
{
    if (limit == 0)
        return 0.0;
    // Smallest-prime-factor sieve; phi(a^2) = a phi(a).
    std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf[i] != 0)
            continue;
        for (std::uint64_t j = i; j <= limit; j += i) {
            if (spf[j] == 0)
                spf[j] = static_cast<std::uint32_t>(i);
        }
    }
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(limit));
    for (std::uint64_t a = 1; a <= limit; ++a) {
        std::uint64_t rest = a;
        double phi = 1.0;
        bool squarefree = true;
        while (rest > 1) {
            const std::uint64_t p = spf[rest];
            rest /= p;
            if (rest % p == 0) {
                squarefree = false;
                break;
            }
            phi *= static_cast<double>(p - 1);
        }
        if (squarefree)
            terms.push_back(1.0 / (static_cast<double>(a) * phi));
    }
    CompensatedSum acc;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it)
        acc += *it;
    return acc.value();
}

double squarefree_phi_tail(std::uint64_t cutoff)
{
    if (cutoff < 1)
        throw std::invalid_argument("squarefree_phi_tail: cutoff must be positive");
    const double partial = squarefree_phi_partial_sum(cutoff);
    if (partial >= kInfiniteSumCap)
        throw std::domain_error("squarefree_phi_tail: partial sum reaches the 1.95 cap");
    return kInfiniteSumCap - partial;
}

double brun_titchmarsh_bound(std::uint64_t n, std::uint64_t a)
{
    if (a == 0)
        throw std::invalid_argument("brun_titchmarsh_bound: a must be positive");
    if (a > arith::isqrt(n) || a * a >= n)
        throw std::invalid_argument("brun_titchmarsh_bound: require a^2 < n");
    const double nd = static_cast<double>(n);
    const double q = static_cast<double>(a * a);
    const double phi = static_cast<double>(arith::totient(a * a));
    return 2.0 * (std::log(nd) / std::log(nd / q)) * nd / phi;
}

double sigma3_trivial_bound(std::uint64_t n, double A)
{
    if (!(A > 0.0 && A < 0.5))
        throw std::invalid_argument("sigma3_trivial_bound: A must lie in (0, 1/2)");
    if (n < 2)
        throw std::invalid_argument("sigma3_trivial_bound: n must be at least 2");
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);
    return std::pow(nd, 1.0 - 2.0 * A) * log_n + std::pow(nd, 1.0 - A) * log_n;
}

void BoundParams::validate() const
{
    if (!(A > 0.0 && A < 0.5))
        throw std::invalid_argument("bound: A must lie in (0, 1/2)");
    if (!(sn_floor > 0.0 && eps_sum_cap > 0.0 && tail_sum_cap > 0.0 && infinite_sum_cap > 0.0))
        throw std::invalid_argument("bound: every cap must be positive");
}

double BoundBreakdown::recompute() const
{
    return sn_lower - eps_term - bt_factor * tail_sum_cap - tail_half - tail_2A - tail_A;
}

namespace {

BoundBreakdown certified_terms(double n, double A, const BoundParams& params)
{
    if (!(n >= 2.0) || !std::isfinite(n))
        throw std::invalid_argument("lower_bound: n must be at least 2");
    BoundParams p = params;
    p.A = A;
    p.validate();

    const double nd = n;
    const double log_n = std::log(nd);
    BoundBreakdown b;
    b.n = n;
    b.A = A;
    b.sn_lower = params.sn_floor;
    b.eps_term = params.eps_sum_cap;
    b.bt_factor = (1.0 + 2.0 * A) / (1.0 - 2.0 * A);
    b.tail_sum_cap = params.tail_sum_cap;
    b.bt_term = b.bt_factor * b.tail_sum_cap;
    b.tail_half = log_n / std::sqrt(nd);
    b.tail_2A = std::pow(nd, -2.0 * A) * log_n;
    b.tail_A = std::pow(nd, -A) * log_n;
    b.lower_bound = b.recompute();
    // Six terms, each padded against rounding.
    b.positive = b.lower_bound - 6 * kTermSlack > 0.0;
    b.heuristic = n < static_cast<double>(kCertifiedFrom);
    return b;
}

void attach_table(BoundBreakdown& b, const BoundParams& params, const EpsilonTable& table)
{
    b.table_eps_sum = epsilon_term(table, 1);
    b.table_source = table.source_label();
    if (b.table_eps_sum + kTermSlack >= params.eps_sum_cap)
        throw std::invalid_argument("lower_bound: epsilon table sum is not below the configured cap");
    if (b.n < static_cast<double>(table.valid_from()))
        b.heuristic = true;
}

} // namespace

BoundBreakdown lower_bound(std::uint64_t n, const BoundParams& params, const EpsilonTable& table)
{
    auto b = certified_terms(static_cast<double>(n), params.A, params);
    attach_table(b, params, table);
    b.sn_exact = sn_exact(n);
    if (b.sn_exact + kTermSlack < params.sn_floor)
        throw std::invalid_argument("lower_bound: S_n falls below the configured floor");
    return b;
}

BoundBreakdown lower_bound_real(double n, const BoundParams& params, const EpsilonTable& table)
{
    auto b = certified_terms(n, params.A, params);
    attach_table(b, params, table);
    return b;
}

double lower_bound_value(double n, double A, const BoundParams& params)
{
    return certified_terms(n, A, params).lower_bound;
}

OptimizedBound optimize_A(double n, const BoundParams& params)
{
    if (!(n >= 100.0))
        throw std::invalid_argument("optimize_A: n must be at least 100");
    constexpr double kTol = 1e-6;
    const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-9;
    double hi = 0.5 - 1e-9;
    auto f = [&](double A) { return lower_bound_value(n, A, params); };

    double x1 = hi - inv_golden * (hi - lo);
    double x2 = lo + inv_golden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > kTol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_golden * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_golden * (hi - lo);
            f1 = f(x1);
        }
    }
    const double best = (lo + hi) / 2.0;
    return {best, f(best)};
}

} // namespace sqfree::bounds
