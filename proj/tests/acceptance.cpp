// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "sqfree/bounds.hpp"
#include "sqfree/representations.hpp"
#include "sqfree/sieve.hpp"
#include "sqfree/verify.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>

using namespace sqfree;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    fmt::print("{} criterion {:>2}: {} ({}; {:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail,
               seconds_since(t0));
    std::fflush(stdout);
}

Outcome artin()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = bounds::artin_constant(7);
    const double elapsed = seconds_since(t0);
    const double err = std::fabs(c.value - 0.3739558);
    return {err <= 1e-7 && elapsed < 1.0, fmt::format("c = {:.10f}, |c - 0.3739558| = {:.2e}, {:.3f} s", c.value,
                                                      err, elapsed)};
}

Outcome tail()
{
    const double t = bounds::squarefree_phi_tail(13);
    return {t > 0.085 && t < 0.086, fmt::format("tail(13) = {:.9f}", t)};
}

Outcome positivity()
{
    const auto table = bounds::EpsilonTable::load(SQFREE_DEFAULT_EPSILON_TABLE);
    bounds::BoundParams params;
    params.A = 0.25;
    const auto b10 = bounds::lower_bound(10'000'000'000ull, params, table);
    bool ok = b10.positive && b10.lower_bound > 0 && std::fabs(b10.lower_bound - 0.0367) <= 0.0005;
    double smallest = b10.lower_bound;
    std::uint64_t n = 10'000'000'000ull;
    for (int k = 11; k <= 19; ++k) {
        n *= 10;
        const auto b = bounds::lower_bound(n, params, table);
        ok = ok && b.positive && b.lower_bound > 0;
        smallest = std::min(smallest, b.lower_bound);
    }
    const auto b20 = bounds::lower_bound_real(1e20, params, table);
    ok = ok && b20.positive && b20.lower_bound > 0;
    smallest = std::min(smallest, b20.lower_bound);
    return {ok, fmt::format("bound(1e10) = {:.6f}, min over 1e10..1e20 = {:.6f}", b10.lower_bound, smallest)};
}

Outcome identity()
{
    const rep::RepresentationTable table(1'000'000);
    double worst = 0.0;
    std::uint64_t worst_n = 0;
    auto check = [&](std::uint64_t n) {
        const double r = table.compute_R(n);
        const double m = table.compute_R_mobius(n);
        const double rel = std::fabs(r - m) / std::max(r, 1.0);
        if (rel > worst) {
            worst = rel;
            worst_n = n;
        }
    };
    for (std::uint64_t n = 3; n <= 10'000; ++n)
        check(n);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::uint64_t> dist(3, 1'000'000);
    for (int i = 0; i < 100; ++i)
        check(dist(rng));
    return {worst <= 1e-9, fmt::format("max relative difference {:.2e} at n = {}", worst, worst_n)};
}

Outcome inequality()
{
    bool ok = true;
    std::string detail;
    for (std::uint64_t n : {1'000ull, 10'000ull, 100'000ull, 1'000'000ull}) {
        const auto s = rep::sigma_split(n, 0.25);
        const double r = rep::compute_R(n);
        const double rhs = s.sigma1 + s.sigma2 + s.sigma3 - std::sqrt(static_cast<double>(n)) * std::log(n);
        ok = ok && r > rhs;
        detail += fmt::format("{}n={}: R={:.1f} > {:.1f}", detail.empty() ? "" : ", ", n, r, rhs);
    }
    return {ok, detail};
}

Outcome sigma3()
{
    bool ok = true;
    double worst = 0.0;
    for (std::uint64_t n : {10'000ull, 100'000ull, 1'000'000ull}) {
        for (double A : {0.2, 0.25, 0.3}) {
            const auto s = rep::sigma_split(n, A);
            const double bound = bounds::sigma3_trivial_bound(n, A);
            for (double v : {s.sigma3, s.sigma3_full}) {
                ok = ok && std::fabs(v) <= bound;
                worst = std::max(worst, std::fabs(v) / bound);
            }
        }
    }
    return {ok, fmt::format("max |sigma3| / bound = {:.4f}", worst)};
}

Outcome verification()
{
    verify::VerifyConfig c;
    c.lo = 3;
    c.hi = 100'000'000;
    c.worker_count = std::max(1u, std::thread::hardware_concurrency());
    const auto r = verify::verify_range(c);
    const bool ok = r.complete() && r.failures.empty() && r.verified_count == r.examined &&
                    r.examined == c.hi - c.lo && r.wall_time_seconds <= 600.0;
    return {ok, fmt::format("{} verified, {} failures, {} escalated, {} workers, {:.1f} s", r.verified_count,
                            r.failures.size(), r.escalated_count, c.worker_count, r.wall_time_seconds)};
}

Outcome brun_titchmarsh()
{
    const std::uint64_t limit = 10'000'000;
    const sieve::PrimeTable table(limit + 1);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::uint64_t> n_dist(1'000, limit);
    int checked = 0;
    double worst = 0.0;
    bool ok = true;
    while (checked < 1000) {
        const std::uint64_t n = n_dist(rng);
        std::uniform_int_distribution<std::uint64_t> a_dist(1, static_cast<std::uint64_t>(std::sqrt(n - 1.0)));
        const std::uint64_t a = a_dist(rng);
        if (a * a >= n)
            continue;
        const double th = sieve::theta(table, sieve::ThetaQuery(n, a * a, n % (a * a)));
        const double bound = bounds::brun_titchmarsh_bound(n, a);
        ok = ok && th < bound;
        worst = std::max(worst, th / bound);
        ++checked;
    }
    return {ok, fmt::format("{} pairs, max theta / bound = {:.4f}", checked, worst)};
}

Outcome asymptotics()
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::uint64_t> dist(100'000, 1'000'000);
    double sum = 0.0;
    for (int i = 0; i < 100; ++i)
        sum += rep::asymptotic_ratio(dist(rng));
    const double mean = sum / 100.0;
    return {mean >= 0.85 && mean <= 1.15, fmt::format("mean ratio {:.6f}", mean)};
}

Outcome determinism()
{
    bool ok = true;
    std::string detail;
    for (std::uint64_t chunk : {std::uint64_t{1} << 20, std::uint64_t{1} << 16}) {
        verify::VerifyConfig c;
        c.lo = 3;
        c.hi = 1'000'000;
        c.chunk_size = chunk;
        std::string reference;
        for (unsigned w : {1u, 4u, 16u}) {
            c.worker_count = w;
            const auto dump = verify::to_json(verify::verify_range(c), false).dump();
            if (reference.empty())
                reference = dump;
            ok = ok && dump == reference;
        }

        const auto path =
            (std::filesystem::temp_directory_path() / fmt::format("sqfree-acceptance-{}.ckpt", chunk)).string();
        std::filesystem::remove(path);
        c.worker_count = 4;
        c.checkpoint_path = path;
        const std::uint64_t half = std::max<std::uint64_t>(1, c.total_chunks() / 2);
        verify::VerifyHooks hooks;
        hooks.interrupt = [half](std::uint64_t merged) { return merged == half; };
        const auto partial = verify::verify_range(c, hooks);
        const auto resumed = verify::resume(path, c);
        ok = ok && resumed.complete() && verify::to_json(resumed, false).dump() == reference;
        std::filesystem::remove(path);
        detail += fmt::format("{}chunk {}: {} chunks, interrupted at {}", detail.empty() ? "" : ", ", chunk,
                              c.total_chunks(), partial.next_chunk);
    }
    return {ok, detail};
}

} // namespace

int main()
{
    criterion(1, "Artin constant to 7 digits", artin);
    criterion(2, "tail of 1/phi(a^2) beyond 13", tail);
    criterion(3, "final lower bound positive from 1e10 to 1e20", positivity);
    criterion(4, "R(n) equals its Mobius rearrangement", identity);
    criterion(5, "R(n) exceeds sigma1 + sigma2 + sigma3 - sqrt(n) log n", inequality);
    criterion(6, "sigma3 within its trivial bound", sigma3);
    criterion(7, "every n in [3, 1e8) is a prime plus a square-free number", verification);
    criterion(8, "Brun-Titchmarsh bound holds on random progressions", brun_titchmarsh);
    criterion(9, "mean asymptotic ratio near 1", asymptotics);
    criterion(10, "verification output independent of workers and interruption", determinism);
    fmt::print("{} of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
