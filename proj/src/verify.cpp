#include "sqfree/verify.hpp"

#include "sqfree/arith.hpp"
#include "sqfree/sieve.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace sqfree::verify {

namespace {

constexpr const char* kCheckpointMagic = "sqfree-verify-checkpoint";
constexpr int kCheckpointVersion = 1;

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct ChunkResult {
    std::uint64_t examined = 0;
    std::uint64_t verified = 0;
    std::uint64_t escalated = 0;
    std::vector<std::uint64_t> failures;
    std::map<std::uint64_t, std::uint64_t> histogram;
};

void merge(VerifyReport& into, const ChunkResult& chunk)
{
    into.examined += chunk.examined;
    into.verified_count += chunk.verified;
    into.escalated_count += chunk.escalated;
    into.failures.insert(into.failures.end(), chunk.failures.begin(), chunk.failures.end());
    for (const auto& [attempts, freq] : chunk.histogram) {
        into.attempt_histogram[attempts] += freq;
        into.max_attempts_seen = std::max(into.max_attempts_seen, attempts);
    }
}

class ChunkWorker {
public:
    ChunkWorker(const VerifyConfig& config, const VerifyHooks& hooks)
        : config_(config)
        , hooks_(hooks)
        , candidates_(squarefree_sequence(config.max_attempts))
        , sieve_(config.hi, config.chunk_size + candidates_.back() + 1)
    {
    }

    ChunkResult run(std::uint64_t chunk) const
    {
        const std::uint64_t lo = config_.lo + chunk * config_.chunk_size;
        const std::uint64_t hi = std::min(config_.hi, lo + config_.chunk_size);
        const std::uint64_t reach = candidates_.back();
        const auto window = sieve_.build_window(lo > reach ? lo - reach : 0, hi);

        ChunkResult out;
        std::uint64_t first = lo;
        const std::uint64_t step = config_.parity == Parity::odd ? 2 : 1;
        if (config_.parity == Parity::odd && first % 2 == 0)
            ++first;
        for (std::uint64_t n = first; n < hi; n += step) {
            ++out.examined;
            std::uint64_t attempts = 0;
            bool found = false;
            if (!(hooks_.force_not_found && hooks_.force_not_found(n))) {
                for (std::uint64_t s : candidates_) {
                    if (s + 2 > n)
                        break;
                    ++attempts;
                    if (window.is_prime(n - s)) {
                        found = true;
                        break;
                    }
                }
            }
            if (!found) {
                ++out.escalated;
                const auto w = exhaustive_witness(n);
                if (!w) {
                    out.failures.push_back(n);
                    continue;
                }
                attempts = w->attempts;
            }
            ++out.verified;
            ++out.histogram[attempts];
        }
        return out;
    }

private:
    const VerifyConfig& config_;
    const VerifyHooks& hooks_;
    std::vector<std::uint64_t> candidates_;
    sieve::Sieve sieve_;
};

VerifyReport run_from(VerifyReport state, const VerifyHooks& hooks)
{
    const auto started = std::chrono::steady_clock::now();
    const VerifyConfig& config = state.config;
    const std::uint64_t total = state.total_chunks;
    const std::uint64_t begin = state.next_chunk;
    const bool checkpointing = !config.checkpoint_path.empty();

    if (begin >= total) {
        state.wall_time_seconds = 0.0;
        return state;
    }

    const ChunkWorker worker(config, hooks);
    const unsigned workers = config.worker_count;

    std::mutex mutex;
    std::condition_variable ready_cv;
    std::vector<std::optional<ChunkResult>> slots(static_cast<std::size_t>(total - begin));
    std::atomic<bool> stop{false};
    std::exception_ptr worker_error;

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::uint64_t c = begin + w; c < total; c += workers) {
                    if (stop.load())
                        break;
                    auto result = worker.run(c);
                    std::lock_guard lock(mutex);
                    slots[c - begin] = std::move(result);
                    ready_cv.notify_all();
                }
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!worker_error)
                    worker_error = std::current_exception();
                stop = true;
                ready_cv.notify_all();
            }
        });
    }

    auto finish = [&] {
        stop = true;
        for (auto& t : threads)
            t.join();
    };

    std::uint64_t examined_at_checkpoint = state.examined;
    try {
        while (state.next_chunk < total) {
            ChunkResult chunk;
            {
                std::unique_lock lock(mutex);
                ready_cv.wait(lock, [&] { return slots[state.next_chunk - begin].has_value() || worker_error; });
                if (worker_error)
                    break;
                chunk = std::move(*slots[state.next_chunk - begin]);
                slots[state.next_chunk - begin].reset();
            }
            merge(state, chunk);
            ++state.next_chunk;

            const bool interrupted = hooks.interrupt && hooks.interrupt(state.next_chunk);
            const bool due = state.examined - examined_at_checkpoint >= config.checkpoint_every;
            if (checkpointing && (due || interrupted || state.next_chunk == total)) {
                write_checkpoint(config.checkpoint_path, state);
                examined_at_checkpoint = state.examined;
            }
            if (interrupted)
                break;
        }
    } catch (...) {
        finish();
        throw;
    }
    finish();
    if (worker_error)
        std::rethrow_exception(worker_error);

    state.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return state;
}

VerifyReport fresh_state(const VerifyConfig& config)
{
    VerifyReport state;
    state.config = config;
    state.total_chunks = config.total_chunks();
    return state;
}

} // namespace

std::string to_string(Parity p)
{
    return p == Parity::odd ? "odd" : "all";
}

Parity parse_parity(const std::string& text)
{
    if (text == "all")
        return Parity::all;
    if (text == "odd")
        return Parity::odd;
    throw std::invalid_argument("parity must be 'all' or 'odd', got '" + text + "'");
}

void VerifyConfig::validate() const
{
    if (lo < 3)
        throw std::invalid_argument("verify: lo must be at least 3");
    if (hi <= lo)
        throw std::invalid_argument("verify: hi must exceed lo");
    if (hi > sieve::kMaxHi)
        throw std::invalid_argument("verify: hi exceeds 2^63");
    if (max_attempts < 1)
        throw std::invalid_argument("verify: max_attempts must be positive");
    if (chunk_size < 1)
        throw std::invalid_argument("verify: chunk_size must be positive");
    if (checkpoint_every < 1)
        throw std::invalid_argument("verify: checkpoint_every must be positive");
    if (worker_count < 1)
        throw std::invalid_argument("verify: worker_count must be positive");
}

std::string VerifyConfig::digest() const
{
    const auto canonical = fmt::format("lo={};hi={};parity={};max_attempts={};chunk_size={}", lo, hi,
                                       to_string(parity), max_attempts, chunk_size);
    return fmt::format("{:016x}", fnv1a(canonical));
}

std::uint64_t VerifyConfig::total_chunks() const
{
    return (hi - lo + chunk_size - 1) / chunk_size;
}

std::vector<std::uint64_t> squarefree_sequence(std::uint64_t count)
{
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t s = 1; out.size() < count; ++s) {
        if (arith::mu2(s) == 1)
            out.push_back(s);
    }
    return out;
}

std::optional<Witness> find_witness(std::uint64_t n, std::uint64_t max_attempts)
{
    if (n < 3)
        throw std::invalid_argument("find_witness: n must be at least 3");
    std::uint64_t attempts = 0;
    for (std::uint64_t s = 1; s + 2 <= n && attempts < max_attempts; ++s) {
        if (arith::mu2(s) == 0)
            continue;
        ++attempts;
        if (arith::is_prime(n - s))
            return Witness{{n, n - s, s}, attempts};
    }
    return std::nullopt;
}

std::optional<Witness> exhaustive_witness(std::uint64_t n)
{
    if (n < 3)
        throw std::invalid_argument("exhaustive_witness: n must be at least 3");
    return find_witness(n, n);
}

double VerifyReport::mean_attempts() const
{
    std::uint64_t count = 0;
    long double total = 0;
    for (const auto& [attempts, freq] : attempt_histogram) {
        count += freq;
        total += static_cast<long double>(attempts) * freq;
    }
    return count == 0 ? 0.0 : static_cast<double>(total / count);
}

VerifyReport verify_range(const VerifyConfig& config, const VerifyHooks& hooks)
{
    config.validate();
    return run_from(fresh_state(config), hooks);
}

VerifyReport resume(const std::string& checkpoint_path, unsigned worker_count, const VerifyHooks& hooks)
{
    auto state = read_checkpoint(checkpoint_path);
    state.config.worker_count = worker_count;
    state.config.checkpoint_path = checkpoint_path;
    state.config.validate();
    return run_from(std::move(state), hooks);
}

VerifyReport resume(const std::string& checkpoint_path, const VerifyConfig& expected, const VerifyHooks& hooks)
{
    expected.validate();
    const auto stored = read_checkpoint(checkpoint_path);
    if (stored.config.digest() != expected.digest())
        throw CheckpointMismatch(fmt::format(
            "checkpoint {} records [{}, {}) parity {} max_attempts {} chunk_size {}, which differs from "
            "the requested run",
            checkpoint_path, stored.config.lo, stored.config.hi, to_string(stored.config.parity),
            stored.config.max_attempts, stored.config.chunk_size));
    return resume(checkpoint_path, expected.worker_count, hooks);
}

void write_checkpoint(const std::string& path, const VerifyReport& state)
{
    const auto& c = state.config;
    std::ostringstream out;
    out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    out << "digest " << c.digest() << '\n';
    out << "lo " << c.lo << '\n';
    out << "hi " << c.hi << '\n';
    out << "parity " << to_string(c.parity) << '\n';
    out << "max_attempts " << c.max_attempts << '\n';
    out << "chunk_size " << c.chunk_size << '\n';
    out << "checkpoint_every " << c.checkpoint_every << '\n';
    out << "next_chunk " << state.next_chunk << '\n';
    out << "examined " << state.examined << '\n';
    out << "verified " << state.verified_count << '\n';
    out << "escalated " << state.escalated_count << '\n';
    out << "max_attempts_seen " << state.max_attempts_seen << '\n';
    out << "failures " << state.failures.size();
    for (auto n : state.failures)
        out << ' ' << n;
    out << '\n';
    out << "histogram " << state.attempt_histogram.size();
    for (const auto& [k, v] : state.attempt_histogram)
        out << ' ' << k << ':' << v;
    out << '\n';

    const std::string tmp = path + ".tmp";
    {
        std::ofstream file(tmp, std::ios::trunc);
        file << out.str();
        file.flush();
        if (!file)
            throw CheckpointError("cannot write checkpoint " + tmp, state.next_chunk);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw CheckpointError("cannot replace checkpoint " + path, state.next_chunk);
    }
}

VerifyReport read_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open checkpoint " + path);

    auto fail = [&](const std::string& what) {
        return std::runtime_error("checkpoint " + path + ": " + what);
    };
    auto expect_key = [&](const char* key) {
        std::string got;
        if (!(in >> got) || got != key)
            throw fail(std::string("expected '") + key + "'");
    };
    auto read_u64 = [&](const char* key) {
        expect_key(key);
        std::uint64_t v = 0;
        if (!(in >> v))
            throw fail(std::string("bad value for '") + key + "'");
        return v;
    };

    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kCheckpointMagic || version != kCheckpointVersion)
        throw fail("not a version 1 checkpoint");

    expect_key("digest");
    std::string digest;
    in >> digest;

    VerifyReport state;
    auto& c = state.config;
    c.lo = read_u64("lo");
    c.hi = read_u64("hi");
    expect_key("parity");
    std::string parity;
    in >> parity;
    c.parity = parse_parity(parity);
    c.max_attempts = read_u64("max_attempts");
    c.chunk_size = read_u64("chunk_size");
    c.checkpoint_every = read_u64("checkpoint_every");
    c.validate();
    if (c.digest() != digest)
        throw fail("digest does not match recorded config");

    state.total_chunks = c.total_chunks();
    state.next_chunk = read_u64("next_chunk");
    if (state.next_chunk > state.total_chunks)
        throw fail("next_chunk beyond the range");
    state.examined = read_u64("examined");
    state.verified_count = read_u64("verified");
    state.escalated_count = read_u64("escalated");
    state.max_attempts_seen = read_u64("max_attempts_seen");
    const auto failures = read_u64("failures");
    for (std::uint64_t i = 0; i < failures; ++i) {
        std::uint64_t n = 0;
        if (!(in >> n))
            throw fail("truncated failure list");
        state.failures.push_back(n);
    }
    const auto buckets = read_u64("histogram");
    for (std::uint64_t i = 0; i < buckets; ++i) {
        std::string entry;
        if (!(in >> entry))
            throw fail("truncated histogram");
        const auto colon = entry.find(':');
        if (colon == std::string::npos)
            throw fail("bad histogram entry '" + entry + "'");
        state.attempt_histogram[std::stoull(entry.substr(0, colon))] = std::stoull(entry.substr(colon + 1));
    }
    return state;
}

nlohmann::json to_json(const VerifyReport& report, bool include_run_info)
{
    const auto& c = report.config;
    nlohmann::json histogram = nlohmann::json::object();
    for (const auto& [k, v] : report.attempt_histogram)
        histogram[std::to_string(k)] = v;

    nlohmann::json j = {
        {"config",
         {{"lo", c.lo},
          {"hi", c.hi},
          {"parity", to_string(c.parity)},
          {"max_attempts", c.max_attempts},
          {"chunk_size", c.chunk_size},
          {"digest", c.digest()}}},
        {"examined", report.examined},
        {"verified_count", report.verified_count},
        {"failures", report.failures},
        {"escalated_count", report.escalated_count},
        {"max_attempts_seen", report.max_attempts_seen},
        {"mean_attempts", report.mean_attempts()},
        {"attempt_histogram", histogram},
        {"checkpoint",
         {{"next_chunk", report.next_chunk},
          {"total_chunks", report.total_chunks},
          {"complete", report.complete()}}},
        {"theorem_holds_on_range", report.complete() && report.holds()},
    };
    if (include_run_info)
        j["run"] = {{"worker_count", c.worker_count}, {"wall_time_seconds", report.wall_time_seconds}};
    return j;
}

std::string summary(const VerifyReport& report)
{
    const auto& c = report.config;
    std::string out = fmt::format("range          [{}, {}) parity {}\n", c.lo, c.hi, to_string(c.parity));
    out += fmt::format("examined       {}\n", report.examined);
    out += fmt::format("verified       {}\n", report.verified_count);
    out += fmt::format("failures       {}\n", report.failures.size());
    for (auto n : report.failures)
        out += fmt::format("  {}\n", n);
    out += fmt::format("escalated      {}\n", report.escalated_count);
    out += fmt::format("max attempts   {}\n", report.max_attempts_seen);
    out += fmt::format("mean attempts  {:.4f}\n", report.mean_attempts());
    out += fmt::format("chunks         {}/{}{}\n", report.next_chunk, report.total_chunks,
                       report.complete() ? "" : " (incomplete, resumable)");
    out += fmt::format("workers        {}\n", c.worker_count);
    out += fmt::format("wall time      {:.3f} s\n", report.wall_time_seconds);
    return out;
}

} // namespace sqfree::verify
