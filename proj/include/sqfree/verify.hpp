#pragma once

// Exhaustive check that every n in a range is a prime plus a square-free
// number, with parallel chunking and resumable checkpoints.

#include "sqfree/representations.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqfree::verify {

enum class Parity { all, odd };

std::string to_string(Parity p);
Parity parse_parity(const std::string& text);

struct VerifyConfig {
    std::uint64_t lo = 3;
    std::uint64_t hi = 4; // exclusive
    Parity parity = Parity::all;
    std::uint64_t max_attempts = 200;
    std::uint64_t chunk_size = std::uint64_t{1} << 20;
    // Checkpoint after at least this many newly examined n.
    std::uint64_t checkpoint_every = std::uint64_t{1} << 24;
    unsigned worker_count = 1;
    // Empty disables checkpointing.
    std::string checkpoint_path;

    // Throws std::invalid_argument on lo < 3, hi <= lo, zero attempts,
    // zero chunk size, or zero workers.
    void validate() const;

    // Hash of the fields that determine the report.
    std::string digest() const;
    std::uint64_t total_chunks() const;
};

// A representation found by trying square-free s = 1, 2, 3, 5, 6, ... in
// increasing order; attempts is the 1-based position of s in that order.
struct Witness {
    rep::Representation rep;
    std::uint64_t attempts;
};

// First witness among the first max_attempts square-free s with n - s >= 2.
std::optional<Witness> find_witness(std::uint64_t n, std::uint64_t max_attempts);

// Same ordering with no attempt limit; nullopt means n has no representation.
std::optional<Witness> exhaustive_witness(std::uint64_t n);

// The first count square-free integers.
std::vector<std::uint64_t> squarefree_sequence(std::uint64_t count);

struct VerifyReport {
    VerifyConfig config;
    std::uint64_t examined = 0;
    std::uint64_t verified_count = 0;
    std::vector<std::uint64_t> failures;
    // n whose fast search ran out of candidates and went to exhaustive search.
    std::uint64_t escalated_count = 0;
    std::uint64_t max_attempts_seen = 0;
    // attempts -> number of n whose first witness sat at that position.
    std::map<std::uint64_t, std::uint64_t> attempt_histogram;
    std::uint64_t next_chunk = 0;
    std::uint64_t total_chunks = 0;
    double wall_time_seconds = 0.0;

    bool complete() const { return next_chunk == total_chunks; }
    bool holds() const { return failures.empty(); }
    double mean_attempts() const;
};

struct VerifyHooks {
    // Forces the fast search to report NotFound for n, exercising escalation.
    std::function<bool(std::uint64_t n)> force_not_found;
    // Polled after each merged chunk with the number merged so far; returning
    // true stops the run at that point.
    std::function<bool(std::uint64_t merged_chunks)> interrupt;
};

class CheckpointError : public std::runtime_error {
public:
    CheckpointError(const std::string& what, std::uint64_t next_chunk)
        : std::runtime_error(what)
        , next_chunk_(next_chunk)
    {
    }
    // First chunk not covered by the last checkpoint successfully written.
    std::uint64_t next_chunk() const { return next_chunk_; }

private:
    std::uint64_t next_chunk_;
};

class CheckpointMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

VerifyReport verify_range(const VerifyConfig& config, const VerifyHooks& hooks = {});

// Continues the run recorded at checkpoint_path with the given worker count.
VerifyReport resume(const std::string& checkpoint_path, unsigned worker_count = 1,
                    const VerifyHooks& hooks = {});
// As above, rejecting a checkpoint whose config differs from expected.
VerifyReport resume(const std::string& checkpoint_path, const VerifyConfig& expected,
                    const VerifyHooks& hooks = {});

void write_checkpoint(const std::string& path, const VerifyReport& state);
VerifyReport read_checkpoint(const std::string& path);

// include_run_info adds worker count and wall time, the only fields that vary
// between identical runs.
nlohmann::json to_json(const VerifyReport& report, bool include_run_info = true);
std::string summary(const VerifyReport& report);

} // namespace sqfree::verify
