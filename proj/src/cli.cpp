#include "sqfree/cli.hpp"

#include "sqfree/bounds.hpp"
#include "sqfree/representations.hpp"
#include "sqfree/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace sqfree::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {command, parameters, result, provenance}; every constant in result that
// is not computed from the inputs has a provenance entry.
struct Envelope {
    std::string command;
    json parameters = json::object();
    json result = json::object();
    json provenance = json::object();

    void cite(const std::string& name, double value, const char* source)
    {
        provenance[name] = {{"value", value}, {"source", source}};
    }

    json to_json() const
    {
        return {{"command", command}, {"parameters", parameters}, {"result", result}, {"provenance", provenance}};
    }
};

std::string render_scalar(const json& v)
{
    if (v.is_number_float())
        return fmt::format("{:.10g}", v.get<double>());
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

void print_human(std::ostream& out, const Envelope& env)
{
    out << env.command << '\n';
    for (const auto& [key, value] : env.parameters.items())
        out << fmt::format("  {:<22} {}\n", key, render_scalar(value));
    out << "result\n";
    for (const auto& [key, value] : env.result.items())
        out << fmt::format("  {:<22} {}\n", key, render_scalar(value));
    if (!env.provenance.empty()) {
        out << "provenance\n";
        for (const auto& [key, value] : env.provenance.items())
            out << fmt::format("  {:<22} {:<16} {}\n", key, render_scalar(value["value"]),
                               value["source"].get<std::string>());
    }
}

void emit(std::ostream& out, const Envelope& env, bool as_json)
{
    if (as_json)
        out << env.to_json().dump(2) << '\n';
    else
        print_human(out, env);
}

std::uint64_t parse_n(const std::string& text, const char* flag)
{
    try {
        return parse_count(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(fmt::format("{}: {}", flag, e.what()));
    }
}

// n for the bound, which may exceed 64 bits; exact is empty in that case.
struct Magnitude {
    std::optional<std::uint64_t> exact;
    double real = 0.0;
};

Magnitude parse_magnitude(const std::string& text, const char* flag)
{
    try {
        const auto v = parse_count(text);
        return {v, static_cast<double>(v)};
    } catch (const std::invalid_argument& e) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        const bool plain = text.find_first_not_of("0123456789.eE+") == std::string::npos;
        if (plain && used == text.size() && std::isfinite(v) && v >= 0x1p64)
            return {std::nullopt, v};
        throw UsageError(fmt::format("{}: {}", flag, e.what()));
    }
}

unsigned default_workers()
{
    if (const char* env = std::getenv("SQFREE_WORKERS")) {
        try {
            const auto v = parse_count(env);
            if (v >= 1 && v <= 1024)
                return static_cast<unsigned>(v);
        } catch (const std::invalid_argument&) {
        }
        throw UsageError(fmt::format("SQFREE_WORKERS must be an integer in [1, 1024], got '{}'", env));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void cite_bound_constants(Envelope& env, const bounds::BoundParams& params)
{
    env.cite("sn_floor", params.sn_floor, "paper");
    env.cite("eps_sum_cap", params.eps_sum_cap, "paper");
    env.cite("tail_sum_cap", params.tail_sum_cap, "paper");
    env.cite("infinite_sum_cap", params.infinite_sum_cap, "paper");
}

struct VerifyFlags {
    std::string from;
    std::string to;
    std::string parity = "all";
    unsigned workers = 0;
    std::string max_attempts = "200";
    std::string chunk_size = "1048576";
    std::string checkpoint_every;
    std::string checkpoint;
    bool resume = false;
    bool json = false;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out)
{
    verify::VerifyConfig config;
    const bool have_range = !f.from.empty() || !f.to.empty();
    if (!f.resume && (f.from.empty() || f.to.empty()))
        throw UsageError("verify: --from and --to are required");
    if (f.resume && f.checkpoint.empty())
        throw UsageError("verify: --resume needs --checkpoint");
    if (have_range && (f.from.empty() || f.to.empty()))
        throw UsageError("verify: give both --from and --to");

    config.worker_count = f.workers == 0 ? default_workers() : f.workers;
    config.checkpoint_path = f.checkpoint;
    config.max_attempts = parse_n(f.max_attempts, "--max-attempts");
    config.chunk_size = parse_n(f.chunk_size, "--chunk-size");
    if (!f.checkpoint_every.empty())
        config.checkpoint_every = parse_n(f.checkpoint_every, "--checkpoint-every");
    try {
        config.parity = verify::parse_parity(f.parity);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (have_range) {
        config.lo = parse_n(f.from, "--from");
        config.hi = parse_n(f.to, "--to");
    }

    verify::VerifyReport report;
    if (f.resume) {
        try {
            if (have_range) {
                config.validate();
                report = verify::resume(f.checkpoint, config);
            } else {
                report = verify::resume(f.checkpoint, config.worker_count);
            }
        } catch (const verify::CheckpointMismatch& e) {
            throw UsageError(e.what());
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    } else {
        try {
            config.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        report = verify::verify_range(config);
    }

    Envelope env;
    env.command = "verify";
    env.parameters = {{"from", report.config.lo},
                      {"to", report.config.hi},
                      {"parity", verify::to_string(report.config.parity)},
                      {"max_attempts", report.config.max_attempts},
                      {"chunk_size", report.config.chunk_size},
                      {"resume", f.resume}};
    env.result = verify::to_json(report);
    env.cite("max_attempts", static_cast<double>(report.config.max_attempts), "config");

    if (f.json)
        out << env.to_json().dump(2) << '\n';
    else
        out << "verify\n" << verify::summary(report);
    return report.holds() ? kExitOk : kExitVerificationFailed;
}

int cmd_count(const std::string& n_text, const std::string& cap_text, bool as_json, std::ostream& out)
{
    const std::uint64_t n = parse_n(n_text, "--n");
    if (n < 3)
        throw UsageError("count: n must be at least 3");
    const auto cap = parse_n(cap_text, "--witnesses");

    const std::uint64_t t = rep::count_T(n);
    const double r_direct = rep::compute_R(n);
    const double r_mobius = rep::compute_R_mobius(n);
    const double diagnostic = r_direct == 0.0 ? std::fabs(r_mobius) : std::fabs(r_direct - r_mobius) / r_direct;

    json listed = json::array();
    for (const auto& w : rep::witnesses(n, static_cast<std::size_t>(cap)))
        listed.push_back({{"p", w.p}, {"s", w.s}});

    Envelope env;
    env.command = "count";
    env.parameters = {{"n", n}, {"witness_cap", cap}};
    env.result = {{"T", t},
                  {"R_direct", r_direct},
                  {"R_mobius", r_mobius},
                  {"relative_difference", diagnostic},
                  {"representable", t > 0},
                  {"witnesses", listed}};
    emit(out, env, as_json);
    return kExitOk;
}

int cmd_bound(const std::string& n_text, double A, bool optimize, const std::string& table_path, bool as_json,
              std::ostream& out)
{
    const auto n = parse_magnitude(n_text, "--n");
    if (n.real < 3)
        throw UsageError("bound: n must be at least 3");
    if (!(A > 0.0 && A < 0.5))
        throw UsageError("bound: --A must lie in (0, 1/2)");
    if (optimize && n.real < 100)
        throw UsageError("bound: --optimize needs n >= 100");

    const auto table = bounds::EpsilonTable::load(table_path);
    bounds::BoundParams params;
    params.A = A;
    if (optimize)
        params.A = bounds::optimize_A(n.real, params).A_best;
    const auto b = n.exact ? bounds::lower_bound(*n.exact, params, table)
                           : bounds::lower_bound_real(n.real, params, table);

    Envelope env;
    env.command = "bound";
    env.parameters = {{"n", n.exact ? json(*n.exact) : json(n.real)},
                      {"A", b.A},
                      {"optimized", optimize},
                      {"epsilon_table", table_path}};
    env.result = {{"sn_lower", b.sn_lower},
                  {"sn_exact", n.exact ? json(b.sn_exact) : json(nullptr)},
                  {"eps_term", b.eps_term},
                  {"table_eps_sum", b.table_eps_sum},
                  {"bt_factor", b.bt_factor},
                  {"bt_term", b.bt_term},
                  {"tail_half", b.tail_half},
                  {"tail_2A", b.tail_2A},
                  {"tail_A", b.tail_A},
                  {"lower_bound", b.lower_bound},
                  {"positive", b.positive},
                  {"heuristic", b.heuristic},
                  {"verdict", b.positive ? (b.heuristic ? "positive (heuristic: n below certified range)" : "positive")
                                         : "not positive"}};
    cite_bound_constants(env, params);
    env.cite("table_eps_sum", b.table_eps_sum, "config");
    env.provenance["table_eps_sum"]["label"] = b.table_source;
    if (n.exact)
        env.cite("sn_exact", b.sn_exact, "computed");
    env.cite("certified_from", static_cast<double>(bounds::kCertifiedFrom), "paper");
    emit(out, env, as_json);
    return kExitOk;
}

int cmd_constants(int digits, bool as_json, std::ostream& out)
{
    if (digits < 1 || digits > 15)
        throw UsageError("constants: --digits must be in [1, 15]");
    const auto c = bounds::artin_constant(digits);
    const double partial13 = bounds::squarefree_phi_partial_sum(bounds::kSmallModulusLimit);
    const double tail13 = bounds::squarefree_phi_tail(bounds::kSmallModulusLimit);
    const double partial_1e6 = bounds::squarefree_phi_partial_sum(1'000'000);

    Envelope env;
    env.command = "constants";
    env.parameters = {{"digits", digits}};
    env.result = {{"artin_constant", fmt::format("{:.{}f}", c.value, digits)},
                  {"artin_value", c.value},
                  {"artin_error_bound", c.error_bound},
                  {"squarefree_phi_sum_13", partial13},
                  {"squarefree_phi_tail_13", tail13},
                  {"tail_below_cap", tail13 < bounds::kTailSumCap},
                  {"squarefree_phi_sum_1e6", partial_1e6},
                  {"partial_below_infinite_cap", partial_1e6 < bounds::kInfiniteSumCap}};
    env.cite("artin_constant", c.value, "computed");
    env.cite("tail_sum_cap", bounds::kTailSumCap, "paper");
    env.cite("infinite_sum_cap", bounds::kInfiniteSumCap, "paper");
    emit(out, env, as_json);
    return kExitOk;
}

std::vector<std::uint64_t> split_list(const std::vector<std::string>& items)
{
    std::vector<std::uint64_t> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (piece.empty())
                throw UsageError("asymptotic: empty entry in --n list");
            out.push_back(parse_n(piece, "--n"));
        }
    }
    return out;
}

int cmd_asymptotic(const std::vector<std::string>& n_items, const std::string& from, const std::string& to,
                   const std::string& format, std::ostream& out)
{
    std::vector<std::uint64_t> ns = split_list(n_items);
    if (!from.empty() || !to.empty()) {
        if (from.empty() || to.empty())
            throw UsageError("asymptotic: give both --from and --to");
        const auto lo = parse_n(from, "--from");
        const auto hi = parse_n(to, "--to");
        if (hi < lo)
            throw UsageError("asymptotic: --to must not be below --from");
        if (hi - lo > 1'000'000)
            throw UsageError("asymptotic: at most 10^6 + 1 rows per call");
        for (std::uint64_t n = lo; n <= hi; ++n)
            ns.push_back(n);
    }
    if (ns.empty())
        throw UsageError("asymptotic: give --n or --from/--to");
    for (auto n : ns) {
        if (n < 3)
            throw UsageError("asymptotic: every n must be at least 3");
    }
    if (format != "csv" && format != "json")
        throw UsageError("asymptotic: --format must be csv or json");

    const double c = bounds::artin_constant(12).value;
    json rows = json::array();
    if (format == "csv")
        out << "n,T,prediction,ratio\n";
    for (auto n : ns) {
        const auto t = rep::count_T(n);
        const double prediction = rep::estermann_prediction(n);
        const double ratio = static_cast<double>(t) / prediction;
        if (format == "csv")
            out << fmt::format("{},{},{:.9f},{:.9f}\n", n, t, prediction, ratio);
        else
            rows.push_back({{"n", n}, {"T", t}, {"prediction", prediction}, {"ratio", ratio}});
    }
    if (format == "json") {
        Envelope env;
        env.command = "asymptotic";
        env.parameters = {{"count", ns.size()}};
        env.result = {{"rows", rows}};
        env.cite("artin_constant", c, "computed");
        out << env.to_json().dump(2) << '\n';
    }
    return kExitOk;
}

} // namespace

unsigned long long parse_count(const std::string& text)
{
    auto bad = [&] { return std::invalid_argument("'" + text + "' is not a nonnegative integer"); };
    if (text.empty())
        throw bad();

    std::string mantissa = text;
    long long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
        mantissa = text.substr(0, e);
        const std::string exp_text = text.substr(e + 1);
        if (exp_text.empty() || exp_text.size() > 3)
            throw bad();
        std::size_t i = (exp_text[0] == '+') ? 1 : 0;
        if (i == exp_text.size())
            throw bad();
        for (; i < exp_text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(exp_text[i])))
                throw bad();
            exponent = exponent * 10 + (exp_text[i] - '0');
        }
    }

    std::string digits;
    bool seen_dot = false;
    for (char ch : mantissa) {
        if (ch == '.' && !seen_dot) {
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw bad();
        digits.push_back(ch);
        if (seen_dot)
            --exponent;
    }
    if (digits.empty())
        throw bad();
    // Trailing fractional zeros are harmless: "2.50e1" is 25.
    while (exponent < 0 && digits.size() > 1 && digits.back() == '0') {
        digits.pop_back();
        ++exponent;
    }
    if (exponent < 0) {
        if (digits.find_first_not_of('0') != std::string::npos)
            throw std::invalid_argument("'" + text + "' is not an integer");
        return 0;
    }

    unsigned long long value = 0;
    constexpr auto kMax = std::numeric_limits<unsigned long long>::max();
    auto push = [&](unsigned d) {
        if (value > (kMax - d) / 10)
            throw std::invalid_argument("'" + text + "' does not fit in 64 bits");
        value = value * 10 + d;
    };
    for (char ch : digits)
        push(static_cast<unsigned>(ch - '0'));
    for (long long i = 0; i < exponent; ++i) {
        if (value == 0)
            break;
        push(0);
    }
    return value;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Representations of integers as a prime plus a square-free number", "sqfree"};
    app.require_subcommand(1);

    VerifyFlags vf;
    auto* verify_cmd = app.add_subcommand("verify", "check every n in [from, to) has a representation");
    verify_cmd->add_option("--from", vf.from, "first n (>= 3)");
    verify_cmd->add_option("--to", vf.to, "end of range, exclusive");
    verify_cmd->add_option("--parity", vf.parity, "all | odd")->capture_default_str();
    verify_cmd->add_option("--workers", vf.workers, "worker threads (default $SQFREE_WORKERS or core count)");
    verify_cmd->add_option("--max-attempts", vf.max_attempts, "square-free candidates before escalation")
        ->capture_default_str();
    verify_cmd->add_option("--chunk-size", vf.chunk_size, "integers per work chunk")->capture_default_str();
    verify_cmd->add_option("--checkpoint", vf.checkpoint, "checkpoint file");
    verify_cmd->add_option("--checkpoint-every", vf.checkpoint_every, "n examined between checkpoints");
    verify_cmd->add_flag("--resume", vf.resume, "continue from --checkpoint");
    verify_cmd->add_flag("--json", vf.json, "machine-readable output");

    std::string count_n;
    std::string count_cap = "10";
    bool count_json = false;
    auto* count_cmd = app.add_subcommand("count", "T(n), R(n) two ways, and witnesses");
    count_cmd->add_option("--n", count_n, "integer >= 3")->required();
    count_cmd->add_option("--witnesses", count_cap, "list at most this many representations")
        ->capture_default_str();
    count_cmd->add_flag("--json", count_json, "machine-readable output");

    std::string bound_n;
    double bound_A = 0.25;
    bool bound_optimize = false;
    bool bound_json = false;
    std::string table_path = SQFREE_DEFAULT_EPSILON_TABLE;
    auto* bound_cmd = app.add_subcommand("bound", "explicit lower bound on R(n)/n");
    bound_cmd->add_option("--n", bound_n, "integer >= 3")->required();
    auto* a_opt = bound_cmd->add_option("--A", bound_A, "split exponent in (0, 1/2)")->capture_default_str();
    bound_cmd->add_flag("--optimize", bound_optimize, "choose A to maximise the bound")->excludes(a_opt);
    bound_cmd->add_option("--epsilon-table", table_path, "epsilon table file")->capture_default_str();
    bound_cmd->add_flag("--json", bound_json, "machine-readable output");

    int digits = 12;
    bool constants_json = false;
    auto* constants_cmd = app.add_subcommand("constants", "Artin's constant and the 1/phi(a^2) sums");
    constants_cmd->add_option("--digits", digits, "digits of Artin's constant (1..15)")->capture_default_str();
    constants_cmd->add_flag("--json", constants_json, "machine-readable output");

    std::vector<std::string> asym_n;
    std::string asym_from;
    std::string asym_to;
    std::string asym_format = "csv";
    bool asym_json = false;
    auto* asym_cmd = app.add_subcommand("asymptotic", "T(n) against the Estermann prediction");
    asym_cmd->add_option("--n", asym_n, "n values, repeated or comma-separated");
    asym_cmd->add_option("--from", asym_from, "first n");
    asym_cmd->add_option("--to", asym_to, "last n, inclusive");
    asym_cmd->add_option("--format", asym_format, "csv | json")->capture_default_str();
    asym_cmd->add_flag("--json", asym_json, "same as --format json");

    std::vector<std::string> storage(args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(storage.size());
    for (auto& s : storage)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (verify_cmd->parsed())
            return cmd_verify(vf, out);
        if (count_cmd->parsed())
            return cmd_count(count_n, count_cap, count_json, out);
        if (bound_cmd->parsed())
            return cmd_bound(bound_n, bound_A, bound_optimize, table_path, bound_json, out);
        if (constants_cmd->parsed())
            return cmd_constants(digits, constants_json, out);
        if (asym_cmd->parsed())
            return cmd_asymptotic(asym_n, asym_from, asym_to, asym_json ? "json" : asym_format, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv, argv + argc);
    return run(args, out, err);
}

} // namespace sqfree::cli
