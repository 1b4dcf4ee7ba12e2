#include <doctest.h>

#include "sqfree/cli.hpp"
#include "sqfree/verify.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>
#include <sstream>

using namespace sqfree::cli;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "sqfree");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

json invoke_json(std::vector<std::string> args)
{
    args.push_back("--json");
    const auto r = invoke(args);
    REQUIRE(r.code == kExitOk);
    return json::parse(r.out);
}

void check_envelope(const json& j, const std::string& command)
{
    REQUIRE(j.is_object());
    CHECK(j.size() == 4);
    CHECK(j.at("command") == command);
    CHECK(j.at("parameters").is_object());
    CHECK(j.at("result").is_object());
    REQUIRE(j.at("provenance").is_object());
    const std::set<std::string> sources{"paper", "config", "computed"};
    for (const auto& [name, entry] : j.at("provenance").items()) {
        CAPTURE(name);
        CHECK(entry.at("value").is_number());
        CHECK(sources.count(entry.at("source").get<std::string>()) == 1);
    }
}

std::string temp_path(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "sqfree-test-cli";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::filesystem::remove(path);
    return path.string();
}

} // namespace

TEST_CASE("parse_count")
{
    CHECK(parse_count("0") == 0);
    CHECK(parse_count("10000") == 10000);
    CHECK(parse_count("1e10") == 10'000'000'000ull);
    CHECK(parse_count("1E6") == 1'000'000);
    CHECK(parse_count("2.5e3") == 2500);
    CHECK(parse_count("2.50e1") == 25);
    CHECK(parse_count("1e+3") == 1000);
    CHECK(parse_count("18446744073709551615") == 18446744073709551615ull);
    CHECK_THROWS_AS(parse_count(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("-5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("2.55e1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("1e-3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("1e20"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("18446744073709551616"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("12abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("1.2.3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("e5"), std::invalid_argument);
}

TEST_CASE("usage errors exit with 2")
{
    CHECK(invoke({}).code == kExitUsage);
    CHECK(invoke({"frobnicate"}).code == kExitUsage);
    CHECK(invoke({"verify", "--from", "3", "--to", "2"}).code == kExitUsage);
    CHECK(invoke({"verify", "--from", "3"}).code == kExitUsage);
    CHECK(invoke({"verify", "--from", "3", "--to", "10", "--parity", "even"}).code == kExitUsage);
    CHECK(invoke({"verify", "--resume"}).code == kExitUsage);
    CHECK(invoke({"count", "--n", "2"}).code == kExitUsage);
    CHECK(invoke({"count", "--n", "ten"}).code == kExitUsage);
    CHECK(invoke({"bound", "--n", "1e10", "--A", "0.5"}).code == kExitUsage);
    CHECK(invoke({"bound", "--n", "1e10", "--A", "0"}).code == kExitUsage);
    CHECK(invoke({"bound", "--n", "1e10", "--A", "0.3", "--optimize"}).code == kExitUsage);
    CHECK(invoke({"constants", "--digits", "20"}).code == kExitUsage);
    CHECK(invoke({"constants", "--digits", "0"}).code == kExitUsage);
    CHECK(invoke({"asymptotic", "--n", "10,x"}).code == kExitUsage);
    CHECK(invoke({"asymptotic", "--n", "2"}).code == kExitUsage);
    const auto r = invoke({"count", "--n", "2"});
    CHECK_FALSE(r.err.empty());
    CHECK(r.out.empty());
}

TEST_CASE("help exits cleanly")
{
    const auto r = invoke({"--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("verify")
{
    const auto j = invoke_json({"verify", "--from", "3", "--to", "10000", "--workers", "2"});
    check_envelope(j, "verify");
    CHECK(j["result"]["verified_count"] == 9997);
    CHECK(j["result"]["failures"].empty());
    CHECK(j["result"]["theorem_holds_on_range"] == true);

    const auto odd = invoke({"verify", "--from", "3", "--to", "1000000", "--parity", "odd"});
    CHECK(odd.code == kExitOk);
    CHECK(odd.out.find("failures       0") != std::string::npos);

    const auto sci = invoke_json({"verify", "--from", "3", "--to", "1e4", "--workers", "1"});
    CHECK(sci["result"]["verified_count"] == 9997);
}

TEST_CASE("verify reports recorded failures with exit 1")
{
    using namespace sqfree::verify;
    const auto path = temp_path("failed.ckpt");
    VerifyConfig c;
    c.lo = 3;
    c.hi = 1000;
    c.checkpoint_path = path;
    auto report = verify_range(c);
    REQUIRE(report.complete());
    report.failures.push_back(999);
    --report.verified_count;
    write_checkpoint(path, report);

    const auto r = invoke({"verify", "--resume", "--checkpoint", path, "--json"});
    CHECK(r.code == kExitVerificationFailed);
    const auto j = json::parse(r.out);
    CHECK(j["result"]["failures"] == json::array({999}));
    CHECK(j["result"]["theorem_holds_on_range"] == false);
}

TEST_CASE("verify checkpoint and resume through the command line")
{
    const auto path = temp_path("cli.ckpt");
    const std::vector<std::string> base{"verify", "--from", "3", "--to", "300000", "--chunk-size", "65536",
                                        "--checkpoint", path, "--workers", "1"};
    const auto first = invoke_json(base);
    auto resumed_args = base;
    resumed_args.push_back("--resume");
    const auto again = invoke_json(resumed_args);
    auto strip = [](json j) {
        j["result"].erase("run");
        j["parameters"].erase("resume");
        return j;
    };
    CHECK(strip(first) == strip(again));

    const auto mismatch =
        invoke({"verify", "--from", "3", "--to", "400000", "--chunk-size", "65536", "--checkpoint", path, "--resume"});
    CHECK(mismatch.code == kExitUsage);

    const auto missing = invoke({"verify", "--resume", "--checkpoint", temp_path("absent.ckpt")});
    CHECK(missing.code == kExitRuntime);
}

TEST_CASE("count")
{
    auto j = invoke_json({"count", "--n", "10"});
    check_envelope(j, "count");
    CHECK(j["result"]["T"] == 3);
    CHECK(j["result"]["R_direct"].get<double>() == doctest::Approx(4.65396).epsilon(1e-6));
    CHECK(j["result"]["relative_difference"].get<double>() < 1e-9);
    CHECK(j["result"]["witnesses"].size() == 3);

    j = invoke_json({"count", "--n", "3"});
    CHECK(j["result"]["T"] == 1);

    j = invoke_json({"count", "--n", "1000", "--witnesses", "4"});
    CHECK(j["result"]["witnesses"].size() == 4);
    CHECK(j["result"]["T"].get<int>() > 4);

    const auto text = invoke({"count", "--n", "10"});
    CHECK(text.code == kExitOk);
    CHECK(text.out.find("R_mobius") != std::string::npos);
}

TEST_CASE("bound")
{
    auto j = invoke_json({"bound", "--n", "1e10", "--A", "0.25"});
    check_envelope(j, "bound");
    const double fixed = j["result"]["lower_bound"].get<double>();
    CHECK(fixed == doctest::Approx(0.0367).epsilon(0.0005 / 0.0367));
    CHECK(j["result"]["positive"] == true);
    CHECK(j["result"]["heuristic"] == false);
    CHECK(j["provenance"]["sn_floor"]["source"] == "paper");
    CHECK(j["provenance"]["table_eps_sum"]["source"] == "config");

    j = invoke_json({"bound", "--n", "1e10", "--optimize"});
    CHECK(j["result"]["lower_bound"].get<double>() >= fixed);
    CHECK(j["parameters"]["optimized"] == true);

    j = invoke_json({"bound", "--n", "100"});
    CHECK(j["result"]["heuristic"] == true);

    j = invoke_json({"bound", "--n", "1e20"});
    CHECK(j["result"]["positive"] == true);
    CHECK(j["result"]["sn_exact"].is_null());
    CHECK(j["parameters"]["n"].get<double>() == 1e20);

    const auto text = invoke({"bound", "--n", "1e10"});
    CHECK(text.out.find("provenance") != std::string::npos);
    CHECK(text.out.find("positive") != std::string::npos);

    const auto bad_table = invoke({"bound", "--n", "1e10", "--epsilon-table", temp_path("absent.txt")});
    CHECK(bad_table.code == kExitRuntime);
}

TEST_CASE("constants")
{
    auto j = invoke_json({"constants", "--digits", "7"});
    check_envelope(j, "constants");
    CHECK(j["result"]["artin_constant"] == "0.3739558");
    const double tail = j["result"]["squarefree_phi_tail_13"].get<double>();
    CHECK(tail == doctest::Approx(0.0856893).epsilon(1e-6));
    CHECK(tail < 0.086);
    CHECK(j["result"]["squarefree_phi_sum_13"].get<double>() == doctest::Approx(1.8643107).epsilon(1e-7));

    j = invoke_json({"constants"});
    CHECK(j["parameters"]["digits"] == 12);
}

TEST_CASE("asymptotic")
{
    auto r = invoke({"asymptotic", "--n", "10"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "n,T,prediction,ratio\n10,3,3.419093607,0.877425524\n");

    r = invoke({"asymptotic", "--from", "1000", "--to", "1010"});
    CHECK(r.code == kExitOk);
    std::istringstream lines(r.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line))
        ++count;
    CHECK(count == 12);
    CHECK(r.out.find('\r') == std::string::npos);
    CHECK(invoke({"asymptotic", "--from", "1000", "--to", "1010"}).out == r.out);

    auto j = invoke_json({"asymptotic", "--n", "10,11", "--n", "12"});
    check_envelope(j, "asymptotic");
    REQUIRE(j["result"]["rows"].size() == 3);
    CHECK(j["result"]["rows"][0]["n"] == 10);
    CHECK(j["result"]["rows"][2]["n"] == 12);

    j = invoke_json({"asymptotic", "--n", "1000000"});
    const double ratio = j["result"]["rows"][0]["ratio"].get<double>();
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.2);
}

TEST_CASE("identical invocations give identical JSON")
{
    const std::vector<std::vector<std::string>> commands{
        {"count", "--n", "12345"},
        {"bound", "--n", "1e12", "--optimize"},
        {"constants", "--digits", "15"},
        {"asymptotic", "--from", "100", "--to", "120"},
    };
    for (const auto& c : commands)
        CHECK(invoke_json(c) == invoke_json(c));

    auto v1 = invoke_json({"verify", "--from", "3", "--to", "100000", "--workers", "1", "--chunk-size", "10000"});
    auto v2 = invoke_json({"verify", "--from", "3", "--to", "100000", "--workers", "3", "--chunk-size", "10000"});
    CHECK(v1["result"].contains("run"));
    v1["result"].erase("run");
    v2["result"].erase("run");
    CHECK(v1.dump() == v2.dump());
}
