#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <nestloc/cli.hpp>
#include <nestloc/harness.hpp>

using namespace nestloc;

namespace
{

std::filesystem::path temp_file(const std::string &name, const std::string &content)
{
    const auto path = std::filesystem::temp_directory_path() / ("nestloc_test_" + name);
    std::ofstream(path) << content;
    return path;
}

struct cli_result {
    int code;
    std::string out;
    std::string err;
};

cli_result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "nestloc");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

scenario make(scenario_kind kind, std::string surface, std::vector<int> sizes)
{
    scenario s;
    s.kind = kind;
    s.surface = std::move(surface);
    s.sizes = std::move(sizes);
    return s;
}

} // namespace

TEST(RunScenario, VanishingPasses)
{
    auto s = make(scenario_kind::vanish, "p2", {2, 1});
    s.i_values = {1};
    const auto r = run_scenario(s);
    EXPECT_TRUE(r.pass);
    ASSERT_FALSE(r.cases.empty());
    for (const auto &c : r.cases) {
        ASSERT_EQ(c.samples.size(), 3u);
        for (const auto &smp : c.samples) {
            EXPECT_EQ(smp.value, "0");
        }
    }
}

TEST(RunScenario, EulerCount)
{
    const auto r = run_scenario(make(scenario_kind::euler_count, "p2", {2}));
    ASSERT_EQ(r.cases.size(), 1u);
    EXPECT_TRUE(r.pass);
    for (const auto &smp : r.cases[0].samples) {
        EXPECT_EQ(smp.value, "9");
    }
}

TEST(RunScenario, PushforwardListsBothSides)
{
    const auto r = run_scenario(make(scenario_kind::pushforward, "p2", {1, 1}));
    EXPECT_TRUE(r.pass);
    ASSERT_FALSE(r.cases.empty());
    for (const auto &c : r.cases) {
        for (const auto &smp : c.samples) {
            EXPECT_EQ(smp.extra.at("virtual").get<std::string>(), smp.value);
        }
    }
}

TEST(RunScenario, DeterministicForSeed)
{
    auto s = make(scenario_kind::pushforward, "p1xp1", {2, 1});
    s.timing = false;
    const auto a = to_json(run_scenario(s)).dump();
    const auto b = to_json(run_scenario(s)).dump();
    EXPECT_EQ(a, b);
    s.seed += 1;
    EXPECT_NE(to_json(run_scenario(s)).dump(), a);
}

TEST(RunScenario, ParallelIsByteIdentical)
{
    auto s = make(scenario_kind::twisted_vanish, "p1xp1", {2, 2});
    s.timing = false;
    const auto serial = to_json(run_scenario(s)).dump();
    s.jobs = 4;
    EXPECT_EQ(to_json(run_scenario(s)).dump(), serial);
}

TEST(RunScenario, MathematicalErrorsBecomeFailedCases)
{
    const std::vector<std::pair<fault, std::string>> cases = {{fault::zero_weight, "ZeroWeight"},
                                                              {fault::degree_mismatch, "DegreeMismatch"},
                                                              {fault::spec_dependence, "SpecDependence"},
                                                              {fault::non_generic, "NonGenericSpec"}};
    for (const auto &[f, name] : cases) {
        auto s = make(scenario_kind::euler_count, "p2", {2});
        s.inject = f;
        const auto r = run_scenario(s);
        EXPECT_FALSE(r.pass);
        ASSERT_EQ(r.cases.size(), 1u);
        EXPECT_EQ(r.cases[0].diagnostic.rfind(name + ":", 0), 0u) << r.cases[0].diagnostic;
    }
}

TEST(RunScenario, ConfigErrorsBeforeComputation)
{
    EXPECT_THROW(run_scenario(make(scenario_kind::vanish, "p2", {1, 2})), config_error);
    EXPECT_THROW(run_scenario(make(scenario_kind::vanish, "p3", {2, 1})), config_error);
    auto s = make(scenario_kind::vanish, "p2", {1, 1});
    s.i_values = {3};
    EXPECT_THROW(run_scenario(s), config_error);
    s = make(scenario_kind::euler_count, "p2", {2});
    s.samples = 1;
    EXPECT_THROW(run_scenario(s), config_error);
    s = make(scenario_kind::pushforward, "p2", {2, 1});
    s.insertions = "file:/nonexistent/insertions.txt";
    EXPECT_THROW(run_scenario(s), config_error);
}

TEST(RunScenario, HrrAndSymbolicAndSerre)
{
    for (const auto &surface : {"p2", "p1xp1"}) {
        const auto r = run_scenario(make(scenario_kind::hrr_check, surface, {}));
        EXPECT_TRUE(r.pass) << surface;
    }
    EXPECT_TRUE(run_scenario(make(scenario_kind::symbolic_tp, "p2", {})).pass);
    EXPECT_TRUE(run_scenario(make(scenario_kind::serre_duality, "p2", {3})).pass);
}

TEST(Insertions, ParseAndFile)
{
    const auto s = p2();
    const auto ins = parse_insertion(s, "c1(taut(O(1))@1)*c2(taut(O)@2)");
    ASSERT_EQ(ins.factors.size(), 2u);
    EXPECT_EQ(ins.factors[1].source.factor, 1);
    EXPECT_EQ(ins.factors[1].degree, 2);
    EXPECT_TRUE(parse_insertion(s, "1").factors.empty());
    EXPECT_THROW(parse_insertion(s, "c1(taut(O(1))@0)"), config_error);
    EXPECT_THROW(parse_insertion(s, "c1(tangent@1)"), config_error);
    EXPECT_THROW(parse_insertion(p1xp1(), "c1(taut(O(1))@1)"), config_error);

    const auto path = temp_file("ins.txt", "# targeted run\nc1(taut(O(1))@1) * c2(taut(O(1))@1)\n\nc3(taut(O(2))@1)\n");
    auto sc = make(scenario_kind::pushforward, "p2", {2, 1});
    sc.insertions = "file:" + path.string();
    const auto r = run_scenario(sc);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.cases.size(), 2u);
    const auto bad = temp_file("bad.txt", "c1(taut(O(1))@1)\nc1(taut(Q)@1)\n");
    try {
        read_insertions(s, bad.string());
        FAIL() << "expected config_error";
    } catch (const config_error &e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
}

TEST(Config, Parsing)
{
    EXPECT_THROW(parse_config_text(R"({"scenarios": []})"), config_error);
    try {
        parse_config_text(R"({"scenarios": []})");
    } catch (const config_error &e) {
        EXPECT_NE(std::string(e.what()).find("no scenarios"), std::string::npos);
    }
    EXPECT_THROW(parse_config_text(R"({"scenarios": [{"kind": "vanish", "n": [1, 2]}]})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"scenarios": [{"kind": "vanish", "colour": 1}]})"), config_error);
    const auto two = parse_config_text(
        R"({"scenarios": [{"kind": "vanish", "surface": "p1xp1", "n": [2, 1], "i": [1]},
                          {"kind": "euler-count", "n": 3, "seed": 5}]})");
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0].surface, "p1xp1");
    EXPECT_EQ(two[0].sizes, (std::vector<int>{2, 1}));
    EXPECT_EQ(two[1].sizes, std::vector<int>{3});
    EXPECT_EQ(two[1].seed, 5u);
}

TEST(Config, SyntaxErrorsCarryLineNumbers)
{
    try {
        parse_config_text("{\n  \"scenarios\": [\n    {\"kind\": \"vanish\",}\n  ]\n}\n", "cfg.json");
        FAIL() << "expected config_error";
    } catch (const config_error &e) {
        EXPECT_EQ(std::string(e.what()).rfind("cfg.json:3:", 0), 0u) << e.what();
    }
}

TEST(Report, JsonRoundTrip)
{
    auto s = make(scenario_kind::pushforward, "p2", {1, 1});
    const auto r = run_scenario(s);
    std::ostringstream os;
    emit_report(r, report_format::json, os);
    const auto back = report_from_json(json::parse(os.str()));
    EXPECT_EQ(back, r);
}

TEST(Report, RationalsAreStrings)
{
    report r;
    r.scenario = "demo";
    r.version = version;
    case_record c;
    c.samples.push_back({{"1/2", "3"}, to_string(rational(22, 7)), json::object()});
    c.pass = true;
    r.cases.push_back(c);
    r.pass = true;
    const auto j = to_json(r);
    EXPECT_TRUE(j["cases"][0]["samples"][0]["value"].is_string());
    EXPECT_EQ(j["cases"][0]["samples"][0]["value"], "22/7");
    EXPECT_EQ(j["cases"][0]["samples"][0]["s"][0], "1/2");
}

TEST(Report, TextTable)
{
    auto s = make(scenario_kind::euler_count, "p2", {1, 2});
    std::ostringstream os;
    emit_report(run_scenario(s), report_format::text, os);
    const auto text = os.str();
    EXPECT_NE(text.find("PASS  {"), std::string::npos);
    EXPECT_NE(text.find("2/2 cases"), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    const auto out = std::filesystem::temp_directory_path() / "nestloc_test_r.json";
    std::filesystem::remove(out);
    EXPECT_EQ(run({"vanish", "--surface", "p2", "--n", "2,1", "--i", "1", "--samples", "3", "--seed", "42", "--out",
                   out.string()})
                  .code,
              exit_pass);
    ASSERT_TRUE(std::filesystem::exists(out));
    std::ifstream in(out);
    const auto j = json::parse(in);
    EXPECT_EQ(j["verdict"], "pass");
    EXPECT_EQ(j["seed"], 42);
    EXPECT_EQ(run({"pushforward", "--surface", "p1xp1", "--n", "2,2", "--jobs", "4"}).code, exit_pass);
    EXPECT_EQ(run({"vanish", "--n", "1,2"}).code, exit_config_error);
    EXPECT_EQ(run({"vanish", "--n", "x"}).code, exit_config_error);
    EXPECT_EQ(run({"vanish", "--surface", "f2"}).code, exit_config_error);
    EXPECT_EQ(run({"frobnicate"}).code, exit_config_error);
    EXPECT_EQ(run({}).code, exit_config_error);
    EXPECT_EQ(run({"vanish", "--format", "yaml"}).code, exit_config_error);
    EXPECT_EQ(run({"vanish", "--help"}).code, exit_pass);
    EXPECT_EQ(run({"vanish", "--out", "/nonexistent/dir/r.json"}).code, exit_internal_error);
}

TEST(Cli, InjectedFaultsExitOneWithNamedDiagnostic)
{
    for (const std::string name : {"zero-weight", "degree-mismatch", "spec-dependence", "non-generic"}) {
        const auto r = run({"euler-count", "--inject", name});
        EXPECT_EQ(r.code, exit_math_failure) << name;
        EXPECT_FALSE(r.err.empty());
    }
    EXPECT_NE(run({"euler-count", "--inject", "zero-weight"}).err.find("ZeroWeight"), std::string::npos);
    EXPECT_EQ(run({"vanish", "--inject", "zero-weight"}).code, exit_config_error);
}

TEST(Cli, RangesAndTextFormat)
{
    const auto r = run({"vanish", "--surface", "p1xp1", "--n", "2,2", "--i", "1..3", "--format", "text", "--no-timing"});
    EXPECT_EQ(r.code, exit_pass);
    EXPECT_NE(r.out.find("\"i\":3"), std::string::npos);
}

TEST(Cli, ConfigFileWithFlagOverride)
{
    const auto cfg = temp_file("cfg.json", R"({"scenarios": [
        {"kind": "euler-count", "surface": "p2", "n": [2]},
        {"kind": "vanish", "surface": "p2", "n": [1, 1], "i": [1]}
    ]})");
    auto r = run({"all", "--config", cfg.string(), "--surface", "p1xp1", "--no-timing"});
    EXPECT_EQ(r.code, exit_pass) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_EQ(j["reports"].size(), 2u);
    EXPECT_EQ(j["reports"][0]["params"]["surface"], "p1xp1");
    EXPECT_EQ(j["reports"][0]["cases"][0]["samples"][0]["value"], "14");
    r = run({"euler-count", "--config", cfg.string()});
    EXPECT_EQ(r.code, exit_pass);
    EXPECT_EQ(json::parse(r.out)["scenario"], "euler-count");
    const auto empty = temp_file("empty.json", R"({"scenarios": []})");
    r = run({"all", "--config", empty.string()});
    EXPECT_EQ(r.code, exit_config_error);
    EXPECT_NE(r.err.find("no scenarios"), std::string::npos);
}
