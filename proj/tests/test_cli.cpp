#include "loansynth/report.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>

using namespace loansynth;
using testing_support::benchmark_path;
using testing_support::fixture_path;
using testing_support::slurp;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir()
{
    auto d = fs::temp_directory_path() / ("loansynth_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

CliRun cli(const std::string& args)
{
    auto d = scratch_dir();
    auto out = d / "stdout.txt", err = d / "stderr.txt";
    std::string cmd = std::string(LOANSYNTH_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out.string());
    r.err = slurp(err.string());
    return r;
}

std::string write_file(const std::string& name, const std::string& text)
{
    auto p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string broken_harvest(const std::string& from, const std::string& to)
{
    std::string text = slurp(benchmark_path("harvest"));
    auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos);
    text.replace(pos, from.size(), to);
    return text;
}

int line_of(const std::string& text, const std::string& needle)
{
    auto pos = text.find(needle);
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

} // namespace

TEST(Cli, ReplayReportsGroundTruthProfit)
{
    auto r = cli("replay --benchmark " + benchmark_path("harvest"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    auto bench = load_benchmark(benchmark_path("harvest"));
    EXPECT_EQ(j.at("status"), "validated");
    EXPECT_NEAR(j.at("actualProfit").get<double>(), to_double(bench.ground_truth_profit), 1e-6);
    EXPECT_EQ(j.at("actions").size(), bench.ground_truth->actions.size());
}

TEST(Cli, MissingPriceIsAConfigError)
{
    std::string text = broken_harvest("symbol = \"USDT\"\ndecimals = 6\nprice = \"1\"\n", "symbol = \"USDT\"\ndecimals = 6\n");
    auto path = write_file("no_price.toml", text);
    auto r = cli("replay --benchmark " + path);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("missing price entry for token USDT"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find(path + ":"), std::string::npos) << r.err;
}

TEST(Cli, SchemaErrorsCarryFileAndLine)
{
    std::string text = broken_harvest("method = \"deposit\"", "method = \"steal\"");
    auto path = write_file("bad_method.toml", text);
    auto r = cli("replay --benchmark " + path);
    EXPECT_EQ(r.code, 2);
    // reported at the action table holding the bad method
    EXPECT_NE(r.err.find("UnknownMethod"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find(path + ":"), std::string::npos) << r.err;

    auto syntax = write_file("syntax.toml", "name = \"x\"\n[[tokens]\n");
    auto s = cli("replay --benchmark " + syntax);
    EXPECT_EQ(s.code, 2);
    EXPECT_NE(s.err.find(syntax + ":" + std::to_string(line_of("name = \"x\"\n[[tokens]\n", "[[tokens]"))),
              std::string::npos)
        << s.err;
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("synthesize").code, 2);
    EXPECT_EQ(cli("replay --benchmark /nonexistent/bench.toml").code, 2);
    EXPECT_EQ(cli("synthesize --benchmark " + benchmark_path("harvest") + " --strengths 4").code, 2);
}

TEST(Cli, MineMatchesFixtures)
{
    auto d = scratch_dir();
    auto r = cli("mine --interfaces " + fixture_path("traceminer/interfaces.json") + " --traces " +
                 fixture_path("traceminer/traces.jsonl") + " --benchmark " + benchmark_path("harvest") +
                 " --max-choices 3 --filter-out " + (d / "f.json").string() + " --learn-out " +
                 (d / "l.json").string() + " --deps-out " + (d / "d.json").string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp((d / "f.json").string()), slurp(fixture_path("traceminer/expected_filter.json")));
    EXPECT_EQ(slurp((d / "l.json").string()), slurp(fixture_path("traceminer/expected_learn.json")));
    EXPECT_EQ(slurp((d / "d.json").string()), slurp(fixture_path("traceminer/expected_deps.json")));
    auto j = nlohmann::json::parse(r.out);
    // independent setReferrer actions are not proposed
    for (const auto& a : j.at("actions"))
        EXPECT_EQ(a.at("id").get<std::string>().find("setReferrer"), std::string::npos);
}

TEST(Cli, CollectThenFit)
{
    auto d = scratch_dir() / "data";
    auto c = cli("collect --benchmark " + benchmark_path("harvest") + " --points 30 --seed 4 --out " + d.string());
    ASSERT_EQ(c.code, 0) << c.err;
    for (const char* id : {"deposit", "withdraw", "exchange_USDT_USDC", "exchange_USDC_USDT"}) {
        std::ifstream f(d / (std::string(id) + ".jsonl"));
        EXPECT_EQ(load_points(f).size(), 30u) << id;
    }
    auto f = cli("fit --benchmark " + benchmark_path("harvest") + " --data " + d.string() + " --method inter --out -");
    ASSERT_EQ(f.code, 0) << f.err;
    auto j = nlohmann::json::parse(f.out);
    EXPECT_EQ(j.at("method"), "inter");
    auto set = surrogates_from_json(j.at("models"));
    EXPECT_EQ(set.at("deposit").models.size(), 4u);
}

TEST(Cli, SynthesisReportIsDeterministic)
{
    std::string args = "synthesize --benchmark " + benchmark_path("harvest") + " --method exact --iters 2 --seed 3";
    auto a = cli("--threads 1 " + args), b = cli("--threads 4 " + args);
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
    EXPECT_EQ(strip_timing(ja), strip_timing(jb));
    EXPECT_FALSE(ja.at("vectors").empty());
}

TEST(Cli, ValidateClassifiesAVector)
{
    auto bench = load_benchmark(benchmark_path("harvest"));
    auto v = *bench.ground_truth;
    auto j = attack_json(v, bench);
    j["estimatedProfit"] = to_double(bench.ground_truth_profit) * 10;
    auto path = write_file("vector.json", j.dump());
    auto r = cli("validate --benchmark " + benchmark_path("harvest") + " --vector " + path);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out).at("status"), "counterexample");
}

TEST(Cli, RequireAttackExitCode)
{
    auto r = cli("synthesize --benchmark " + benchmark_path("control") + " --method exact --iters 1 --require-attack");
    EXPECT_EQ(r.code, 3) << r.err;
}
