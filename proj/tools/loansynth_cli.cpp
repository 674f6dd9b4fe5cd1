#include "loansynth/report.hpp"
#include "loansynth/traceminer.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace loansynth;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNoAttack = 3;

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({path + ": cannot open file"});
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
}

void emit(const nlohmann::json& j, const std::string& out)
{
    if (out.empty() || out == "-")
        std::cout << j.dump(2) << '\n';
    else
        write_json(j, out);
}

std::vector<int> parse_strengths(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = std::stoi(item);
        if (v < 1 || v > 3)
            throw ConfigError({"--strengths: levels must be 1, 2 or 3"});
        out.push_back(v);
    }
    if (out.empty())
        throw ConfigError({"--strengths: empty list"});
    return out;
}

struct Common {
    std::string benchmark;
    std::string out;
    int threads = 0;
};

void set_threads(int threads)
{
    int n = threads > 0 ? threads : std::min(omp_get_num_procs(), 18);
    omp_set_num_threads(std::max(1, n));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"loansynth: synthesize flash-loan attack vectors against simulated DeFi protocols"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--threads", common.threads, "Worker threads (default: cores, at most 18)");

    // collect
    auto* collect = app.add_subcommand("collect", "Sample initial data points for every approximated action");
    std::size_t points = 0;
    std::optional<std::uint64_t> seed;
    bool log_uniform = false;
    collect->add_option("--benchmark", common.benchmark)->required();
    collect->add_option("--points", points, "Points per action (default from benchmark)");
    collect->add_option("--seed", seed);
    collect->add_flag("--log-uniform", log_uniform);
    collect->add_option("--out", common.out, "Output directory for <action>.jsonl files")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "Fit surrogates from collected data points");
    std::string data_dir, method_text;
    int degree = 0;
    fit->add_option("--benchmark", common.benchmark)->required();
    fit->add_option("--data", data_dir, "Directory written by collect")->required();
    fit->add_option("--method", method_text, "poly or inter");
    fit->add_option("--degree", degree);
    fit->add_option("--out", common.out)->required();

    // synthesize
    auto* synth = app.add_subcommand("synthesize", "Run the full synthesis loop");
    std::size_t max_length = 0, iters = 0;
    double epsilon = 0, timeout = 0;
    std::string strengths_text;
    bool no_cegdc = false, require_attack = false;
    synth->add_option("--benchmark", common.benchmark)->required();
    synth->add_option("--max-length", max_length);
    synth->add_option("--iters", iters);
    synth->add_option("--epsilon", epsilon);
    synth->add_option("--method", method_text, "poly, inter or exact");
    synth->add_option("--degree", degree);
    synth->add_option("--strengths", strengths_text, "Comma separated levels, e.g. 1,2,3");
    synth->add_option("--seed", seed);
    synth->add_option("--points", points);
    synth->add_option("--timeout", timeout, "Wall-clock budget in seconds");
    synth->add_flag("--no-cegdc", no_cegdc, "Disable counterexample-guided data collection");
    synth->add_flag("--require-attack", require_attack, "Exit with 3 when no attack is found");
    synth->add_option("--out", common.out, "Report path (default stdout)");

    // validate
    auto* val = app.add_subcommand("validate", "Execute a concrete vector and classify it");
    std::string vector_path;
    val->add_option("--benchmark", common.benchmark)->required();
    val->add_option("--vector", vector_path, "JSON with actions/params (e.g. one entry of a report)")->required();
    val->add_option("--epsilon", epsilon);
    val->add_option("--out", common.out);

    // mine
    auto* mine = app.add_subcommand("mine", "Derive action candidates from interfaces and traces");
    std::string interfaces, traces, filter_out, learn_out, deps_out;
    std::size_t max_choices = kDefaultMaxChoices;
    mine->add_option("--interfaces", interfaces)->required();
    mine->add_option("--traces", traces)->required();
    mine->add_option("--benchmark", common.benchmark)->required();
    mine->add_option("--max-choices", max_choices);
    mine->add_option("--filter-out", filter_out, "Also write the filter stage");
    mine->add_option("--learn-out", learn_out, "Also write the learning stage");
    mine->add_option("--deps-out", deps_out, "Also write the dependency stage");
    mine->add_option("--out", common.out);

    // replay
    auto* rep = app.add_subcommand("replay", "Replay a vector (or the ground truth) and report profit");
    rep->add_option("--benchmark", common.benchmark)->required();
    rep->add_option("--vector", vector_path, "Vector JSON; defaults to the benchmark's ground truth");
    rep->add_option("--out", common.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        set_threads(common.threads);
        BenchmarkConfig bench = load_benchmark(common.benchmark);

        if (collect->parsed()) {
            SampleBudget budget;
            budget.initial_per_action = points ? points : bench.defaults.initial_points;
            budget.seed = seed.value_or(bench.defaults.seed);
            budget.log_uniform = log_uniform || bench.defaults.log_uniform;
            DataSet data = collect_initial(bench.world, bench.actions, bench.raw, budget, bench.adversary);
            fs::create_directories(common.out);
            nlohmann::json counts = nlohmann::json::object();
            for (const auto& [id, pts] : data) {
                std::ofstream f(fs::path(common.out) / (id + ".jsonl"));
                dump_points(pts, f);
                counts[id] = pts.size();
            }
            nlohmann::json summary{{"benchmark", bench.name},
                                   {"seed", budget.seed},
                                   {"pointsPerAction", budget.initial_per_action},
                                   {"logUniform", budget.log_uniform},
                                   {"counts", counts}};
            write_json(summary, (fs::path(common.out) / "collect.json").string());
            std::cout << summary.dump(2) << '\n';
            return 0;
        }

        if (fit->parsed()) {
            FitOptions opts{method_text.empty() ? ApproxMethod::poly : parse_method(method_text),
                            degree ? degree : bench.defaults.degree};
            DataSet data;
            for (const auto& spec : bench.actions) {
                fs::path p = fs::path(data_dir) / (spec.id + ".jsonl");
                if (!spec.approximate || !fs::exists(p))
                    continue;
                std::ifstream f(p);
                data[spec.id] = load_points(f);
            }
            SurrogateSet set = fit_all(bench.actions, data, opts);
            nlohmann::json j{{"benchmark", bench.name},
                             {"method", to_string(opts.method)},
                             {"degree", opts.degree},
                             {"models", to_json(set)}};
            emit(j, common.out);
            return 0;
        }

        if (synth->parsed()) {
            SynthesisConfig c = bench.defaults;
            if (max_length)
                c.max_length = max_length;
            if (iters)
                c.max_iterations = iters;
            if (epsilon > 0)
                c.epsilon = epsilon;
            if (!method_text.empty())
                c.method = parse_method(method_text);
            if (degree)
                c.degree = degree;
            if (!strengths_text.empty())
                c.strengths = parse_strengths(strengths_text);
            if (seed)
                c.seed = *seed;
            if (points)
                c.initial_points = points;
            if (timeout > 0)
                c.timeout_seconds = timeout;
            if (no_cegdc)
                c.cegdc = false;
            RunResult r = run(c, bench.input());
            emit(run_report(bench, c, r), common.out);
            if (require_attack && r.attacks.empty())
                return kExitNoAttack;
            return 0;
        }

        if (val->parsed()) {
            AttackVector v = attack_from_json(read_json_file(vector_path), bench);
            double eps = epsilon > 0 ? epsilon : bench.defaults.epsilon;
            Validation res = validate(bench.world, bench.actions, v, eps, bench.adversary);
            v.status = res.status;
            v.actual_profit = res.actual_profit;
            v.executed_prefix = res.executed_prefix;
            emit(attack_json(v, bench), common.out);
            return 0;
        }

        if (rep->parsed()) {
            AttackVector v;
            if (!vector_path.empty())
                v = attack_from_json(read_json_file(vector_path), bench);
            else if (bench.ground_truth)
                v = *bench.ground_truth;
            else
                throw ConfigError({common.benchmark + ": no ground truth and no --vector given"});
            World final_state;
            ProfitReport p = replay(bench, v, &final_state);
            nlohmann::json per_token = nlohmann::json::object();
            for (const auto& [t, d] : p.per_token)
                per_token[t] = to_string(d);
            v.actual_profit = p.usd_profit;
            v.status = AttackStatus::validated;
            v.executed_prefix = v.actions.size();
            nlohmann::json j = attack_json(v, bench);
            j["perToken"] = per_token;
            j["finalStateHash"] = final_state.state().hash();
            emit(j, common.out);
            return 0;
        }

        if (mine->parsed()) {
            auto entries = load_interfaces(read_json_file(interfaces));
            std::ifstream tf(traces);
            if (!tf)
                throw ConfigError({traces + ": cannot open file"});
            auto corpus = load_traces(tf);
            auto candidates = filter_interface(entries);
            auto learned = learn_special_params(candidates, corpus, max_choices);
            std::vector<std::pair<std::string, TraceRecord>> records;
            std::vector<std::string> not_exec;
            std::vector<ConcreteCandidate> executable;
            for (const auto& a : learned.actions) {
                ProbeResult pr = check_executable(a, bench.world);
                if (!pr.executable) {
                    not_exec.push_back(a.id());
                    continue;
                }
                executable.push_back(a);
                records.emplace_back(a.id(), pr.record);
            }
            DependencyMap deps = raw_dependencies(records);
            auto dropped = independent(deps);
            if (!filter_out.empty())
                write_json(filter_json(candidates), filter_out);
            if (!learn_out.empty())
                write_json(learn_json(learned), learn_out);
            if (!deps_out.empty())
                write_json(deps_json(deps, dropped, not_exec), deps_out);

            Amount upper = 1;
            for (const auto& [t, a] : bench.capital)
                upper = std::max(upper, a);
            nlohmann::json actions = nlohmann::json::array();
            nlohmann::json dep_out = nlohmann::json::object();
            for (const auto& a : executable) {
                if (dropped.count(a.id()))
                    continue;
                nlohmann::json params = nlohmann::json::array();
                for (const auto& p : a.int_params)
                    params.push_back({{"name", p}, {"lower", "1"}, {"upper", to_string(upper)}});
                actions.push_back({{"id", a.id()},
                                   {"protocol", a.contract},
                                   {"method", a.function},
                                   {"fixed", a.fixed_args},
                                   {"params", params},
                                   {"prestates", nlohmann::json::array()},
                                   {"poststates", nlohmann::json::array()},
                                   {"tokens_in", nlohmann::json::array()},
                                   {"tokens_out", nlohmann::json::array()}});
                dep_out[a.id()] = deps[a.id()];
            }
            emit({{"actions", actions}, {"dependencies", dep_out}}, common.out);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetExhausted& e) {
        std::cerr << "sampling: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
