// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "loansynth/report.hpp"
#include "loansynth/stableswap.hpp"
#include "loansynth/traceminer.hpp"
#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

using namespace loansynth;
using boost::multiprecision::cpp_int;
using testing_support::benchmark_path;
using testing_support::fixture_path;
using testing_support::slurp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

// ---- 1, 2: StableSwap --------------------------------------------------

// Largest D (scaled by 2^64) with the cleared invariant residual >= 0.
double bisect_d(const std::vector<Amount>& xp, const Amount& amp)
{
    const std::size_t n = xp.size();
    cpp_int s = 0, p = 1, nn = 1;
    for (const auto& x : xp) {
        s += cpp_int(x);
        p *= cpp_int(x);
    }
    for (std::size_t i = 0; i < n; ++i)
        nn *= static_cast<long>(n);
    const cpp_int ann = cpp_int(amp) * nn;
    const cpp_int unit = cpp_int(1) << 64;
    cpp_int unit_n = 1;
    for (std::size_t i = 0; i < n; ++i)
        unit_n *= unit;
    cpp_int lo = 0, hi = s * unit + 1;
    while (hi - lo > 1) {
        cpp_int mid = (lo + hi) / 2;
        cpp_int lhs = (ann * s * unit - (ann - 1) * mid) * nn * p * unit_n;
        cpp_int rhs = 1;
        for (std::size_t i = 0; i <= n; ++i)
            rhs *= mid;
        (lhs >= rhs ? lo : hi) = mid;
    }
    return std::ldexp(lo.convert_to<double>(), -64);
}

struct Pool {
    std::vector<Amount> xp;
    Amount amp;
};

Pool random_pool(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> bal(1e6, 1e15);
    std::uniform_int_distribution<int> coins(2, 4), amp(10, 2000);
    Pool p;
    int n = coins(rng);
    for (int i = 0; i < n; ++i)
        p.xp.push_back(amount_from_double(std::floor(bal(rng))));
    p.amp = amp(rng);
    return p;
}

Outcome criterion1()
{
    auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        auto p = random_pool(rng);
        double root = bisect_d(p.xp, p.amp);
        worst = std::max(worst, std::abs(to_double(get_d(p.xp, p.amp)) - root) / root);
    }
    bool sums = true;
    for (int n = 2; n <= 4; ++n)
        for (int amp : {10, 500, 2000}) {
            std::vector<Amount> xp(n, Amount(987654321098LL));
            sums = sums && get_d(xp, amp) == Amount(987654321098LL) * n;
        }
    double t = seconds_since(t0);
    return {worst < 1e-9 && sums && t < 5.0,
            "worst relative error " + fmt(worst) + ", equal-balance sums " + (sums ? "exact" : "WRONG") + ", " +
                fmt(t) + " s"};
}

// Working pools near the peg: coins within a factor of two of a common scale.
// Once a coin is scarce, one unit of its balance moves D by far more than two
// units, so no integer state could meet the bound there.
Pool near_peg_pool(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> exponent(6, 14.5), spread(0.5, 2.0);
    std::uniform_int_distribution<int> coins(2, 4), amp(10, 2000);
    Pool p;
    double scale = std::pow(10.0, exponent(rng));
    int n = coins(rng);
    for (int i = 0; i < n; ++i)
        p.xp.push_back(amount_from_double(std::floor(scale * spread(rng))));
    p.amp = amp(rng);
    return p;
}

Outcome criterion2()
{
    std::mt19937_64 rng(202);
    Amount worst = 0;
    int done = 0;
    while (done < 100) {
        auto p = near_peg_pool(rng);
        std::vector<std::string> coins;
        auto reg = std::make_shared<TokenRegistry>();
        for (std::size_t i = 0; i < p.xp.size(); ++i) {
            coins.push_back("C" + std::to_string(i));
            reg->add({coins.back(), 6}, Rational(1));
        }
        World w(reg);
        auto pool = std::make_shared<StableSwapPool>("pool", coins, p.amp, Amount(0), Amount(10000));
        pool->init(w.state(), p.xp);
        w.add_protocol(pool);
        std::size_t n = coins.size(), i = rng() % n, j = (i + 1 + rng() % (n - 1)) % n;
        double frac = std::uniform_real_distribution<double>(0.001, 0.2)(rng);
        Amount dx = amount_from_double(std::floor(to_double(p.xp[i]) * frac));
        Amount before = get_d(pool->balances(w.state()), p.amp);
        w.state().mint("trader", coins[i], dx);
        std::vector<Amount> params{dx};
        try {
            w.call("trader", "pool", "exchange", {coins[i], coins[j]}, params);
        } catch (const Revert&) {
            continue;
        }
        Amount after = get_d(pool->balances(w.state()), p.amp);
        worst = std::max(worst, Amount(boost::multiprecision::abs(after - before)));
        ++done;
    }
    return {worst <= 2, "max |D_after - D_before| = " + to_string(worst) + " base units over 100 swaps of up to 20% of the input balance"};
}

// ---- 3: approximator ------------------------------------------------------

Outcome criterion3()
{
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-50, 50);
    auto f = [](const std::vector<double>& v) {
        return 7 - 3 * v[0] + 2 * v[1] + v[2] + 0.5 * v[0] * v[0] - v[0] * v[2] + 2.5 * v[1] * v[1] + 0.1 * v[2] * v[2];
    };
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int k = 0; k < 80; ++k) {
        x.push_back({u(rng), u(rng), u(rng)});
        y.push_back(f(x.back()));
    }
    auto poly = fit_polynomial(x, y, 2);
    double worst_rel = 0;
    for (int k = 0; k < 200; ++k) {
        std::vector<double> q{u(rng), u(rng), u(rng)};
        double t = f(q);
        worst_rel = std::max(worst_rel, std::abs(poly.eval(q) - t) / std::max(1.0, std::abs(t)));
    }

    std::vector<std::vector<double>> tx;
    std::vector<double> ty;
    std::uniform_real_distribution<double> w(0, 1e9);
    for (int k = 0; k < 500; ++k) {
        tx.push_back({w(rng), w(rng) * 1e-6, w(rng)});
        ty.push_back(w(rng));
    }
    auto nn = fit_nearest(tx, ty);
    bool exact = true;
    for (std::size_t i = 0; i < tx.size(); ++i)
        exact = exact && nn.eval(tx[i]) == ty[i];
    std::vector<double> lo(3, 1e300), hi(3, -1e300);
    for (const auto& r : tx)
        for (int d = 0; d < 3; ++d)
            lo[d] = std::min(lo[d], r[d]), hi[d] = std::max(hi[d], r[d]);
    int mismatches = 0;
    for (int q = 0; q < 1000; ++q) {
        std::vector<double> p{w(rng) * 1.1, w(rng) * 1.1e-6, w(rng) * 1.1};
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < tx.size(); ++i) {
            double d = 0;
            for (int k = 0; k < 3; ++k) {
                double t = (tx[i][k] - p[k]) / (hi[k] - lo[k]);
                d += t * t;
            }
            if (d < best_d)
                best_d = d, best = i;
        }
        mismatches += nn.eval(p) != ty[best];
    }
    return {worst_rel < 1e-6 && exact && mismatches == 0,
            "poly held-out worst relative error " + fmt(worst_rel) + ", 1-NN exact on training " +
                (exact ? "yes" : "NO") + ", scan mismatches " + std::to_string(mismatches) + "/1000"};
}

// ---- 4: optimizer -----------------------------------------------------------

Outcome criterion4()
{
    auto t0 = Clock::now();
    OptimizationProblem parabola;
    parabola.bounds = {{-100, 100}};
    parabola.evaluate = [](std::span<const double> x) { return Evaluation{true, -(x[0] - 3) * (x[0] - 3), {}}; };
    auto rp = solve(parabola, StrengthLevel::preset(1), 1);
    double dx = rp.feasible ? std::abs(rp.best_params[0] - 3) : 1e300;

    OptimizationProblem lp;
    lp.bounds = {{0, 100}, {0, 100}};
    lp.evaluate = [](std::span<const double> x) { return Evaluation{true, 2 * x[0] + x[1], {100 - x[0] - x[1]}}; };
    lp.residual_scales = {100};
    auto rl = solve(lp, StrengthLevel::preset(1), 1);
    double gap = rl.feasible ? 100 - rl.best_params[0] - rl.best_params[1] : 1e300;

    const auto& h = testing_support::harvest();
    SampleBudget budget;
    budget.seed = 1;
    budget.initial_per_action = 100;
    auto data = collect_initial(h.world, h.actions, h.raw, budget, h.adversary);
    auto set = fit_all(h.actions, data, {ApproxMethod::poly, 2});
    auto prob = construct(h.ground_truth->symbolic(), set, h.world, h.actions, h.adversary);
    auto r = solve(prob, StrengthLevel::preset(3), 1);

    const long grid = 50;
    const std::size_t n = prob.bounds.size();
    long total = 1;
    for (std::size_t i = 0; i < n; ++i)
        total *= grid;
    double best = -1e300;
#pragma omp parallel for reduction(max : best) schedule(static, 4096)
    for (long k = 0; k < total; ++k) {
        std::vector<double> x(n);
        long q = k;
        for (std::size_t i = 0; i < n; ++i) {
            auto [lo, hi] = prob.bounds[i];
            double t = static_cast<double>(q % grid) / (grid - 1);
            q /= grid;
            x[i] = std::round(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
        }
        auto e = prob.evaluate(x);
        if (prob.feasible(e))
            best = std::max(best, e.objective);
    }
    double ratio = r.feasible && best > 0 ? r.best_objective / best : 0.0;
    double t = seconds_since(t0);
    return {dx < 0.01 && std::abs(gap) <= 0.01 && ratio >= 0.9 && t < 60,
            "|x-3| = " + fmt(dx) + ", constraint slack " + fmt(gap) + ", harvest strength-3 " +
                fmt(r.best_objective) + " vs 50^" + std::to_string(n) + " grid " + fmt(best) + " (ratio " +
                fmt(ratio) + "), " + fmt(t) + " s"};
}

// ---- 5: pruning -------------------------------------------------------------

Outcome criterion5()
{
    const auto& h = testing_support::harvest();
    auto all = enumerate_vectors(h.actions.size(), 4);
    auto held = held_tokens(h.world.state(), h.adversary);
    std::size_t max_repeat = 2;
    std::vector<SymbolicVector> removed;
    std::size_t kept = 0;
    for (const auto& v : all) {
        if (is_feasible(v, h.actions, held, max_repeat))
            ++kept;
        else
            removed.push_back(v);
    }
    bool gt_kept = is_feasible(h.ground_truth->symbolic(), h.actions, held, max_repeat);

    // Soundness spot-check: run each removed vector at coarse parameter
    // levels (log-spaced quarter points of every range), 1000 runs in total.
    const std::size_t budget = 1000;
    const std::size_t per_vector = std::max<std::size_t>(1, budget / removed.size());
    const std::vector<double> levels{0.25, 0.5, 0.75, 1.0};
    std::size_t runs = 0, profitable = 0;
    Rational best = -1;
    for (const auto& v : removed) {
        std::size_t n = 0;
        for (auto a : v.actions)
            n += h.actions[a].params.size();
        std::size_t combos = 1;
        for (std::size_t i = 0; i < n && combos < per_vector * 64; ++i)
            combos *= levels.size();
        std::size_t stride = std::max<std::size_t>(1, combos / per_vector);
        for (std::size_t c = 0, used = 0; c < combos && used < per_vector && runs < budget; c += stride, ++used) {
            AttackVector vec;
            std::size_t q = c;
            for (auto a : v.actions) {
                ConcreteAction ca{a, {}};
                for (const auto& p : h.actions[a].params) {
                    double lo = to_double(p.lower), hi = to_double(p.upper);
                    double t = levels[q % levels.size()];
                    q /= levels.size();
                    ca.params.push_back(amount_from_double(std::round(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))))));
                }
                vec.actions.push_back(std::move(ca));
            }
            ++runs;
            try {
                Rational pr = replay(h, vec).usd_profit;
                best = std::max(best, pr);
                profitable += pr > 0;
            } catch (const Revert&) {
            }
        }
    }
    bool strict = kept < all.size();
    return {strict && gt_kept && profitable == 0 && runs <= budget,
            std::to_string(kept) + "/" + std::to_string(all.size()) + " survive, ground truth " +
                (gt_kept ? "kept" : "REMOVED") + ", " + std::to_string(runs) + " runs over " +
                std::to_string(removed.size()) + " removed vectors, profitable " + std::to_string(profitable) +
                " (best " + fmt(to_double(best)) + " USD)"};
}

// ---- 6, 7, 9: synthesis runs ---------------------------------------------------

struct RunSummary {
    double normalized = 0;
    bool validated = false;
    std::size_t vectors = 0;
    std::size_t idp = 0;
    std::size_t tdp = 0;
    std::size_t counterexamples = 0;
    double seconds = 0;
};

RunSummary summarize(const BenchmarkConfig& b, const SynthesisConfig& c)
{
    auto t0 = Clock::now();
    auto r = run(c, b.input());
    RunSummary s;
    s.seconds = seconds_since(t0);
    s.vectors = r.attacks.size();
    if (!r.attacks.empty()) {
        s.validated = r.attacks.front().status == AttackStatus::validated;
        if (auto n = normalized_profit(*r.attacks.front().actual_profit, b))
            s.normalized = *n;
    }
    for (const auto& [id, n] : r.idp)
        s.idp += n;
    for (const auto& [id, n] : r.tdp)
        s.tdp += n;
    s.counterexamples = r.counterexamples;
    return s;
}

Outcome criterion6()
{
    const auto& h = testing_support::harvest();
    SynthesisConfig c = h.defaults;
    c.method = ApproxMethod::poly;
    c.epsilon = 0.05;
    c.max_length = 4;
    auto poly = summarize(h, c);
    c.method = ApproxMethod::exact;
    auto exact = summarize(h, c);
    return {poly.validated && poly.normalized >= 0.8 && poly.seconds < 600 && exact.normalized >= 0.9,
            "poly normalized " + fmt(poly.normalized) + " (" + fmt(poly.seconds) + " s), exact normalized " +
                fmt(exact.normalized) + " (" + fmt(exact.seconds) + " s)"};
}

Outcome criterion7()
{
    // "Solved" means a validated vector with normalized profit >= 0.8.
    bool monotone = true, growth = true, only_with = false;
    std::string detail;
    for (const char* name : {"harvest", "warp", "control"}) {
        auto b = load_benchmark(benchmark_path(name));
        SynthesisConfig c = b.defaults;
        c.method = ApproxMethod::poly;
        c.cegdc = true;
        auto on = summarize(b, c);
        c.cegdc = false;
        auto off = summarize(b, c);
        monotone = monotone && on.normalized >= off.normalized;
        if (on.counterexamples > 0)
            growth = growth && on.tdp > on.idp;
        bool solved_on = on.validated && on.normalized >= 0.8, solved_off = off.validated && off.normalized >= 0.8;
        only_with = only_with || (solved_on && !solved_off);
        detail += std::string(detail.empty() ? "" : "; ") + name + " on " + fmt(on.normalized) + " off " +
                  fmt(off.normalized) + " cex " + std::to_string(on.counterexamples) + " IDP " +
                  std::to_string(on.idp) + " TDP " + std::to_string(on.tdp);
    }
    return {monotone && growth && only_with, detail};
}

Outcome criterion8()
{
    bool ok = !is_counterexample(100.0, 100.0, 0.05) && is_counterexample(100.0, 50.0, 0.05) &&
              !is_counterexample(0.0, 0.0, 0.05) && !is_counterexample(0.0, 0.0, 0.5);
    const Rational eps(1, 20);
    ok = ok && !is_counterexample(Rational(100), Rational(100), eps) &&
         is_counterexample(Rational(100), Rational(50), eps) && !is_counterexample(Rational(0), Rational(0), eps);
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    int asym = 0;
    for (int k = 0; k < 10000; ++k) {
        double a = u(rng), b = k % 3 ? u(rng) : a * (1 + u(rng) * 1e-7);
        asym += is_counterexample(a, b, 0.05) != is_counterexample(b, a, 0.05);
        Rational ra(static_cast<long long>(a)), rb(static_cast<long long>(b));
        asym += is_counterexample(ra, rb, eps) != is_counterexample(rb, ra, eps);
    }
    return {ok && asym == 0, std::string("truth table ") + (ok ? "ok" : "WRONG") + ", asymmetric pairs " +
                                 std::to_string(asym) + "/20000"};
}

Outcome criterion9()
{
    auto b = load_benchmark(benchmark_path("control"));
    std::size_t total = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthesisConfig c = b.defaults;
        c.method = ApproxMethod::poly;
        c.seed = seed;
        auto s = summarize(b, c);
        total += s.vectors;
        per_seed += (seed > 1 ? "," : "") + std::to_string(s.vectors);
    }
    return {total == 0, "validated vectors per seed 1-5: " + per_seed};
}

// ---- 10: traceminer -----------------------------------------------------------

Outcome criterion10()
{
    const auto& h = testing_support::harvest();
    auto entries = load_interfaces(nlohmann::json::parse(slurp(fixture_path("traceminer/interfaces.json"))));
    std::ifstream tf(fixture_path("traceminer/traces.jsonl"));
    auto corpus = load_traces(tf);
    auto candidates = filter_interface(entries);
    auto learned = learn_special_params(candidates, corpus, 3);
    std::vector<std::pair<std::string, TraceRecord>> records;
    std::vector<std::string> not_exec;
    for (const auto& a : learned.actions) {
        auto pr = check_executable(a, h.world);
        if (pr.executable)
            records.emplace_back(a.id(), pr.record);
        else
            not_exec.push_back(a.id());
    }
    auto deps = raw_dependencies(records);
    auto pretty = [](const nlohmann::json& j) { return j.dump(2) + "\n"; };
    bool f = pretty(filter_json(candidates)) == slurp(fixture_path("traceminer/expected_filter.json"));
    bool l = pretty(learn_json(learned)) == slurp(fixture_path("traceminer/expected_learn.json"));
    bool d = pretty(deps_json(deps, independent(deps), not_exec)) == slurp(fixture_path("traceminer/expected_deps.json"));
    int brute_mismatch = 0;
    auto scoped = [](const TraceRecord& r, const std::string& k) {
        auto it = r.sender_scoped.find(k);
        return it != r.sender_scoped.end() && it->second;
    };
    for (const auto& [a, ra] : records)
        for (const auto& [b, rb] : records) {
            bool expect = false;
            for (const auto& k : ra.reads)
                expect = expect || (a != b && rb.writes.count(k) && !scoped(ra, k) && !scoped(rb, k));
            brute_mismatch += (deps[a].count(b) == 1) != expect;
        }
    return {f && l && d && brute_mismatch == 0,
            std::string("filter ") + (f ? "equal" : "DIFFERENT") + ", learn " + (l ? "equal" : "DIFFERENT") +
                ", deps " + (d ? "equal" : "DIFFERENT") + ", RAW brute-force mismatches " +
                std::to_string(brute_mismatch)};
}

// ---- 11: determinism through the CLI ------------------------------------------------

std::string run_cli(const std::string& args, const fs::path& dir)
{
    auto out = dir / "stdout.txt";
    std::string cmd = std::string(LOANSYNTH_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        return "exit " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
    return slurp(out.string());
}

std::string normalized_json(const std::string& text)
{
    try {
        return strip_timing(nlohmann::json::parse(text)).dump();
    } catch (const nlohmann::json::exception&) {
        return text;
    }
}

std::string dir_contents(const fs::path& d)
{
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(d))
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files)
        all += f.filename().string() + "\n" + slurp(f.string());
    return all;
}

Outcome criterion11()
{
    auto root = fs::temp_directory_path() / ("loansynth_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string h = benchmark_path("harvest");
    auto gt = load_benchmark(h);
    {
        fs::create_directories(root);
        std::ofstream(root / "vector.json") << attack_json(*gt.ground_truth, gt).dump();
    }
    const std::string vec = (root / "vector.json").string();
    const std::string mine_args = "mine --interfaces " + fixture_path("traceminer/interfaces.json") + " --traces " +
                                  fixture_path("traceminer/traces.jsonl") + " --benchmark " + h + " --max-choices 3";

    std::vector<std::string> failed;
    auto twice = [&](const std::string& name, const std::function<std::string(const fs::path&)>& once) {
        auto a_dir = root / (name + "_a"), b_dir = root / (name + "_b");
        fs::create_directories(a_dir);
        fs::create_directories(b_dir);
        auto a = once(a_dir), b = once(b_dir);
        if (a != b || a.rfind("exit ", 0) == 0)
            failed.push_back(name);
    };
    twice("collect", [&](const fs::path& d) {
        auto out = run_cli("collect --benchmark " + h + " --points 40 --seed 5 --out " + (d / "data").string(), d);
        return normalized_json(out) + dir_contents(d / "data");
    });
    twice("fit", [&](const fs::path& d) {
        return normalized_json(
            run_cli("fit --benchmark " + h + " --data " + (root / "collect_a" / "data").string() + " --method poly --out -", d));
    });
    twice("synthesize", [&](const fs::path& d) {
        return normalized_json(run_cli("synthesize --benchmark " + h + " --method poly --seed 2 --iters 4", d));
    });
    twice("validate", [&](const fs::path& d) {
        return normalized_json(run_cli("validate --benchmark " + h + " --vector " + vec, d));
    });
    twice("replay", [&](const fs::path& d) { return normalized_json(run_cli("replay --benchmark " + h, d)); });
    twice("mine", [&](const fs::path& d) { return normalized_json(run_cli(mine_args, d)); });
    fs::remove_all(root);
    std::string detail = "collect, fit, synthesize, validate, replay, mine re-run";
    if (!failed.empty()) {
        detail += "; differing:";
        for (const auto& f : failed)
            detail += " " + f;
    }
    return {failed.empty(), detail};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"stableswap get_d vs bisection", criterion1},
        {"fee-free exchanges preserve D", criterion2},
        {"approximator oracles", criterion3},
        {"optimizer sanity", criterion4},
        {"pruning", criterion5},
        {"end-to-end synthesis on harvest", criterion6},
        {"counterexample-guided data collection", criterion7},
        {"counterexample predicate", criterion8},
        {"control benchmark has no attack", criterion9},
        {"trace miner fixtures", criterion10},
        {"determinism", criterion11},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
