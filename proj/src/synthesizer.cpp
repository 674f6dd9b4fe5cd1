#include "loansynth/synthesizer.hpp"

#include <algorithm>
#include <cmath>

namespace loansynth {

std::vector<SymbolicVector> enumerate_vectors(std::size_t action_count, std::size_t max_length)
{
    std::vector<SymbolicVector> out;
    if (action_count == 0)
        return out;
    for (std::size_t len = 1; len <= max_length; ++len) {
        std::vector<std::size_t> digits(len, 0);
        while (true) {
            out.push_back(SymbolicVector{digits});
            std::size_t pos = len;
            while (pos > 0 && ++digits[pos - 1] == action_count)
                digits[--pos] = 0;
            if (pos == 0)
                break;
        }
    }
    return out;
}

std::set<std::string> held_tokens(const LedgerState& state, const std::string& adversary)
{
    std::set<std::string> out;
    for (const auto& [key, amount] : state.balances())
        if (key.first == adversary && amount > 0)
            out.insert(key.second);
    return out;
}

bool is_feasible(const SymbolicVector& vector, const std::vector<ActionSpec>& specs,
                 const std::set<std::string>& initial_tokens, std::size_t max_repeat)
{
    std::map<std::size_t, std::size_t> uses;
    std::set<std::string> available = initial_tokens;
    for (std::size_t k = 0; k < vector.actions.size(); ++k) {
        std::size_t a = vector.actions[k];
        if (k > 0 && vector.actions[k - 1] == a)
            return false;
        if (++uses[a] > max_repeat)
            return false;
        const ActionSpec& spec = specs.at(a);
        for (const auto& t : spec.tokens_in)
            if (!available.count(t))
                return false;
        available.insert(spec.tokens_out.begin(), spec.tokens_out.end());
    }
    return true;
}

bool is_counterexample(double estimated, double actual, double epsilon)
{
    double gap = std::abs(estimated - actual);
    return gap > 0 && gap >= epsilon * (std::abs(estimated) + std::abs(actual));
}

bool is_counterexample(const Rational& estimated, const Rational& actual, const Rational& epsilon)
{
    Rational gap = abs(estimated - actual);
    return gap > 0 && gap >= epsilon * (abs(estimated) + abs(actual));
}

Validation validate(const World& world, const std::vector<ActionSpec>& specs, const AttackVector& candidate,
                    double epsilon, const std::string& adversary)
{
    World w = world;
    Validation v;
    v.status = AttackStatus::validated;
    for (const auto& a : candidate.actions) {
        const ActionSpec& spec = specs.at(a.action);
        try {
            w.call(adversary, spec.protocol, spec.method, spec.fixed_args, a.params);
        } catch (const Revert&) {
            v.status = AttackStatus::reverted;
            break;
        }
        ++v.executed_prefix;
    }
    v.actual_profit = profit(world.state(), w.state(), adversary).usd_profit;
    if (v.status != AttackStatus::reverted &&
        is_counterexample(candidate.estimated_profit, to_double(v.actual_profit), epsilon))
        v.status = AttackStatus::counterexample;
    return v;
}

bool is_accurate(std::span<const double> estimated, std::span<const double> actual, double epsilon)
{
    if (estimated.size() != actual.size())
        return false;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        double scale = std::max(1.0, std::abs(actual[i]));
        if (!(std::abs(estimated[i] - actual[i]) < epsilon * scale))
            return false;
    }
    return true;
}

DataSet cegdc(const AttackVector& cex, const World& world, const std::vector<ActionSpec>& specs,
              const SurrogateSet& surrogates, const std::string& adversary, double epsilon)
{
    SymbolicVector sv = cex.symbolic();
    VectorPlan plan(world, specs, surrogates, sv, adversary);
    std::vector<double> flat;
    for (const auto& a : cex.actions)
        for (const auto& p : a.params)
            flat.push_back(to_double(p));
    Trajectory est;
    plan.evaluate(flat, &est);

    // Actual trajectory along the longest executable prefix.
    struct Step {
        DataPoint point;
        std::vector<double> slots;
        std::vector<double> deltas;
    };
    std::vector<Step> actual;
    World w = world;
    std::vector<double> slots0, bal0;
    observe(plan, w, adversary, slots0, bal0);
    for (const auto& a : cex.actions) {
        const ActionSpec& spec = specs.at(a.action);
        ExecRecord rec = execute_action(w, spec, a.params, adversary);
        if (rec.reverted)
            break;
        Step s;
        s.point.prestates = std::move(rec.prestates);
        s.point.params = a.params;
        s.point.poststates = std::move(rec.poststates);
        s.point.token_deltas = std::move(rec.token_deltas);
        std::vector<double> bal;
        observe(plan, w, adversary, s.slots, bal);
        for (std::size_t t = 0; t < bal.size(); ++t)
            s.deltas.push_back(bal[t] - bal0[t]);
        actual.push_back(std::move(s));
    }

    DataSet out;
    for (std::size_t k = actual.size(); k >= 1; --k) {
        bool accurate = false;
        if (k <= est.slots.size()) {
            std::vector<double> est_deltas;
            for (std::size_t t = 0; t < bal0.size(); ++t)
                est_deltas.push_back(est.balances[k - 1][t] - plan.initial_balances()[t]);
            accurate = is_accurate(est.slots[k - 1], actual[k - 1].slots, epsilon) &&
                       is_accurate(est_deltas, actual[k - 1].deltas, epsilon);
        }
        if (accurate)
            break;
        const ActionSpec& spec = specs.at(cex.actions[k - 1].action);
        auto it = surrogates.find(spec.id);
        if (it != surrogates.end() && !it->second.exact)
            out[spec.id].push_back(actual[k - 1].point);
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

// A reverted candidate usually overshoots a balance or limit by less than the
// surrogate error; keep more slack on the next attempt.
constexpr double kMarginFloor = 1e-4;
constexpr double kMarginGrowth = 4.0;
constexpr double kMaxMargin = 0.1;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::uint64_t mix(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

RunResult run(const SynthesisConfig& config, const SynthesisInput& input)
{
    auto t0 = Clock::now();
    DataSet data;
    if (config.method != ApproxMethod::exact) {
        SampleBudget budget;
        budget.initial_per_action = config.initial_points;
        budget.seed = config.seed;
        budget.log_uniform = config.log_uniform;
        data = collect_initial(input.world, input.specs, input.raw, budget, input.adversary);
    }
    double collect = seconds_since(t0);
    RunResult r = run_with_data(config, input, std::move(data));
    r.times.collect = collect;
    r.times.total = seconds_since(t0);
    return r;
}

RunResult run_with_data(const SynthesisConfig& config, const SynthesisInput& input, DataSet data)
{
    if (config.max_length < 1 || !(config.epsilon > 0 && config.epsilon < 1) || config.strengths.empty())
        throw std::invalid_argument("synthesis config: need max_length >= 1, 0 < epsilon < 1, strengths");
    auto start = Clock::now();
    auto out_of_time = [&] { return seconds_since(start) > config.timeout_seconds; };
    RunResult result;
    const auto& specs = input.specs;

    for (const auto& [id, pts] : data) {
        result.idp[id] = pts.size();
        result.tdp[id] = pts.size();
    }

    auto tf = Clock::now();
    FitOptions fit{config.method, config.degree};
    SurrogateSet surrogates = fit_all(specs, data, fit);
    result.times.fit += seconds_since(tf);

    const std::size_t max_repeat =
        config.max_repeat_per_action ? config.max_repeat_per_action : (config.max_length + 1) / 2;
    auto held = held_tokens(input.world.state(), input.adversary);
    auto all = enumerate_vectors(specs.size(), config.max_length);
    result.enumerated = all.size();
    std::vector<PriorityEntry> entries;
    for (auto& v : all)
        if (is_feasible(v, specs, held, max_repeat))
            entries.push_back(PriorityEntry{.vector = std::move(v), .margin = config.constraint_margin});
    result.pruned_survivors = entries.size();

    std::map<SymbolicVector, AttackVector> best_attack;

    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        if (out_of_time()) {
            result.timed_out = true;
            break;
        }
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (!entries[i].dropped)
                active.push_back(i);
        if (active.empty())
            break;
        result.iterations = iter + 1;
        StrengthLevel strength = StrengthLevel::preset(config.strengths[std::min(iter, config.strengths.size() - 1)]);

        auto to = Clock::now();
        std::vector<VectorOutcome> outcomes(active.size());
        std::vector<char> skipped(active.size(), 0);
        const long m = static_cast<long>(active.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < m; ++i) {
            if (out_of_time()) {
                skipped[i] = 1;
                continue;
            }
            PriorityEntry& e = entries[active[i]];
            VectorOutcome& o = outcomes[i];
            o.iteration = iter;
            o.vector = e.vector;
            auto problem = construct(e.vector, surrogates, input.world, specs, input.adversary, e.margin);
            std::vector<std::vector<double>> warm;
            if (!e.best_params.empty())
                warm.push_back(e.best_params);
            o.optimum = solve(problem, strength, mix(mix(config.seed, active[i]), iter), warm, ExecPolicy::serial);
            if (!o.optimum.feasible)
                continue;
            AttackVector cand;
            std::size_t off = 0;
            for (std::size_t a : e.vector.actions) {
                ConcreteAction ca{a, {}};
                for (std::size_t p = 0; p < specs[a].params.size(); ++p)
                    ca.params.push_back(amount_from_double(o.optimum.best_params[off++]));
                cand.actions.push_back(std::move(ca));
            }
            cand.estimated_profit = o.optimum.best_objective;
            Validation v = validate(input.world, specs, cand, config.epsilon, input.adversary);
            cand.status = v.status;
            cand.actual_profit = v.actual_profit;
            cand.executed_prefix = v.executed_prefix;
            o.candidate = std::move(cand);
        }
        result.times.optimize += seconds_since(to);

        // Barrier: merge, refine and rescore in entry order.
        auto tr = Clock::now();
        bool new_data = false;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (skipped[i]) {
                result.timed_out = true;
                continue;
            }
            PriorityEntry& e = entries[active[i]];
            VectorOutcome& o = outcomes[i];
            bool grace = false;
            double score = 1.0 + 9.0 * o.optimum.feasible_fraction;
            if (o.candidate) {
                AttackVector& c = *o.candidate;
                double actual = to_double(*c.actual_profit);
                e.best_params = o.optimum.best_params;
                if (actual > 0)
                    score = actual;
                if (c.status == AttackStatus::validated && actual > config.min_profit_usd) {
                    auto it = best_attack.find(e.vector);
                    if (it == best_attack.end() || *it->second.actual_profit < *c.actual_profit)
                        best_attack[e.vector] = c;
                }
                if (c.status == AttackStatus::reverted)
                    e.margin = std::min(kMaxMargin, std::max(e.margin, kMarginFloor) * kMarginGrowth);
                if (c.status == AttackStatus::counterexample || c.status == AttackStatus::reverted) {
                    ++result.counterexamples;
                    grace = c.estimated_profit > 0 && config.cegdc;
                    if (config.cegdc) {
                        DataSet extra = cegdc(c, input.world, specs, surrogates, input.adversary, config.epsilon);
                        for (auto& [id, pts] : extra) {
                            o.new_points += pts.size();
                            result.tdp[id] += pts.size();
                            auto& dst = data[id];
                            dst.insert(dst.end(), pts.begin(), pts.end());
                            new_data = new_data || !pts.empty();
                        }
                    }
                }
            }
            // scores before and after a refit on this vector's own
            // counterexample are not comparable
            grace = grace || o.new_points > 0;
            if (e.last_score && score <= *e.last_score && !grace)
                e.dropped = true;
            e.last_score = score;
            e.score = score;
            result.log.push_back(std::move(o));
        }
        if (new_data) {
            auto tf2 = Clock::now();
            surrogates = fit_all(specs, data, fit);
            result.times.fit += seconds_since(tf2);
        }
        result.times.refine += seconds_since(tr);
    }

    for (auto& [v, a] : best_attack)
        result.attacks.push_back(a);
    std::stable_sort(result.attacks.begin(), result.attacks.end(),
                     [](const AttackVector& a, const AttackVector& b) { return *a.actual_profit > *b.actual_profit; });
    result.times.total = seconds_since(start);
    return result;
}

} // namespace loansynth
