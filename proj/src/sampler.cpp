#include "loansynth/sampler.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>

namespace loansynth {

std::vector<double> DataPoint::inputs() const
{
    std::vector<double> x;
    x.reserve(prestates.size() + params.size());
    for (const auto& v : prestates)
        x.push_back(to_double(v));
    for (const auto& v : params)
        x.push_back(to_double(v));
    return x;
}

std::vector<double> DataPoint::outputs() const
{
    std::vector<double> y;
    y.reserve(poststates.size() + token_deltas.size());
    for (const auto& v : poststates)
        y.push_back(to_double(v));
    for (const auto& v : token_deltas)
        y.push_back(to_double(v));
    return y;
}

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<Amount> draw_params(const ActionSpec& spec, std::mt19937_64& rng, bool log_uniform)
{
    std::vector<Amount> out;
    for (const auto& p : spec.params)
        out.push_back(sample_param(p, rng, log_uniform));
    return out;
}

bool run(World& world, const ActionSpec& spec, const std::vector<Amount>& params, const std::string& caller)
{
    try {
        world.call(caller, spec.protocol, spec.method, spec.fixed_args, params);
        return true;
    } catch (const Revert&) {
        return false;
    }
}

} // namespace

std::mt19937_64 attempt_rng(std::uint64_t seed, const std::string& action, std::uint64_t attempt)
{
    std::uint64_t s = splitmix(seed ^ splitmix(fnv(action) ^ splitmix(attempt)));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return std::mt19937_64(seq);
}

Amount sample_param(const SymbolicParam& p, std::mt19937_64& rng, bool log_uniform)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng);
    double lo = to_double(p.lower);
    double hi = to_double(p.upper);
    double v = log_uniform && lo > 0 ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)))
                                     : lo + u * (hi - lo);
    Amount a = amount_from_double(v);
    return std::clamp(a, p.lower, p.upper);
}

DataPoint sample_once(const World& base, const std::vector<ActionSpec>& specs, std::size_t target,
                      const DependencyMap& raw, const SampleBudget& budget, const std::string& adversary,
                      std::uint64_t attempt)
{
    const ActionSpec& spec = specs.at(target);
    auto rng = attempt_rng(budget.seed, spec.id, attempt);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    World world = base;

    auto index_of = [&](const std::string& id) -> std::size_t {
        for (std::size_t i = 0; i < specs.size(); ++i)
            if (specs[i].id == id)
                return i;
        return specs.size();
    };

    // Diversify the prestate with one random RAW predecessor.
    std::vector<std::size_t> preds;
    if (auto it = raw.find(spec.id); it != raw.end())
        for (const auto& id : it->second)
            if (auto k = index_of(id); k < specs.size() && k != target)
                preds.push_back(k);
    bool diversify = unit(rng) < budget.predecessor_probability;
    if (!preds.empty() && diversify) {
        std::size_t k = preds[std::uniform_int_distribution<std::size_t>(0, preds.size() - 1)(rng)];
        if (!run(world, specs[k], draw_params(specs[k], rng, budget.log_uniform), adversary))
            return DataPoint{.reverted = true};
    }

    // Set up what the target needs from the base state: producers of input
    // tokens the adversary lacks (withdraw needs shares) and writers of
    // prestates that are still zero (borrow needs collateral).
    auto pick = [&](const std::vector<std::size_t>& from) {
        return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
    };
    std::function<bool(std::size_t, int)> enable = [&](std::size_t a, int depth) -> bool {
        if (depth > 3)
            return true;
        const ActionSpec& s = specs[a];
        for (const auto& token : s.tokens_in) {
            if (world.state().balance(adversary, token) > 0)
                continue;
            std::vector<std::size_t> producers;
            for (std::size_t k = 0; k < specs.size(); ++k)
                if (k != a && std::find(specs[k].tokens_out.begin(), specs[k].tokens_out.end(), token) !=
                                  specs[k].tokens_out.end())
                    producers.push_back(k);
            if (producers.empty())
                continue;
            std::size_t k = pick(producers);
            if (!enable(k, depth + 1) || !run(world, specs[k], draw_params(specs[k], rng, budget.log_uniform), adversary))
                return false;
        }
        for (const auto& ref : s.prestates) {
            if (world.read(ref) != 0)
                continue;
            std::vector<std::size_t> writers;
            for (std::size_t k = 0; k < specs.size(); ++k)
                if (k != a && std::find(specs[k].poststates.begin(), specs[k].poststates.end(), ref) !=
                                  specs[k].poststates.end())
                    writers.push_back(k);
            if (writers.empty())
                continue;
            std::size_t k = pick(writers);
            if (!enable(k, depth + 1) || !run(world, specs[k], draw_params(specs[k], rng, budget.log_uniform), adversary))
                return false;
        }
        return true;
    };
    if (!enable(target, 0))
        return DataPoint{.reverted = true};

    auto params = draw_params(spec, rng, budget.log_uniform);
    ExecRecord rec = execute_action(world, spec, params, adversary);
    DataPoint p;
    p.prestates = std::move(rec.prestates);
    p.params = std::move(params);
    p.reverted = rec.reverted;
    if (!rec.reverted) {
        p.poststates = std::move(rec.poststates);
        p.token_deltas = std::move(rec.token_deltas);
    }
    return p;
}

DataSet collect_initial(const World& base, const std::vector<ActionSpec>& specs, const DependencyMap& raw,
                        const SampleBudget& budget, const std::string& adversary, ExecPolicy policy)
{
    if (budget.initial_per_action == 0)
        throw std::invalid_argument("initial_per_action must be positive");
    DataSet out;
    const std::size_t need = budget.initial_per_action;
    const std::size_t max_attempts = need * budget.attempt_factor;
    for (std::size_t a = 0; a < specs.size(); ++a) {
        if (!specs[a].approximate)
            continue;
        std::vector<DataPoint> points;
        std::size_t attempt = 0;
        while (points.size() < need && attempt < max_attempts) {
            std::size_t batch = std::min(max_attempts - attempt, std::max<std::size_t>(2 * (need - points.size()), 16));
            std::vector<DataPoint> results(batch);
            const long n = static_cast<long>(batch);
            if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
                for (long i = 0; i < n; ++i)
                    results[i] = sample_once(base, specs, a, raw, budget, adversary, attempt + i);
            } else {
                for (long i = 0; i < n; ++i)
                    results[i] = sample_once(base, specs, a, raw, budget, adversary, attempt + i);
            }
            for (auto& r : results)
                if (!r.reverted && points.size() < need)
                    points.push_back(std::move(r));
            attempt += batch;
        }
        if (points.size() < need)
            throw BudgetExhausted(specs[a].id + ": " + std::to_string(points.size()) + " of " + std::to_string(need) +
                                  " points after " + std::to_string(attempt) + " attempts");
        out[specs[a].id] = std::move(points);
    }
    return out;
}

namespace {

nlohmann::json to_strings(const std::vector<Amount>& v)
{
    auto arr = nlohmann::json::array();
    for (const auto& a : v)
        arr.push_back(to_string(a));
    return arr;
}

std::vector<Amount> from_strings(const nlohmann::json& arr)
{
    std::vector<Amount> out;
    for (const auto& s : arr)
        out.push_back(parse_amount(s.get<std::string>()));
    return out;
}

} // namespace

void dump_points(const std::vector<DataPoint>& points, std::ostream& out)
{
    for (const auto& p : points) {
        nlohmann::json j;
        j["prestates"] = to_strings(p.prestates);
        j["params"] = to_strings(p.params);
        j["poststates"] = to_strings(p.poststates);
        j["tokenDeltas"] = to_strings(p.token_deltas);
        j["reverted"] = p.reverted;
        out << j.dump() << '\n';
    }
}

std::vector<DataPoint> load_points(std::istream& in)
{
    std::vector<DataPoint> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto j = nlohmann::json::parse(line);
        DataPoint p;
        p.prestates = from_strings(j.at("prestates"));
        p.params = from_strings(j.at("params"));
        p.poststates = from_strings(j.at("poststates"));
        p.token_deltas = from_strings(j.at("tokenDeltas"));
        p.reverted = j.value("reverted", false);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace loansynth
