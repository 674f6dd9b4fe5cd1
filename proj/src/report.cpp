#include "loansynth/report.hpp"

#include <fstream>

namespace loansynth {

nlohmann::json config_json(const SynthesisConfig& c)
{
    return {{"maxLength", c.max_length},
            {"iterations", c.max_iterations},
            {"epsilon", c.epsilon},
            {"maxRepeat", c.max_repeat_per_action},
            {"timeout", c.timeout_seconds},
            {"seed", c.seed},
            {"method", to_string(c.method)},
            {"degree", c.degree},
            {"strengths", c.strengths},
            {"cegdc", c.cegdc},
            {"initialPoints", c.initial_points},
            {"logUniform", c.log_uniform},
            {"constraintMargin", c.constraint_margin},
            {"minProfitUsd", c.min_profit_usd}};
}

SynthesisConfig config_from_json(const nlohmann::json& j)
{
    SynthesisConfig c;
    c.max_length = j.value("maxLength", c.max_length);
    c.max_iterations = j.value("iterations", c.max_iterations);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.max_repeat_per_action = j.value("maxRepeat", c.max_repeat_per_action);
    c.timeout_seconds = j.value("timeout", c.timeout_seconds);
    c.seed = j.value("seed", c.seed);
    c.method = parse_method(j.value("method", to_string(c.method)));
    c.degree = j.value("degree", c.degree);
    c.strengths = j.value("strengths", c.strengths);
    c.cegdc = j.value("cegdc", c.cegdc);
    c.initial_points = j.value("initialPoints", c.initial_points);
    c.log_uniform = j.value("logUniform", c.log_uniform);
    c.constraint_margin = j.value("constraintMargin", c.constraint_margin);
    c.min_profit_usd = j.value("minProfitUsd", c.min_profit_usd);
    return c;
}

std::optional<double> normalized_profit(const Rational& actual, const BenchmarkConfig& bench)
{
    if (!bench.ground_truth || bench.ground_truth_profit <= 0)
        return std::nullopt;
    return to_double(Rational(actual / bench.ground_truth_profit));
}

nlohmann::json attack_json(const AttackVector& v, const BenchmarkConfig& bench)
{
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& a : v.actions) {
        nlohmann::json params = nlohmann::json::array();
        for (const auto& p : a.params)
            params.push_back(to_string(p));
        steps.push_back({{"action", bench.actions.at(a.action).id}, {"params", params}});
    }
    nlohmann::json j{{"actions", steps},
                     {"estimatedProfit", v.estimated_profit},
                     {"status", to_string(v.status)},
                     {"executedPrefix", v.executed_prefix}};
    if (v.actual_profit) {
        j["actualProfit"] = to_double(*v.actual_profit);
        j["actualProfitExact"] = v.actual_profit->str();
        if (auto n = normalized_profit(*v.actual_profit, bench))
            j["normalizedProfit"] = *n;
    }
    return j;
}

AttackVector attack_from_json(const nlohmann::json& j, const BenchmarkConfig& bench)
{
    AttackVector v;
    for (const auto& s : j.at("actions")) {
        ConcreteAction a{bench.action_index(s.at("action")), {}};
        for (const auto& p : s.at("params"))
            a.params.push_back(parse_amount(p.is_string() ? p.get<std::string>() : p.dump()));
        if (a.params.size() != bench.actions[a.action].params.size())
            throw std::invalid_argument("wrong parameter count for " + bench.actions[a.action].id);
        v.actions.push_back(std::move(a));
    }
    v.estimated_profit = j.value("estimatedProfit", 0.0);
    return v;
}

nlohmann::json run_report(const BenchmarkConfig& bench, const SynthesisConfig& config, const RunResult& r)
{
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& a : r.attacks)
        vectors.push_back(attack_json(a, bench));
    nlohmann::json points = nlohmann::json::object();
    for (const auto& spec : bench.actions) {
        auto idp = r.idp.count(spec.id) ? r.idp.at(spec.id) : 0;
        auto tdp = r.tdp.count(spec.id) ? r.tdp.at(spec.id) : 0;
        points[spec.id] = {{"idp", idp}, {"tdp", tdp}};
    }
    nlohmann::json j{{"benchmark", bench.name},
                     {"source", bench.source},
                     {"seed", config.seed},
                     {"config", config_json(config)},
                     {"vectors", vectors},
                     {"dataPoints", points},
                     {"enumerated", r.enumerated},
                     {"afterPruning", r.pruned_survivors},
                     {"counterexamples", r.counterexamples},
                     {"iterations", r.iterations},
                     {"timedOut", r.timed_out},
                     {"timing",
                      {{"collect", r.times.collect},
                       {"fit", r.times.fit},
                       {"optimize", r.times.optimize},
                       {"refine", r.times.refine},
                       {"total", r.times.total}}}};
    if (bench.ground_truth) {
        j["groundTruthProfit"] = to_double(bench.ground_truth_profit);
        j["normalizedProfit"] = r.attacks.empty() ? 0.0 : *normalized_profit(*r.attacks.front().actual_profit, bench);
    }
    return j;
}

nlohmann::json strip_timing(nlohmann::json j)
{
    if (j.is_object()) {
        j.erase("timing");
        for (auto& [k, v] : j.items())
            v = strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j)
            v = strip_timing(v);
    }
    return j;
}

void write_json(const nlohmann::json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

} // namespace loansynth
