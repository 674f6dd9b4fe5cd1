#pragma once

#include "loansynth/benchmark.hpp"

#include <json.hpp>

#include <string>

namespace loansynth {

nlohmann::json config_json(const SynthesisConfig& config);
SynthesisConfig config_from_json(const nlohmann::json& j);

nlohmann::json attack_json(const AttackVector& vector, const BenchmarkConfig& bench);
/// Inverse of attack_json (params and action ids only).
AttackVector attack_from_json(const nlohmann::json& j, const BenchmarkConfig& bench);

/// actual / ground truth, or nullopt when the benchmark has none.
std::optional<double> normalized_profit(const Rational& actual, const BenchmarkConfig& bench);

nlohmann::json run_report(const BenchmarkConfig& bench, const SynthesisConfig& config, const RunResult& result);

/// Copy with every "timing" member removed, for determinism comparisons.
nlohmann::json strip_timing(nlohmann::json j);

/// Pretty JSON with a trailing newline. Throws std::runtime_error on IO
/// failure.
void write_json(const nlohmann::json& j, const std::string& path);

} // namespace loansynth
