#pragma once

#include "loansynth/synthesizer.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace loansynth {

/// Schema or semantic problems in a benchmark file; every issue carries a
/// "file:line:" prefix where the position is known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

struct BenchmarkConfig {
    std::string name;
    std::string description;
    std::string source;
    World world;
    std::string adversary;
    std::map<std::string, Amount> capital;
    std::vector<ActionSpec> actions;
    DependencyMap raw;
    bool raw_from_file = false;
    std::optional<AttackVector> ground_truth;
    Rational ground_truth_profit;
    /// [synthesis] section merged over the built-in defaults.
    SynthesisConfig defaults;

    SynthesisInput input() const { return {world, actions, raw, adversary}; }
    std::size_t action_index(const std::string& id) const;
};

BenchmarkConfig parse_benchmark(std::string_view text, const std::string& source_name);
BenchmarkConfig load_benchmark(const std::string& path);

/// Probes every action once and derives read-after-write dependencies.
DependencyMap probe_dependencies(const World& world, const std::vector<ActionSpec>& actions);

/// Executes a concrete vector from the initial state. Reverts propagate.
ProfitReport replay(const BenchmarkConfig& bench, const AttackVector& vector, World* final_state = nullptr);

} // namespace loansynth
