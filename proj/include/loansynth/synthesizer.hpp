#pragma once

#include "loansynth/optimizer.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace loansynth {

struct SynthesisConfig {
    std::size_t max_length = 4;
    std::size_t max_iterations = 16;
    double epsilon = 0.05;
    /// 0 means ceil(max_length / 2).
    std::size_t max_repeat_per_action = 0;
    double timeout_seconds = 600.0;
    std::uint64_t seed = 1;
    ApproxMethod method = ApproxMethod::poly;
    int degree = 2;
    /// Strength for iteration i is strengths[min(i, size - 1)].
    std::vector<int> strengths{1, 2, 3};
    bool cegdc = true;
    std::size_t initial_points = 200;
    bool log_uniform = false;
    /// Required slack on every balance constraint, relative to its scale.
    double constraint_margin = 1e-3;
    /// Validated vectors must earn strictly more than this (USD).
    double min_profit_usd = 0.0;
};

/// Everything a run needs besides its configuration.
struct SynthesisInput {
    World world;
    std::vector<ActionSpec> specs;
    DependencyMap raw;
    std::string adversary;
};

/// All sequences of length 1..max_length over `action_count` actions in
/// lexicographic order, shorter first.
std::vector<SymbolicVector> enumerate_vectors(std::size_t action_count, std::size_t max_length);

/// Pruning: no adjacent duplicates, at most `max_repeat` uses of one action,
/// and every consumed token is held initially or produced earlier.
bool is_feasible(const SymbolicVector& vector, const std::vector<ActionSpec>& specs,
                 const std::set<std::string>& initial_tokens, std::size_t max_repeat);

/// Tokens the adversary holds a positive balance of.
std::set<std::string> held_tokens(const LedgerState& state, const std::string& adversary);

/// |pe - pa| >= eps * (|pe| + |pa|) with a strictly positive gap.
bool is_counterexample(double estimated, double actual, double epsilon);
bool is_counterexample(const Rational& estimated, const Rational& actual, const Rational& epsilon);

struct Validation {
    AttackStatus status = AttackStatus::candidate;
    Rational actual_profit;
    std::size_t executed_prefix = 0;
};

/// Executes `candidate` on a copy of `world` and classifies it.
Validation validate(const World& world, const std::vector<ActionSpec>& specs, const AttackVector& candidate,
                    double epsilon, const std::string& adversary);

/// Counterexample-guided data collection: walks prefixes from the longest
/// executable one down and records an actual transition for every
/// approximated action whose prefix estimate is inaccurate, stopping at the
/// first accurate prefix.
DataSet cegdc(const AttackVector& counterexample, const World& world, const std::vector<ActionSpec>& specs,
              const SurrogateSet& surrogates, const std::string& adversary, double epsilon);

/// Componentwise relative closeness with scale max(1, |actual|).
bool is_accurate(std::span<const double> estimated, std::span<const double> actual, double epsilon);

struct PriorityEntry {
    SymbolicVector vector;
    double score = 0.0;
    std::optional<double> last_score = std::nullopt;
    bool dropped = false;
    std::vector<double> best_params = {};
    /// Constraint margin for this vector; grows each time a candidate reverts.
    double margin = 0.0;
};

struct VectorOutcome {
    std::size_t iteration = 0;
    SymbolicVector vector;
    OptResult optimum;
    std::optional<AttackVector> candidate;
    std::size_t new_points = 0;
};

struct PhaseTimes {
    double collect = 0.0;
    double fit = 0.0;
    double optimize = 0.0;
    double refine = 0.0;
    double total = 0.0;
};

struct RunResult {
    /// Validated profitable vectors, best first, one per symbolic vector.
    std::vector<AttackVector> attacks;
    std::vector<VectorOutcome> log;
    std::map<std::string, std::size_t> idp;
    std::map<std::string, std::size_t> tdp;
    std::size_t enumerated = 0;
    std::size_t pruned_survivors = 0;
    std::size_t counterexamples = 0;
    std::size_t iterations = 0;
    bool timed_out = false;
    PhaseTimes times;
};

RunResult run(const SynthesisConfig& config, const SynthesisInput& input);

/// Same as run() but starting from an existing data set (no sampling).
RunResult run_with_data(const SynthesisConfig& config, const SynthesisInput& input, DataSet data);

} // namespace loansynth
