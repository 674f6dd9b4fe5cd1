#pragma once

#include "loansynth/estimator.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace loansynth {

struct Evaluation {
    bool valid = true; // false: the estimate reverted or is undefined
    double objective = 0.0;
    std::vector<double> residuals; // feasible iff every residual >= 0
};

/// Maximize objective(x) subject to residual_i(x) >= slack_i over a box.
/// Evaluation must be pure and thread-safe.
struct OptimizationProblem {
    std::vector<std::pair<double, double>> bounds;
    std::function<Evaluation(std::span<const double>)> evaluate;
    /// Per-residual magnitude used to normalize violations; empty means 1.
    std::vector<double> residual_scales;
    /// Per-residual required slack; empty means 0.
    std::vector<double> slack;
    /// Set when the problem was built from a symbolic vector.
    std::shared_ptr<const VectorPlan> plan;

    double objective(std::span<const double> x) const { return evaluate(x).objective; }
    std::vector<double> constraints(std::span<const double> x) const { return evaluate(x).residuals; }
    std::size_t constraint_count() const;
    /// Largest normalized shortfall below the required slack (0 when feasible).
    double violation(const Evaluation& e) const;
    bool feasible(const Evaluation& e) const;
};

struct StrengthLevel {
    int level = 1;
    std::size_t sampling_points_per_dim = 32;
    std::size_t refinement_iterations = 2; // penalty rounds
    std::size_t local_polish_budget = 32;  // evaluations per dimension

    /// Defaults: 64 / 256 / 1024 evaluations per dimension for levels 1-3.
    static StrengthLevel preset(int level);
    static StrengthLevel from_budget(int level, std::size_t evals_per_dim);
};

struct OptResult {
    std::vector<double> best_params; // integral values
    double best_objective = 0.0;
    bool feasible = false;
    std::size_t evaluations = 0;
    /// Share of the global sample that was feasible (the synthesizer's
    /// diagnostic score for unprofitable vectors).
    double feasible_fraction = 0.0;
};

/// Builds the problem for `vector`: objective is the estimated USD profit,
/// residuals are the adversary's tracked balances and the poststates after
/// every step. Residuals fed by surrogate outputs must keep `margin` times
/// their scale in reserve, so small estimation errors do not revert.
OptimizationProblem construct(const SymbolicVector& vector, const SurrogateSet& surrogates, const World& world,
                              const std::vector<ActionSpec>& specs, const std::string& adversary, double margin = 0.0);

/// Deterministic for a fixed seed and strength. NoFeasiblePoint is reported
/// as feasible == false. Warm starts are evaluated first, so a later level
/// seeded with an earlier result never reports a worse feasible objective.
OptResult solve(const OptimizationProblem& problem, const StrengthLevel& strength, std::uint64_t seed,
                const std::vector<std::vector<double>>& warm_starts = {}, ExecPolicy policy = ExecPolicy::parallel);

/// Radical-inverse Halton point `index` in [0,1)^dim with a Cranley-Patterson
/// shift.
std::vector<double> halton_point(std::size_t index, std::size_t dim, std::span<const double> shift);

/// Evaluates every point of a batch; the serial policy is the reference.
std::vector<Evaluation> evaluate_batch(const OptimizationProblem& problem, const std::vector<std::vector<double>>& xs,
                                       ExecPolicy policy = ExecPolicy::parallel);

} // namespace loansynth
