#pragma once

#include "loansynth/approximator.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace loansynth {

class MissingSurrogate : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Estimated state after each step of a vector.
struct Trajectory {
    /// slots[k][s]: value of state slot s after step k.
    std::vector<std::vector<double>> slots;
    /// balances[k][t]: adversary balance of tracked token t after step k.
    std::vector<std::vector<double>> balances;
};

struct PlanResult {
    bool reverted = false;
    std::size_t failed_step = 0;
    double profit = 0.0; // USD
    /// Per step: tracked adversary balances, then the step's poststates.
    std::vector<double> residuals;
};

/// Composition of action estimates along one symbolic vector.
///
/// Approximated actions are evaluated through their surrogates with inputs
/// taken from the running slot vector. Exact actions run the protocol on a
/// shadow ledger whose prestates are overwritten by any estimated values
/// they depend on; the shadow adversary is funded so only the tracked
/// balances decide feasibility. Parameters are rounded to integers.
class VectorPlan {
public:
    VectorPlan(const World& base, const std::vector<ActionSpec>& specs, const SurrogateSet& surrogates,
               const SymbolicVector& vector, std::string adversary);

    std::size_t param_count() const { return param_count_; }
    std::size_t step_count() const { return steps_.size(); }
    const std::vector<std::string>& slot_refs() const { return slot_refs_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<double>& initial_slots() const { return init_slots_; }
    const std::vector<double>& initial_balances() const { return init_balances_; }
    std::vector<std::pair<double, double>> param_bounds() const;
    /// Magnitude per residual, used to normalize penalties and margins.
    const std::vector<double>& residual_scales() const { return residual_scales_; }
    std::size_t residual_count() const { return residual_scales_.size(); }
    /// Whether a residual depends on any surrogate output (known from the
    /// vector's structure alone).
    const std::vector<bool>& residual_estimated() const { return residual_estimated_; }

    PlanResult evaluate(std::span<const double> params, Trajectory* trace = nullptr) const;

    /// Offsets of each step's parameters in the flat vector.
    std::size_t param_offset(std::size_t step) const { return steps_[step].param_offset; }

private:
    struct Step {
        const ActionSpec* spec = nullptr;
        const ActionSurrogates* surrogates = nullptr;
        std::vector<std::size_t> pre_slots;
        std::vector<std::size_t> post_slots;
        std::vector<std::size_t> flow_tokens;
        std::vector<bool> pre_loadable;
        std::size_t param_offset = 0;
    };

    std::string adversary_;
    std::vector<Step> steps_;
    std::vector<std::string> slot_refs_;
    std::vector<std::string> tokens_;
    std::vector<double> token_weights_; // USD per base unit
    std::vector<double> init_slots_;
    std::vector<double> init_balances_;
    std::vector<double> residual_scales_;
    std::vector<bool> residual_estimated_;
    std::size_t param_count_ = 0;
    bool has_exact_ = false;
    std::shared_ptr<const World> shadow_base_;
};

/// State of the slots and adversary balances of `plan` on a real world.
void observe(const VectorPlan& plan, const World& world, const std::string& adversary, std::vector<double>& slots,
             std::vector<double>& balances);

} // namespace loansynth
