#pragma once

#include "loansynth/protocol.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace loansynth {

struct SymbolicParam {
    std::string name;
    Amount lower = 1;
    Amount upper = 1;
};

/// A protocol method with its discrete arguments fixed, bounded integer
/// parameters left open, and the annotation that drives approximation:
/// prestates (inputs), poststates (outputs) and the caller's token flows.
struct ActionSpec {
    std::string id;
    std::string protocol;
    std::string method;
    std::vector<std::string> fixed_args;
    std::vector<SymbolicParam> params;
    std::vector<std::string> prestates;
    std::vector<std::string> poststates;
    std::vector<std::string> tokens_in;
    std::vector<std::string> tokens_out;
    bool approximate = true;

    /// tokens_in followed by tokens_out, duplicates removed.
    std::vector<std::string> flow_tokens() const;
    /// poststates + flow tokens: one surrogate per output.
    std::size_t output_count() const { return poststates.size() + flow_tokens().size(); }
    std::size_t input_count() const { return prestates.size() + params.size(); }
};

enum class SpecError {
    UnknownProtocol,
    UnknownMethod,
    BadArity,
    UnknownStateVar,
    PoststateNotWritable,
    BadBounds,
    DuplicateParam,
    UnknownToken,
};

std::string to_string(SpecError code);

struct SpecIssue {
    SpecError code;
    std::string message;
};

/// Empty result means the spec is well formed against `world`.
std::vector<SpecIssue> validate_spec(const ActionSpec& spec, const World& world);

/// Values of the declared prestates, in declaration order.
std::vector<Amount> read_states(const ActionSpec& spec, const World& world);
std::vector<Amount> read_refs(const std::vector<std::string>& refs, const World& world);

/// Action id -> ids of actions it is read-after-write dependent on.
using DependencyMap = std::map<std::string, std::set<std::string>>;

/// Ordered symbolic actions (indices into the candidate list).
struct SymbolicVector {
    std::vector<std::size_t> actions;

    friend bool operator==(const SymbolicVector&, const SymbolicVector&) = default;
    friend auto operator<=>(const SymbolicVector&, const SymbolicVector&) = default;
};

std::string describe(const SymbolicVector& vector, const std::vector<ActionSpec>& specs);

struct ConcreteAction {
    std::size_t action = 0;
    std::vector<Amount> params;
};

enum class AttackStatus { candidate, validated, counterexample, reverted };

std::string to_string(AttackStatus status);

struct AttackVector {
    std::vector<ConcreteAction> actions;
    double estimated_profit = 0.0;
    std::optional<Rational> actual_profit;
    AttackStatus status = AttackStatus::candidate;
    /// Number of actions that executed before a revert (== size when none).
    std::size_t executed_prefix = 0;

    SymbolicVector symbolic() const;
};

/// One real execution of an action.
struct ExecRecord {
    bool reverted = false;
    std::string reason;
    std::vector<Amount> prestates;
    std::vector<Amount> poststates;
    /// Caller balance change per flow token (out negative, in positive).
    std::vector<Amount> token_deltas;
};

/// Runs the action on `world` as `caller`. On revert the world is unchanged
/// and the record carries no poststates.
ExecRecord execute_action(World& world, const ActionSpec& spec, std::span<const Amount> params,
                          const std::string& caller);

/// Caller balance difference per token between two ledgers.
std::vector<Amount> token_delta_of(const LedgerState& before, const LedgerState& after, const std::string& caller,
                                   const std::vector<std::string>& tokens);

} // namespace loansynth
