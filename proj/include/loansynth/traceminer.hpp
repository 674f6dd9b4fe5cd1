#pragma once

#include "loansynth/actionspec.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace loansynth {

struct InterfaceParam {
    std::string name;
    std::string kind; // int, address, bytes, string, array, enum
};

struct InterfaceEntry {
    std::string contract;
    std::string name;
    std::string mutability; // view, pure, nonpayable, payable
    std::vector<InterfaceParam> params;
    bool privileged = false;
};

struct TraceRecord {
    std::string contract;
    std::string function;
    std::map<std::string, std::string> args;
    std::set<std::string> reads;
    std::set<std::string> writes;
    std::map<std::string, bool> sender_scoped;
};

/// A function that survived filtering; permission parameters removed.
struct FunctionCandidate {
    std::string contract;
    std::string function;
    std::vector<std::string> int_params;
    std::vector<std::string> special_params;
};

/// A candidate with its special parameters bound to one historical choice.
struct ConcreteCandidate {
    std::string contract;
    std::string function;
    std::vector<std::string> fixed_args;
    std::vector<std::string> int_params;

    std::string id() const;
};

struct LearnOverflow {
    std::string contract;
    std::string function;
    std::size_t choices = 0;
};

struct LearnResult {
    std::vector<ConcreteCandidate> actions;
    std::vector<LearnOverflow> overflow;
    /// Functions with special parameters never seen in the corpus.
    std::vector<std::string> unlearned;
};

struct ProbeResult {
    bool executable = false;
    TraceRecord record;
};

inline constexpr std::size_t kDefaultMaxChoices = 20;

std::vector<InterfaceEntry> load_interfaces(const nlohmann::json& j);
std::vector<TraceRecord> load_traces(std::istream& in);
nlohmann::json to_json(const TraceRecord& r);

/// True for owner/admin/governance style names.
bool looks_privileged(const std::string& name);

std::vector<FunctionCandidate> filter_interface(const std::vector<InterfaceEntry>& entries);

LearnResult learn_special_params(const std::vector<FunctionCandidate>& candidates,
                                 const std::vector<TraceRecord>& corpus, std::size_t max_choices = kDefaultMaxChoices);

/// Runs the candidate once on a copy of `world` as `probe`, after dealing the
/// probe a small balance of every registered token, and records storage
/// accesses. Integer parameters are set to `probe_amount`.
ProbeResult check_executable(const ConcreteCandidate& candidate, const World& world,
                             const std::string& probe = "probe", const Amount& probe_amount = 1000);

/// Same, for an already configured action.
ProbeResult probe_action(const ActionSpec& spec, const World& world, const std::string& probe = "probe",
                         const Amount& probe_amount = 1000);

/// deps(a) = { b != a : reads(a) & writes(b) != {} }, sender-scoped keys
/// ignored.
DependencyMap raw_dependencies(const std::vector<std::pair<std::string, TraceRecord>>& records);

/// Ids with no dependency in either direction.
std::set<std::string> independent(const DependencyMap& deps);

nlohmann::json filter_json(const std::vector<FunctionCandidate>& candidates);
nlohmann::json learn_json(const LearnResult& result);
nlohmann::json deps_json(const DependencyMap& deps, const std::set<std::string>& dropped,
                         const std::vector<std::string>& not_executable);

} // namespace loansynth
