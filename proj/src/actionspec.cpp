#include "loansynth/actionspec.hpp"

#include <algorithm>

namespace loansynth {

std::vector<std::string> ActionSpec::flow_tokens() const
{
    std::vector<std::string> out;
    for (const auto* list : {&tokens_in, &tokens_out})
        for (const auto& t : *list)
            if (std::find(out.begin(), out.end(), t) == out.end())
                out.push_back(t);
    return out;
}

std::string to_string(SpecError code)
{
    switch (code) {
    case SpecError::UnknownProtocol: return "UnknownProtocol";
    case SpecError::UnknownMethod: return "UnknownMethod";
    case SpecError::BadArity: return "BadArity";
    case SpecError::UnknownStateVar: return "UnknownStateVar";
    case SpecError::PoststateNotWritable: return "PoststateNotWritable";
    case SpecError::BadBounds: return "BadBounds";
    case SpecError::DuplicateParam: return "DuplicateParam";
    case SpecError::UnknownToken: return "UnknownToken";
    }
    return "?";
}

namespace {

bool matches_write(const std::string& name, const std::vector<std::string>& writes)
{
    for (const auto& w : writes) {
        if (w == name)
            return true;
        // "prefix[*]" covers any key under that mapping
        if (w.size() > 3 && w.compare(w.size() - 3, 3, "[*]") == 0 &&
            name.rfind(w.substr(0, w.size() - 2), 0) == 0)
            return true;
    }
    return false;
}

} // namespace

std::vector<SpecIssue> validate_spec(const ActionSpec& spec, const World& world)
{
    std::vector<SpecIssue> issues;
    auto add = [&](SpecError code, std::string msg) { issues.push_back({code, spec.id + ": " + std::move(msg)}); };

    if (!world.has_protocol(spec.protocol)) {
        add(SpecError::UnknownProtocol, "unknown protocol '" + spec.protocol + "'");
        return issues;
    }
    const Protocol& proto = world.protocol(spec.protocol);
    auto methods = proto.methods();
    auto m = std::find_if(methods.begin(), methods.end(), [&](const MethodInfo& mi) { return mi.name == spec.method; });
    if (m == methods.end()) {
        add(SpecError::UnknownMethod, "protocol '" + spec.protocol + "' has no method '" + spec.method + "'");
        return issues;
    }
    if (m->fixed_args.size() != spec.fixed_args.size() || m->int_params.size() != spec.params.size())
        add(SpecError::BadArity, "method " + spec.method + " takes " + std::to_string(m->fixed_args.size()) +
                                     " fixed and " + std::to_string(m->int_params.size()) + " integer arguments");

    std::set<std::string> names;
    for (const auto& p : spec.params) {
        if (!names.insert(p.name).second)
            add(SpecError::DuplicateParam, "duplicate parameter '" + p.name + "'");
        if (p.lower <= 0 || p.upper < p.lower)
            add(SpecError::BadBounds, "parameter '" + p.name + "' needs 0 < lower <= upper");
    }

    for (const auto& ref : spec.prestates)
        if (!world.readable(ref))
            add(SpecError::UnknownStateVar, "unknown prestate '" + ref + "'");

    auto writes = proto.writes(spec.method, spec.fixed_args);
    for (const auto& ref : spec.poststates) {
        if (!world.readable(ref)) {
            add(SpecError::UnknownStateVar, "unknown poststate '" + ref + "'");
            continue;
        }
        auto [pid, name] = split_ref(ref);
        if (world.is_view(ref))
            continue;
        if (pid != spec.protocol || !matches_write(name, writes))
            add(SpecError::PoststateNotWritable, "poststate '" + ref + "' is not written by " + spec.method);
    }

    for (const auto& t : spec.flow_tokens())
        if (!world.registry().contains(t))
            add(SpecError::UnknownToken, "unknown token '" + t + "'");
    return issues;
}

std::vector<Amount> read_refs(const std::vector<std::string>& refs, const World& world)
{
    std::vector<Amount> out;
    out.reserve(refs.size());
    for (const auto& r : refs)
        out.push_back(world.read(r));
    return out;
}

std::vector<Amount> read_states(const ActionSpec& spec, const World& world) { return read_refs(spec.prestates, world); }

std::string describe(const SymbolicVector& vector, const std::vector<ActionSpec>& specs)
{
    std::string out;
    for (std::size_t k = 0; k < vector.actions.size(); ++k) {
        if (k)
            out += " -> ";
        out += specs.at(vector.actions[k]).id;
    }
    return out;
}

std::string to_string(AttackStatus status)
{
    switch (status) {
    case AttackStatus::candidate: return "candidate";
    case AttackStatus::validated: return "validated";
    case AttackStatus::counterexample: return "counterexample";
    case AttackStatus::reverted: return "reverted";
    }
    return "?";
}

SymbolicVector AttackVector::symbolic() const
{
    SymbolicVector v;
    for (const auto& a : actions)
        v.actions.push_back(a.action);
    return v;
}

std::vector<Amount> token_delta_of(const LedgerState& before, const LedgerState& after, const std::string& caller,
                                   const std::vector<std::string>& tokens)
{
    std::vector<Amount> deltas;
    deltas.reserve(tokens.size());
    for (const auto& t : tokens)
        deltas.push_back(after.balance(caller, t) - before.balance(caller, t));
    return deltas;
}

ExecRecord execute_action(World& world, const ActionSpec& spec, std::span<const Amount> params,
                          const std::string& caller)
{
    ExecRecord rec;
    rec.prestates = read_states(spec, world);
    LedgerState before = world.state();
    try {
        world.call(caller, spec.protocol, spec.method, spec.fixed_args, params);
    } catch (const Revert& r) {
        rec.reverted = true;
        rec.reason = r.what();
        return rec;
    }
    rec.poststates = read_refs(spec.poststates, world);
    rec.token_deltas = token_delta_of(before, world.state(), caller, spec.flow_tokens());
    return rec;
}

} // namespace loansynth
