#include "loansynth/traceminer.hpp"

#include <algorithm>
#include <cctype>
#include <istream>

namespace loansynth {

std::string ConcreteCandidate::id() const
{
    std::string s = contract + "." + function;
    if (!fixed_args.empty()) {
        s += "(";
        for (std::size_t i = 0; i < fixed_args.size(); ++i)
            s += (i ? "," : "") + fixed_args[i];
        s += ")";
    }
    return s;
}

std::vector<InterfaceEntry> load_interfaces(const nlohmann::json& j)
{
    std::vector<InterfaceEntry> out;
    for (const auto& c : j.at("contracts")) {
        std::set<std::string> seen;
        std::string contract = c.at("id");
        for (const auto& f : c.at("functions")) {
            InterfaceEntry e;
            e.contract = contract;
            e.name = f.at("name");
            e.mutability = f.value("mutability", "nonpayable");
            e.privileged = f.value("privileged", false);
            for (const auto& p : f.value("params", nlohmann::json::array()))
                e.params.push_back({p.at("name"), p.value("kind", "int")});
            if (!seen.insert(e.name).second)
                throw std::invalid_argument("duplicate function " + contract + "." + e.name);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<TraceRecord> load_traces(std::istream& in)
{
    std::vector<TraceRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto j = nlohmann::json::parse(line);
        TraceRecord r;
        r.contract = j.at("contract");
        r.function = j.at("function");
        // value() returns copies; keep them alive across the loops
        const auto args = j.value("args", nlohmann::json::object());
        const auto reads = j.value("storageReads", nlohmann::json::array());
        const auto writes = j.value("storageWrites", nlohmann::json::array());
        const auto scoped = j.value("senderScoped", nlohmann::json::object());
        for (const auto& [k, v] : args.items())
            r.args[k] = v.is_string() ? v.get<std::string>() : v.dump();
        for (const auto& s : reads)
            r.reads.insert(s.get<std::string>());
        for (const auto& s : writes)
            r.writes.insert(s.get<std::string>());
        for (const auto& [k, v] : scoped.items())
            r.sender_scoped[k] = v.get<bool>();
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json to_json(const TraceRecord& r)
{
    nlohmann::json j;
    j["contract"] = r.contract;
    j["function"] = r.function;
    j["args"] = r.args;
    j["storageReads"] = r.reads;
    j["storageWrites"] = r.writes;
    j["senderScoped"] = r.sender_scoped;
    return j;
}

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

const std::vector<std::string>& privileged_words()
{
    static const std::vector<std::string> words{"owner", "admin", "governance", "governor", "pause",
                                                "upgrade", "initialize", "setstrategy", "setfee", "rescue",
                                                "sweep", "emergency", "whitelist", "operator"};
    return words;
}

bool is_permission_function(const std::string& name)
{
    static const std::set<std::string> names{"approve", "increaseallowance", "decreaseallowance", "permit",
                                             "setapprovalforall"};
    return names.count(lower(name)) > 0;
}

// Slippage and expiry guards; compared case- and underscore-insensitively.
bool is_permission_param(const std::string& name)
{
    static const std::set<std::string> names{"deadline", "amountoutmin", "amountinmax", "minamount", "mindy",
                                             "minout", "minreturn", "expiry"};
    std::string key = lower(name);
    std::erase(key, '_');
    return names.count(key) > 0;
}

} // namespace

bool looks_privileged(const std::string& name)
{
    std::string l = lower(name);
    return std::any_of(privileged_words().begin(), privileged_words().end(),
                       [&](const std::string& w) { return l.find(w) != std::string::npos; });
}

std::vector<FunctionCandidate> filter_interface(const std::vector<InterfaceEntry>& entries)
{
    std::vector<FunctionCandidate> out;
    for (const auto& e : entries) {
        if (e.mutability == "view" || e.mutability == "pure")
            continue;
        if (e.privileged || looks_privileged(e.name) || is_permission_function(e.name))
            continue;
        FunctionCandidate c{e.contract, e.name, {}, {}};
        for (const auto& p : e.params) {
            if (is_permission_param(p.name))
                continue;
            (p.kind == "int" ? c.int_params : c.special_params).push_back(p.name);
        }
        out.push_back(std::move(c));
    }
    return out;
}

LearnResult learn_special_params(const std::vector<FunctionCandidate>& candidates,
                                 const std::vector<TraceRecord>& corpus, std::size_t max_choices)
{
    LearnResult res;
    for (const auto& c : candidates) {
        if (c.special_params.empty()) {
            res.actions.push_back({c.contract, c.function, {}, c.int_params});
            continue;
        }
        std::vector<std::vector<std::string>> choices; // first-seen order
        std::set<std::vector<std::string>> seen;
        for (const auto& r : corpus) {
            if (r.contract != c.contract || r.function != c.function)
                continue;
            std::vector<std::string> tuple;
            bool complete = true;
            for (const auto& p : c.special_params) {
                auto it = r.args.find(p);
                if (it == r.args.end()) {
                    complete = false;
                    break;
                }
                tuple.push_back(it->second);
            }
            if (complete && seen.insert(tuple).second)
                choices.push_back(std::move(tuple));
        }
        if (choices.empty()) {
            res.unlearned.push_back(c.contract + "." + c.function);
        } else if (choices.size() > max_choices) {
            res.overflow.push_back({c.contract, c.function, choices.size()});
        } else {
            for (auto& t : choices)
                res.actions.push_back({c.contract, c.function, std::move(t), c.int_params});
        }
    }
    return res;
}

namespace {

ProbeResult probe_call(const std::string& contract, const std::string& function,
                       const std::vector<std::string>& fixed, std::size_t int_count, const World& world,
                       const std::string& probe, const Amount& probe_amount)
{
    World w = world;
    for (const auto& t : w.registry().tokens())
        w.state().mint(probe, t.symbol, pow10(t.decimals) * 1000);
    AccessLog log;
    log.sender = probe;
    w.state().attach_log(&log);
    std::vector<Amount> params(int_count, probe_amount);
    ProbeResult res;
    res.record.contract = contract;
    res.record.function = function;
    try {
        w.call(probe, contract, function, fixed, params);
        res.executable = true;
    } catch (const Revert&) {
        res.executable = false;
    } catch (const std::exception&) {
        res.executable = false;
    }
    w.state().attach_log(nullptr);
    res.record.reads = log.reads;
    res.record.writes = log.writes;
    res.record.sender_scoped = log.sender_scoped;
    return res;
}

} // namespace

ProbeResult check_executable(const ConcreteCandidate& candidate, const World& world, const std::string& probe,
                             const Amount& probe_amount)
{
    if (!world.has_protocol(candidate.contract))
        return ProbeResult{false, TraceRecord{candidate.contract, candidate.function, {}, {}, {}, {}}};
    return probe_call(candidate.contract, candidate.function, candidate.fixed_args, candidate.int_params.size(), world,
                      probe, probe_amount);
}

ProbeResult probe_action(const ActionSpec& spec, const World& world, const std::string& probe,
                         const Amount& probe_amount)
{
    return probe_call(spec.protocol, spec.method, spec.fixed_args, spec.params.size(), world, probe, probe_amount);
}

DependencyMap raw_dependencies(const std::vector<std::pair<std::string, TraceRecord>>& records)
{
    auto global = [](const TraceRecord& r, const std::set<std::string>& keys) {
        std::set<std::string> out;
        for (const auto& k : keys) {
            auto it = r.sender_scoped.find(k);
            if (it == r.sender_scoped.end() || !it->second)
                out.insert(k);
        }
        return out;
    };
    DependencyMap deps;
    for (const auto& [a, ra] : records) {
        auto reads = global(ra, ra.reads);
        auto& d = deps[a];
        for (const auto& [b, rb] : records) {
            if (a == b)
                continue;
            auto writes = global(rb, rb.writes);
            bool hit = std::any_of(reads.begin(), reads.end(), [&](const std::string& k) { return writes.count(k); });
            if (hit)
                d.insert(b);
        }
    }
    return deps;
}

std::set<std::string> independent(const DependencyMap& deps)
{
    std::set<std::string> used;
    for (const auto& [a, ds] : deps)
        used.insert(ds.begin(), ds.end());
    std::set<std::string> out;
    for (const auto& [a, ds] : deps)
        if (ds.empty() && !used.count(a))
            out.insert(a);
    return out;
}

nlohmann::json filter_json(const std::vector<FunctionCandidate>& candidates)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : candidates)
        arr.push_back({{"contract", c.contract},
                       {"function", c.function},
                       {"intParams", c.int_params},
                       {"specialParams", c.special_params}});
    return {{"candidates", arr}};
}

nlohmann::json learn_json(const LearnResult& r)
{
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& a : r.actions)
        actions.push_back({{"id", a.id()},
                           {"contract", a.contract},
                           {"function", a.function},
                           {"fixedArgs", a.fixed_args},
                           {"intParams", a.int_params}});
    nlohmann::json overflow = nlohmann::json::array();
    for (const auto& o : r.overflow)
        overflow.push_back({{"contract", o.contract}, {"function", o.function}, {"choices", o.choices}});
    return {{"actions", actions}, {"overflow", overflow}, {"unlearned", r.unlearned}};
}

nlohmann::json deps_json(const DependencyMap& deps, const std::set<std::string>& dropped,
                         const std::vector<std::string>& not_executable)
{
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [a, ds] : deps)
        d[a] = ds;
    return {{"dependencies", d}, {"independent", dropped}, {"notExecutable", not_executable}};
}

} // namespace loansynth
