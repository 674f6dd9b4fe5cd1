#include "loansynth/benchmark.hpp"

#include "loansynth/constant_product.hpp"
#include "loansynth/lending.hpp"
#include "loansynth/stableswap.hpp"
#include "loansynth/traceminer.hpp"
#include "loansynth/vault.hpp"

#include <tomlplusplus/toml.hpp>

#include <fstream>
#include <sstream>

namespace loansynth {

namespace {

std::string join(const std::vector<std::string>& issues)
{
    std::string s;
    for (const auto& i : issues)
        s += (s.empty() ? "" : "\n") + i;
    return s;
}

/// Collects issues with source positions while walking the document.
class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    std::vector<std::string> issues;

    std::string where(const toml::node* node) const
    {
        if (node && node->source().begin.line > 0)
            return source_ + ":" + std::to_string(node->source().begin.line) + ": ";
        return source_ + ": ";
    }

    void error(const toml::node* node, const std::string& msg) { issues.push_back(where(node) + msg); }

    std::optional<std::string> str(const toml::table& t, const std::string& key, bool required = true)
    {
        const toml::node* n = t.get(key);
        if (!n) {
            if (required)
                error(&t, "missing key '" + key + "'");
            return std::nullopt;
        }
        if (auto v = n->value<std::string>())
            return *v;
        error(n, "'" + key + "' must be a string");
        return std::nullopt;
    }

    std::optional<Amount> amount(const toml::node* n, const std::string& what)
    {
        if (!n)
            return std::nullopt;
        try {
            if (n->is_string())
                return parse_amount(*n->value<std::string>());
            if (n->is_integer())
                return Amount(*n->value<std::int64_t>());
        } catch (const std::exception& e) {
            error(n, what + ": " + e.what());
            return std::nullopt;
        }
        error(n, what + " must be an integer or an integer string");
        return std::nullopt;
    }

    std::optional<Amount> amount(const toml::table& t, const std::string& key, bool required = true)
    {
        const toml::node* n = t.get(key);
        if (!n) {
            if (required)
                error(&t, "missing key '" + key + "'");
            return std::nullopt;
        }
        return amount(n, "'" + key + "'");
    }

    std::optional<Rational> rational(const toml::table& t, const std::string& key, bool required = true)
    {
        const toml::node* n = t.get(key);
        if (!n) {
            if (required)
                error(&t, "missing key '" + key + "'");
            return std::nullopt;
        }
        try {
            if (n->is_string())
                return parse_rational(*n->value<std::string>());
            if (n->is_integer())
                return Rational(*n->value<std::int64_t>());
        } catch (const std::exception& e) {
            error(n, "'" + key + "': " + e.what());
            return std::nullopt;
        }
        error(n, "'" + key + "' must be a string such as \"3/1000\" or \"1.5\"");
        return std::nullopt;
    }

    std::vector<std::string> strings(const toml::table& t, const std::string& key, bool required = false)
    {
        std::vector<std::string> out;
        const toml::node* n = t.get(key);
        if (!n) {
            if (required)
                error(&t, "missing key '" + key + "'");
            return out;
        }
        const toml::array* arr = n->as_array();
        if (!arr) {
            error(n, "'" + key + "' must be an array of strings");
            return out;
        }
        for (const auto& e : *arr) {
            if (auto v = e.value<std::string>())
                out.push_back(*v);
            else
                error(&e, "'" + key + "' entries must be strings");
        }
        return out;
    }

    std::vector<Amount> amounts(const toml::table& t, const std::string& key)
    {
        std::vector<Amount> out;
        const toml::node* n = t.get(key);
        const toml::array* arr = n ? n->as_array() : nullptr;
        if (!arr) {
            error(n ? n : &t, "'" + key + "' must be an array of amounts");
            return out;
        }
        for (const auto& e : *arr)
            if (auto a = amount(&e, "'" + key + "' entry"))
                out.push_back(*a);
        return out;
    }

    std::pair<Amount, Amount> fraction(const toml::table& t, const std::string& key, Amount num, Amount den)
    {
        if (auto r = rational(t, key, false)) {
            return {Amount(boost::multiprecision::numerator(*r)), Amount(boost::multiprecision::denominator(*r))};
        }
        return {num, den};
    }

private:
    std::string source_;
};

void apply_synthesis(Reader& rd, const toml::table& t, SynthesisConfig& c)
{
    for (const auto& [key, node] : t) {
        std::string k(key.str());
        auto as_size = [&]() -> std::size_t {
            auto v = node.value<std::int64_t>();
            if (!v || *v < 0) {
                rd.error(&node, "'" + k + "' must be a non-negative integer");
                return 0;
            }
            return static_cast<std::size_t>(*v);
        };
        auto as_double = [&]() -> double {
            if (auto v = node.value<double>())
                return *v;
            rd.error(&node, "'" + k + "' must be a number");
            return 0.0;
        };
        if (k == "max_length")
            c.max_length = as_size();
        else if (k == "iterations")
            c.max_iterations = as_size();
        else if (k == "epsilon")
            c.epsilon = as_double();
        else if (k == "max_repeat")
            c.max_repeat_per_action = as_size();
        else if (k == "timeout")
            c.timeout_seconds = as_double();
        else if (k == "seed")
            c.seed = as_size();
        else if (k == "method") {
            try {
                c.method = parse_method(node.value<std::string>().value_or(""));
            } catch (const std::exception& e) {
                rd.error(&node, e.what());
            }
        } else if (k == "degree")
            c.degree = static_cast<int>(as_size());
        else if (k == "initial_points")
            c.initial_points = as_size();
        else if (k == "log_uniform")
            c.log_uniform = node.value<bool>().value_or(false);
        else if (k == "cegdc")
            c.cegdc = node.value<bool>().value_or(true);
        else if (k == "constraint_margin")
            c.constraint_margin = as_double();
        else if (k == "min_profit_usd")
            c.min_profit_usd = as_double();
        else if (k == "strengths") {
            c.strengths.clear();
            if (const auto* arr = node.as_array())
                for (const auto& e : *arr)
                    c.strengths.push_back(static_cast<int>(e.value<std::int64_t>().value_or(0)));
        } else
            rd.error(&node, "unknown synthesis key '" + k + "'");
    }
}

void add_protocol(Reader& rd, const toml::table& p, BenchmarkConfig& b, std::shared_ptr<const TokenRegistry> reg)
{
    auto id = rd.str(p, "id");
    auto kind = rd.str(p, "kind");
    if (!id || !kind)
        return;
    auto need_token = [&](const std::string& sym) {
        if (!reg->contains(sym))
            rd.error(&p, "protocol " + *id + " references unknown token '" + sym + "'");
        return reg->contains(sym);
    };
    std::size_t before = rd.issues.size();
    LedgerState& st = b.world.state();
    if (*kind == "stableswap") {
        auto coins = rd.strings(p, "coins", true);
        auto amp = rd.amount(p, "amp");
        auto balances = rd.amounts(p, "balances");
        auto [fn, fd] = rd.fraction(p, "fee", 4, 10000);
        for (const auto& c : coins)
            need_token(c);
        if (coins.size() < 2 || balances.size() != coins.size())
            rd.error(&p, "stableswap needs >= 2 coins and one balance per coin");
        if (rd.issues.size() != before || !amp)
            return;
        auto pool = std::make_shared<StableSwapPool>(*id, coins, *amp, fn, fd);
        pool->init(st, balances);
        b.world.add_protocol(pool);
    } else if (*kind == "constant_product") {
        auto t0 = rd.str(p, "token0"), t1 = rd.str(p, "token1"), lp = rd.str(p, "lp_token");
        auto r0 = rd.amount(p, "reserve0"), r1 = rd.amount(p, "reserve1");
        auto provider = rd.str(p, "provider", false).value_or("liquidity_provider");
        auto [fn, fd] = rd.fraction(p, "fee", 3, 1000);
        if (t0)
            need_token(*t0);
        if (t1)
            need_token(*t1);
        if (lp)
            need_token(*lp);
        if (rd.issues.size() != before || !r0 || !r1)
            return;
        auto pool = std::make_shared<ConstantProductPool>(*id, *t0, *t1, *lp, fn, fd);
        pool->init(st, *r0, *r1, provider);
        b.world.add_protocol(pool);
    } else if (*kind == "vault") {
        auto u = rd.str(p, "underlying"), share = rd.str(p, "share_token");
        auto shares = rd.amount(p, "shares"), cash = rd.amount(p, "cash"), inv = rd.amount(p, "invested");
        auto holder = rd.str(p, "holder", false).value_or("depositors");
        bool legacy = p["legacy_enabled"].value_or(false);
        std::optional<PoolOracle> oracle;
        if (const toml::table* o = p["oracle"].as_table()) {
            auto pool = rd.str(*o, "pool"), uc = rd.str(*o, "underlying_coin"), qc = rd.str(*o, "quote_coin");
            if (pool && uc && qc) {
                oracle = PoolOracle{*pool, *uc, *qc};
                if (!b.world.has_protocol(*pool))
                    rd.error(o, "oracle pool '" + *pool + "' must be declared before the vault");
            }
        }
        if (u)
            need_token(*u);
        if (share)
            need_token(*share);
        if (rd.issues.size() != before || !shares || !cash || !inv)
            return;
        auto v = std::make_shared<Vault>(*id, *u, *share, oracle);
        v->init(st, *shares, *cash, *inv, holder, legacy);
        b.world.add_protocol(v);
    } else if (*kind == "lending") {
        auto pool_id = rd.str(p, "pool");
        auto borrowable = rd.strings(p, "borrowable", true);
        auto [fn, fd] = rd.fraction(p, "factor", 3, 4);
        for (const auto& t : borrowable)
            need_token(t);
        const ConstantProductPool* pool = nullptr;
        if (pool_id && b.world.has_protocol(*pool_id))
            pool = dynamic_cast<const ConstantProductPool*>(&b.world.protocol(*pool_id));
        if (!pool)
            rd.error(&p, "lending market needs a constant_product 'pool' declared earlier");
        std::vector<std::pair<std::string, Amount>> reserves;
        if (const toml::table* r = p["reserves"].as_table())
            for (const auto& [k, n] : *r)
                if (auto a = rd.amount(&n, "reserve"))
                    reserves.emplace_back(std::string(k.str()), *a);
        if (rd.issues.size() != before)
            return;
        auto m = std::make_shared<LendingMarket>(*id, *pool, borrowable, fn, fd);
        m->init(st, reserves);
        b.world.add_protocol(m);
    } else {
        rd.error(p.get("kind"), "unknown protocol kind '" + *kind + "'");
    }
}

ActionSpec read_action(Reader& rd, const toml::table& a, const BenchmarkConfig& b)
{
    ActionSpec s;
    s.id = rd.str(a, "id").value_or("");
    s.protocol = rd.str(a, "protocol").value_or("");
    s.method = rd.str(a, "method").value_or("");
    s.fixed_args = rd.strings(a, "fixed");
    s.prestates = rd.strings(a, "prestates");
    s.poststates = rd.strings(a, "poststates");
    s.tokens_in = rd.strings(a, "tokens_in");
    s.tokens_out = rd.strings(a, "tokens_out");
    s.approximate = a["approximate"].value_or(true);
    const toml::array* params = a["params"].as_array();
    if (!params) {
        rd.error(&a, "action " + s.id + " needs a 'params' array");
        return s;
    }
    for (const auto& pn : *params) {
        const toml::table* p = pn.as_table();
        if (!p) {
            rd.error(&pn, "param entries must be tables");
            continue;
        }
        SymbolicParam sp;
        sp.name = rd.str(*p, "name").value_or("");
        sp.lower = rd.amount(*p, "lower", false).value_or(Amount(1));
        if (auto up = rd.amount(*p, "upper", false)) {
            sp.upper = *up;
        } else {
            // bound by adversary capital in the first consumed token
            double mult = (*p)["upper_capital"].value_or(1.0);
            if (s.tokens_in.empty() || !b.capital.count(s.tokens_in.front())) {
                rd.error(p, "param " + sp.name + " of " + s.id +
                                " needs 'upper' (no capital in a consumed token to default to)");
                continue;
            }
            sp.upper = amount_from_double(to_double(b.capital.at(s.tokens_in.front())) * mult);
        }
        s.params.push_back(std::move(sp));
    }
    return s;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : std::runtime_error(join(issues)), issues_(std::move(issues))
{
}

std::size_t BenchmarkConfig::action_index(const std::string& id) const
{
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i].id == id)
            return i;
    throw std::out_of_range("unknown action " + id);
}

DependencyMap probe_dependencies(const World& world, const std::vector<ActionSpec>& actions)
{
    std::vector<std::pair<std::string, TraceRecord>> records;
    for (const auto& a : actions)
        records.emplace_back(a.id, probe_action(a, world).record);
    return raw_dependencies(records);
}

ProfitReport replay(const BenchmarkConfig& bench, const AttackVector& vector, World* final_state)
{
    World w = bench.world;
    for (const auto& a : vector.actions) {
        const ActionSpec& spec = bench.actions.at(a.action);
        w.call(bench.adversary, spec.protocol, spec.method, spec.fixed_args, a.params);
    }
    ProfitReport r = profit(bench.world.state(), w.state(), bench.adversary);
    if (final_state)
        *final_state = std::move(w);
    return r;
}

BenchmarkConfig parse_benchmark(std::string_view text, const std::string& source_name)
{
    toml::table doc;
    try {
        doc = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        throw ConfigError({source_name + ":" + std::to_string(e.source().begin.line) + ": " +
                           std::string(e.description())});
    }
    Reader rd(source_name);
    BenchmarkConfig b;
    b.source = source_name;
    b.name = rd.str(doc, "name").value_or("");
    b.description = rd.str(doc, "description", false).value_or("");
    b.adversary = rd.str(doc, "adversary", false).value_or("attacker");

    auto reg = std::make_shared<TokenRegistry>();
    if (const toml::array* tokens = doc["tokens"].as_array()) {
        for (const auto& tn : *tokens) {
            const toml::table* t = tn.as_table();
            if (!t) {
                rd.error(&tn, "token entries must be tables");
                continue;
            }
            auto sym = rd.str(*t, "symbol");
            auto dec = (*t)["decimals"].value<std::int64_t>();
            if (!dec)
                rd.error(t, "token needs integer 'decimals'");
            std::optional<Rational> price;
            if (!t->get("price"))
                rd.error(t, "missing price entry for token " + sym.value_or("?"));
            else
                price = rd.rational(*t, "price");
            if (!sym || !dec || !price)
                continue;
            try {
                reg->add(Token{*sym, static_cast<int>(*dec)}, *price);
            } catch (const std::exception& e) {
                rd.error(t, e.what());
            }
        }
    } else {
        rd.error(&doc, "missing [[tokens]]");
    }
    b.world = World(reg);
    if (!rd.issues.empty())
        throw ConfigError(rd.issues);

    if (const toml::array* protos = doc["protocols"].as_array()) {
        for (const auto& pn : *protos) {
            if (const toml::table* p = pn.as_table()) {
                try {
                    add_protocol(rd, *p, b, reg);
                } catch (const std::exception& e) {
                    rd.error(p, e.what());
                }
            }
        }
    } else {
        rd.error(&doc, "missing [[protocols]]");
    }

    if (const toml::table* cap = doc["capital"].as_table()) {
        for (const auto& [k, n] : *cap) {
            std::string sym(k.str());
            auto a = rd.amount(&n, "capital of " + sym);
            if (!reg->contains(sym))
                rd.error(&n, "capital in unknown token '" + sym + "'");
            else if (a) {
                b.capital[sym] = *a;
                b.world.state().mint(b.adversary, sym, *a);
            }
        }
    } else {
        rd.error(&doc, "missing [capital]");
    }
    if (!rd.issues.empty())
        throw ConfigError(rd.issues);

    std::set<std::string> ids;
    if (const toml::array* acts = doc["actions"].as_array()) {
        for (const auto& an : *acts) {
            const toml::table* a = an.as_table();
            if (!a)
                continue;
            ActionSpec s = read_action(rd, *a, b);
            if (!ids.insert(s.id).second)
                rd.error(a, "duplicate action id '" + s.id + "'");
            for (const auto& issue : validate_spec(s, b.world))
                rd.error(a, to_string(issue.code) + ": " + issue.message);
            b.actions.push_back(std::move(s));
        }
    }
    if (b.actions.empty())
        rd.error(&doc, "no [[actions]] declared");

    if (const toml::table* deps = doc["dependencies"].as_table()) {
        b.raw_from_file = true;
        for (const auto& a : b.actions)
            b.raw[a.id];
        for (const auto& [k, n] : *deps) {
            std::string id(k.str());
            if (!ids.count(id))
                rd.error(&n, "dependencies for unknown action '" + id + "'");
            if (const toml::array* arr = n.as_array())
                for (const auto& e : *arr) {
                    std::string d = e.value<std::string>().value_or("");
                    if (!ids.count(d))
                        rd.error(&e, "unknown dependency '" + d + "'");
                    b.raw[id].insert(d);
                }
        }
    }

    if (const toml::table* syn = doc["synthesis"].as_table())
        apply_synthesis(rd, *syn, b.defaults);

    if (const toml::table* gt = doc["ground_truth"].as_table()) {
        AttackVector v;
        if (const toml::array* steps = (*gt)["actions"].as_array()) {
            for (const auto& sn : *steps) {
                const toml::table* s = sn.as_table();
                if (!s)
                    continue;
                auto id = rd.str(*s, "action");
                if (!id || !ids.count(*id)) {
                    rd.error(s, "ground truth references unknown action");
                    continue;
                }
                ConcreteAction ca{b.action_index(*id), rd.amounts(*s, "params")};
                if (ca.params.size() != b.actions[ca.action].params.size())
                    rd.error(s, "ground truth step " + *id + " has the wrong number of params");
                v.actions.push_back(std::move(ca));
            }
        }
        if (v.actions.empty())
            rd.error(gt, "ground truth needs a non-empty 'actions' array");
        if (rd.issues.empty()) {
            try {
                b.ground_truth_profit = replay(b, v).usd_profit;
                if (b.ground_truth_profit <= 0)
                    rd.error(gt, "ground truth replays with non-positive profit " + b.ground_truth_profit.str());
            } catch (const Revert& r) {
                rd.error(gt, std::string("ground truth reverts: ") + r.what());
            }
            v.actual_profit = b.ground_truth_profit;
            v.status = AttackStatus::validated;
            v.executed_prefix = v.actions.size();
            b.ground_truth = std::move(v);
        }
    }

    if (!rd.issues.empty())
        throw ConfigError(rd.issues);
    if (!b.raw_from_file)
        b.raw = probe_dependencies(b.world, b.actions);
    return b;
}

BenchmarkConfig load_benchmark(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({path + ": cannot open file"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_benchmark(ss.str(), path);
}

} // namespace loansynth
