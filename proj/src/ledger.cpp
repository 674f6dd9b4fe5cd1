#include "loansynth/ledger.hpp"

#include <json.hpp>

namespace loansynth {

void TokenRegistry::add(Token token, std::optional<Rational> usd_price)
{
    if (token.decimals < 0 || token.decimals > 18)
        throw std::invalid_argument("token " + token.symbol + ": decimals must be in [0, 18]");
    if (index_.count(token.symbol))
        throw std::invalid_argument("duplicate token symbol " + token.symbol);
    index_[token.symbol] = tokens_.size();
    if (usd_price)
        prices_[token.symbol] = *usd_price;
    tokens_.push_back(std::move(token));
}

bool TokenRegistry::contains(const std::string& symbol) const { return index_.count(symbol) > 0; }

const Token& TokenRegistry::token(const std::string& symbol) const
{
    auto it = index_.find(symbol);
    if (it == index_.end())
        throw std::out_of_range("unknown token " + symbol);
    return tokens_[it->second];
}

bool TokenRegistry::has_price(const std::string& symbol) const { return prices_.count(symbol) > 0; }

Rational TokenRegistry::price(const std::string& symbol) const
{
    auto it = prices_.find(symbol);
    return it == prices_.end() ? Rational(0) : it->second;
}

Rational TokenRegistry::value(const std::string& symbol, const Amount& amount) const
{
    auto it = prices_.find(symbol);
    if (it == prices_.end())
        return 0;
    Rational units(boost::multiprecision::cpp_int(amount), boost::multiprecision::cpp_int(pow10(token(symbol).decimals)));
    return units * it->second;
}

double TokenRegistry::value_double(const std::string& symbol, double amount) const
{
    auto it = prices_.find(symbol);
    if (it == prices_.end())
        return 0.0;
    return amount / std::pow(10.0, token(symbol).decimals) * to_double(it->second);
}

void AccessLog::read(const std::string& key, bool scoped)
{
    reads.insert(key);
    sender_scoped[key] = sender_scoped[key] || scoped;
}

void AccessLog::write(const std::string& key, bool scoped)
{
    writes.insert(key);
    sender_scoped[key] = sender_scoped[key] || scoped;
}

LedgerState::LedgerState(std::shared_ptr<const TokenRegistry> registry)
    : registry_(std::move(registry))
{
}

void LedgerState::note_balance(const std::string& account, const std::string& token, bool write) const
{
    if (!log_)
        return;
    std::string key = token + ".balanceOf[" + account + "]";
    bool scoped = account == log_->sender;
    if (write)
        log_->write(key, scoped);
    else
        log_->read(key, scoped);
}

Amount LedgerState::balance(const std::string& account, const std::string& token) const
{
    note_balance(account, token, false);
    auto it = balances_.find({account, token});
    return it == balances_.end() ? Amount(0) : it->second;
}

void LedgerState::set_balance(const std::string& account, const std::string& token, const Amount& amount)
{
    if (amount < 0)
        throw std::invalid_argument("negative balance for " + account + "/" + token);
    if (registry_ && !registry_->contains(token))
        throw std::out_of_range("unknown token " + token);
    note_balance(account, token, true);
    if (amount == 0)
        balances_.erase({account, token});
    else
        balances_[{account, token}] = amount;
}

void LedgerState::mint(const std::string& account, const std::string& token, const Amount& amount)
{
    if (amount < 0)
        throw std::invalid_argument("negative mint");
    set_balance(account, token, balance(account, token) + amount);
}

void LedgerState::burn(const std::string& account, const std::string& token, const Amount& amount)
{
    if (amount < 0)
        throw std::invalid_argument("negative burn");
    Amount have = balance(account, token);
    if (have < amount)
        throw Revert("burn exceeds balance of " + account + " in " + token);
    set_balance(account, token, have - amount);
}

void LedgerState::transfer(const std::string& from, const std::string& to, const std::string& token,
                           const Amount& amount)
{
    if (amount < 0)
        throw std::invalid_argument("negative transfer");
    Amount have = balance(from, token);
    if (have < amount)
        throw Revert("transfer amount exceeds balance of " + from + " in " + token);
    if (amount == 0 || from == to)
        return;
    set_balance(from, token, have - amount);
    set_balance(to, token, balance(to, token) + amount);
}

bool LedgerState::has_var(const std::string& protocol, const std::string& name) const
{
    return vars_.count({protocol, name}) > 0;
}

Amount LedgerState::var(const std::string& protocol, const std::string& name, bool sender_scoped) const
{
    auto it = vars_.find({protocol, name});
    if (it == vars_.end())
        throw std::out_of_range("unknown state variable " + protocol + "." + name);
    if (log_)
        log_->read(protocol + "." + name, sender_scoped);
    return it->second;
}

Amount LedgerState::var_or_zero(const std::string& protocol, const std::string& name, bool sender_scoped) const
{
    if (log_)
        log_->read(protocol + "." + name, sender_scoped);
    auto it = vars_.find({protocol, name});
    return it == vars_.end() ? Amount(0) : it->second;
}

void LedgerState::set_var(const std::string& protocol, const std::string& name, const Amount& value,
                          bool sender_scoped)
{
    if (log_)
        log_->write(protocol + "." + name, sender_scoped);
    vars_[{protocol, name}] = value;
}

Amount LedgerState::total_supply(const std::string& token) const
{
    Amount total = 0;
    for (const auto& [key, amount] : balances_)
        if (key.second == token)
            total += amount;
    return total;
}

std::string LedgerState::canonical_json() const
{
    nlohmann::json doc;
    doc["balances"] = nlohmann::json::object();
    doc["vars"] = nlohmann::json::object();
    for (const auto& [key, amount] : balances_)
        doc["balances"][key.first][key.second] = amount.str();
    for (const auto& [key, value] : vars_)
        doc["vars"][key.first][key.second] = value.str();
    return doc.dump();
}

std::uint64_t LedgerState::hash() const
{
    // FNV-1a over the canonical serialization.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_json()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

SnapshotHandle snapshot(const LedgerState& state) { return SnapshotHandle(state); }

LedgerState restore(const SnapshotHandle& handle) { return handle.state(); }

ProfitReport profit(const LedgerState& before, const LedgerState& after, const std::string& adversary)
{
    if (before.registry_ptr() != after.registry_ptr())
        throw std::invalid_argument("profit: states do not share a price table");
    ProfitReport report;
    report.usd_profit = 0;
    for (const auto& token : before.registry().tokens()) {
        Amount delta = after.balance(adversary, token.symbol) - before.balance(adversary, token.symbol);
        if (delta == 0)
            continue;
        report.per_token[token.symbol] = delta;
        report.usd_profit += before.registry().value(token.symbol, delta);
    }
    return report;
}

} // namespace loansynth
