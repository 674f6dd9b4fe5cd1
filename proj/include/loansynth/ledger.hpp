#pragma once

#include "loansynth/numeric.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loansynth {

/// A token known to the world. Amounts of it are kept in base units of
/// 10^-decimals whole tokens.
struct Token {
    std::string symbol;
    int decimals = 18;
};

/// Immutable for the duration of a run; shared between all ledger copies.
class TokenRegistry {
public:
    void add(Token token, std::optional<Rational> usd_price = std::nullopt);

    bool contains(const std::string& symbol) const;
    const Token& token(const std::string& symbol) const;
    bool has_price(const std::string& symbol) const;
    /// USD per whole token; unlisted tokens are worth 0.
    Rational price(const std::string& symbol) const;
    /// USD value of `amount` base units.
    Rational value(const std::string& symbol, const Amount& amount) const;
    double value_double(const std::string& symbol, double amount) const;

    const std::vector<Token>& tokens() const { return tokens_; }

private:
    std::vector<Token> tokens_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, Rational> prices_;
};

/// Transaction revert. Recoverable: callers roll back through a snapshot.
class Revert : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Storage read/write recorder used by the trace miner. Keys are
/// "<protocol>.<var>" for member variables and "<token>.balanceOf[<account>]"
/// for token balances.
struct AccessLog {
    std::string sender;
    std::set<std::string> reads;
    std::set<std::string> writes;
    std::map<std::string, bool> sender_scoped;

    void read(const std::string& key, bool scoped);
    void write(const std::string& key, bool scoped);
};

class LedgerState {
public:
    LedgerState() = default;
    explicit LedgerState(std::shared_ptr<const TokenRegistry> registry);

    const TokenRegistry& registry() const { return *registry_; }
    const std::shared_ptr<const TokenRegistry>& registry_ptr() const { return registry_; }

    Amount balance(const std::string& account, const std::string& token) const;
    void set_balance(const std::string& account, const std::string& token, const Amount& amount);
    void mint(const std::string& account, const std::string& token, const Amount& amount);
    /// Reverts when the account holds less than `amount`.
    void burn(const std::string& account, const std::string& token, const Amount& amount);
    /// Reverts when `from` holds less than `amount`; total supply is conserved.
    void transfer(const std::string& from, const std::string& to, const std::string& token,
                  const Amount& amount);

    bool has_var(const std::string& protocol, const std::string& name) const;
    /// Throws std::out_of_range for an unknown variable.
    /// `sender_scoped` marks msg.sender-keyed storage in the access log.
    Amount var(const std::string& protocol, const std::string& name, bool sender_scoped = false) const;
    /// Unknown variables read as zero (mapping semantics).
    Amount var_or_zero(const std::string& protocol, const std::string& name, bool sender_scoped = false) const;
    void set_var(const std::string& protocol, const std::string& name, const Amount& value,
                 bool sender_scoped = false);

    using BalanceMap = std::map<std::pair<std::string, std::string>, Amount>;
    using VarMap = std::map<std::pair<std::string, std::string>, Amount>;
    const BalanceMap& balances() const { return balances_; }
    const VarMap& vars() const { return vars_; }

    /// Sum of one token over all accounts.
    Amount total_supply(const std::string& token) const;

    /// Sorted-key JSON with base-10 integer strings.
    std::string canonical_json() const;
    std::uint64_t hash() const;

    /// Storage access recording; the log is not part of the state.
    void attach_log(AccessLog* log) const { log_ = log; }
    AccessLog* log() const { return log_; }

    friend bool operator==(const LedgerState& a, const LedgerState& b)
    {
        return a.registry_ == b.registry_ && a.balances_ == b.balances_ && a.vars_ == b.vars_;
    }

private:
    void note_balance(const std::string& account, const std::string& token, bool write) const;

    std::shared_ptr<const TokenRegistry> registry_;
    BalanceMap balances_;
    VarMap vars_;
    mutable AccessLog* log_ = nullptr;
};

/// Opaque saved copy of a ledger.
class SnapshotHandle {
public:
    explicit SnapshotHandle(LedgerState state) : state_(std::move(state)) {}
    const LedgerState& state() const { return state_; }

private:
    LedgerState state_;
};

SnapshotHandle snapshot(const LedgerState& state);
LedgerState restore(const SnapshotHandle& handle);

struct ProfitReport {
    std::map<std::string, Amount> per_token;
    Rational usd_profit;
};

/// Balance(after) - Balance(before) for `adversary` at the registry's
/// constant prices. Both states must share one registry.
ProfitReport profit(const LedgerState& before, const LedgerState& after,
                    const std::string& adversary);

} // namespace loansynth
