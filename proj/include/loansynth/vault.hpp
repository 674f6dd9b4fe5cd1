#pragma once

#include "loansynth/protocol.hpp"

#include <optional>

namespace loansynth {

/// Link from a vault's invested balance to a StableSwap pool's balance ratio.
struct PoolOracle {
    std::string pool;
    std::string underlying_coin; // the vault's underlying, as named in the pool
    std::string quote_coin;      // coin the strategy position is denominated in
};

/// Yield vault with the deposit/withdraw share arithmetic of Harvest's Vault.
///
/// Storage: totalSupply, investedPrincipal, legacyEnabled, referrer[<account>].
/// Views:   underlyingBalanceInVault   (ledger balance of the vault account)
///          investedUnderlyingBalance  (principal, revalued through the oracle)
///          underlyingBalanceWithInvestment
///
/// With an oracle the invested position is worth principal * x_underlying /
/// x_quote at the linked pool's current balances. That valuation can be moved
/// by anyone trading on the pool; it is the manipulable price source.
class Vault : public Protocol {
public:
    Vault(std::string id, std::string underlying, std::string share_token,
          std::optional<PoolOracle> oracle = std::nullopt);

    /// Initial position: `shares` held by `holder`, `cash` underlying in the
    /// vault, `invested` principal deployed to the strategy.
    void init(LedgerState& state, const Amount& shares, const Amount& cash, const Amount& invested,
              const std::string& holder, bool legacy_enabled = false) const;

    std::string kind() const override { return "vault"; }
    std::vector<MethodInfo> methods() const override;
    bool readable(const LedgerState& state, const std::string& name) const override;
    Amount read(const LedgerState& state, const std::string& name) const override;
    bool loadable(const std::string& name) const override;
    void load(LedgerState& state, const std::string& name, const Amount& value) const override;
    std::vector<std::string> writes(const std::string& method,
                                    const std::vector<std::string>& fixed) const override;
    bool is_view(const std::string& name) const override;
    void call(LedgerState& state, const std::string& caller, const std::string& method,
              const std::vector<std::string>& fixed, std::span<const Amount> params) const override;

    Amount deposit(LedgerState& state, const std::string& caller, const Amount& amount) const;
    Amount withdraw(LedgerState& state, const std::string& caller, const Amount& shares) const;

    Amount underlying_in_vault(const LedgerState& state) const;
    Amount invested_balance(const LedgerState& state) const;
    Amount balance_with_investment(const LedgerState& state) const;

    const std::string& underlying() const { return underlying_; }
    const std::string& share_token() const { return share_token_; }
    const std::optional<PoolOracle>& oracle() const { return oracle_; }

private:
    std::string underlying_;
    std::string share_token_;
    std::optional<PoolOracle> oracle_;
};

/// Invested balance valued through the linked pool ratio (see Vault).
Amount oracle_invested_balance(const Vault& vault, const LedgerState& state);

} // namespace loansynth
