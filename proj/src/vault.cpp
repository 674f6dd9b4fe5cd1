#include "loansynth/vault.hpp"

#include "loansynth/stableswap.hpp"

namespace loansynth {

Vault::Vault(std::string id, std::string underlying, std::string share_token, std::optional<PoolOracle> oracle)
    : Protocol(std::move(id)), underlying_(std::move(underlying)), share_token_(std::move(share_token)),
      oracle_(std::move(oracle))
{
}

void Vault::init(LedgerState& state, const Amount& shares, const Amount& cash, const Amount& invested,
                 const std::string& holder, bool legacy_enabled) const
{
    if (shares < 0 || cash < 0 || invested < 0)
        throw std::invalid_argument("vault init: negative amounts");
    state.set_var(id(), "totalSupply", shares);
    state.set_var(id(), "investedPrincipal", invested);
    state.set_var(id(), "legacyEnabled", legacy_enabled ? 1 : 0);
    state.mint(holder, share_token_, shares);
    state.mint(id(), underlying_, cash);
}

std::vector<MethodInfo> Vault::methods() const
{
    return {{"deposit", {}, {"amount"}},
            {"withdraw", {}, {"numberOfShares"}},
            {"depositLegacy", {}, {"amount"}},
            {"setReferrer", {"referrer"}, {}}};
}

Amount Vault::underlying_in_vault(const LedgerState& state) const { return state.balance(id(), underlying_); }

Amount oracle_invested_balance(const Vault& vault, const LedgerState& state)
{
    Amount principal = state.var(vault.id(), "investedPrincipal");
    const auto& oracle = vault.oracle();
    if (!oracle)
        return principal;
    Amount x_u = state.var(oracle->pool, StableSwapPool::balance_var(oracle->underlying_coin));
    Amount x_q = state.var(oracle->pool, StableSwapPool::balance_var(oracle->quote_coin));
    if (x_q <= 0)
        throw Revert("oracle: empty pool");
    return principal * x_u / x_q;
}

Amount Vault::invested_balance(const LedgerState& state) const { return oracle_invested_balance(*this, state); }

Amount Vault::balance_with_investment(const LedgerState& state) const
{
    return underlying_in_vault(state) + invested_balance(state);
}

bool Vault::readable(const LedgerState&, const std::string& name) const
{
    return name == "totalSupply" || name == "investedPrincipal" || name == "legacyEnabled" ||
           name == "underlyingBalanceInVault" || name == "investedUnderlyingBalance" ||
           name == "underlyingBalanceWithInvestment";
}

Amount Vault::read(const LedgerState& state, const std::string& name) const
{
    if (name == "underlyingBalanceInVault")
        return underlying_in_vault(state);
    if (name == "investedUnderlyingBalance")
        return invested_balance(state);
    if (name == "underlyingBalanceWithInvestment")
        return balance_with_investment(state);
    if (!readable(state, name))
        throw std::out_of_range("unknown state " + id() + "." + name);
    return state.var(id(), name);
}

bool Vault::loadable(const std::string& name) const
{
    return name == "totalSupply" || name == "investedPrincipal" || name == "underlyingBalanceInVault" ||
           (name == "investedUnderlyingBalance" && !oracle_);
}

void Vault::load(LedgerState& state, const std::string& name, const Amount& value) const
{
    if (!loadable(name))
        Protocol::load(state, name, value);
    Amount v = value < 0 ? Amount(0) : value;
    if (name == "underlyingBalanceInVault")
        state.set_balance(id(), underlying_, v);
    else if (name == "investedUnderlyingBalance")
        state.set_var(id(), "investedPrincipal", v);
    else
        state.set_var(id(), name, v);
}

std::vector<std::string> Vault::writes(const std::string& method, const std::vector<std::string>&) const
{
    if (method == "deposit" || method == "withdraw" || method == "depositLegacy")
        return {"totalSupply", "underlyingBalanceInVault", "underlyingBalanceWithInvestment"};
    return {};
}

bool Vault::is_view(const std::string& name) const
{
    return name == "underlyingBalanceInVault" || name == "investedUnderlyingBalance" ||
           name == "underlyingBalanceWithInvestment";
}

Amount Vault::deposit(LedgerState& state, const std::string& caller, const Amount& amount) const
{
    require(amount > 0, "Cannot deposit 0");
    Amount supply = state.var(id(), "totalSupply");
    Amount to_mint = supply == 0 ? amount : amount * supply / balance_with_investment(state);
    state.mint(caller, share_token_, to_mint);
    state.set_var(id(), "totalSupply", supply + to_mint);
    state.transfer(caller, id(), underlying_, amount);
    return to_mint;
}

Amount Vault::withdraw(LedgerState& state, const std::string& caller, const Amount& shares) const
{
    Amount supply = state.var(id(), "totalSupply");
    require(supply > 0, "Vault has no shares");
    require(shares > 0, "numberOfShares must be greater than 0");
    require(shares <= supply, "withdraw exceeds share supply");
    state.burn(caller, share_token_, shares);
    state.set_var(id(), "totalSupply", supply - shares);
    Amount out = balance_with_investment(state) * shares / supply;
    Amount cash = underlying_in_vault(state);
    if (out > cash)
        out = cash;
    state.transfer(id(), caller, underlying_, out);
    return out;
}

void Vault::call(LedgerState& state, const std::string& caller, const std::string& method,
                 const std::vector<std::string>& fixed, std::span<const Amount> params) const
{
    auto info = method_info(method);
    if (fixed.size() != info.fixed_args.size() || params.size() != info.int_params.size())
        throw std::invalid_argument(id() + "." + method + ": wrong argument count");
    if (method == "deposit") {
        deposit(state, caller, params[0]);
    } else if (method == "withdraw") {
        withdraw(state, caller, params[0]);
    } else if (method == "depositLegacy") {
        require(state.var(id(), "legacyEnabled") != 0, "depositLegacy: disabled");
        deposit(state, caller, params[0]);
    } else {
        state.set_var(id(), "referrer[" + caller + "]", 1, true);
    }
}

} // namespace loansynth
