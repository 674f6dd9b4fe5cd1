#include "loansynth/constant_product.hpp"

#include <algorithm>

namespace loansynth {

Amount cp_amount_out(const Amount& dx, const Amount& reserve_in, const Amount& reserve_out,
                     const Amount& fee_num, const Amount& fee_den)
{
    if (reserve_in <= 0 || reserve_out <= 0)
        throw Revert("swap: empty reserves");
    if (dx <= 0)
        throw Revert("swap: dx must be positive");
    Amount dx_after_fee = dx * (fee_den - fee_num);
    return dx_after_fee * reserve_out / (reserve_in * fee_den + dx_after_fee);
}

Amount cp_lp_minted(const Amount& amount0, const Amount& amount1, const Amount& reserve0,
                    const Amount& reserve1, const Amount& total_supply)
{
    if (amount0 <= 0 || amount1 <= 0)
        throw Revert("mint: amounts must be positive");
    if (total_supply == 0)
        return isqrt(amount0 * amount1);
    if (reserve0 <= 0 || reserve1 <= 0)
        throw Revert("mint: empty reserves");
    return std::min(amount0 * total_supply / reserve0, amount1 * total_supply / reserve1);
}

ConstantProductPool::ConstantProductPool(std::string id, std::string token0, std::string token1,
                                         std::string lp_token, Amount fee_num, Amount fee_den)
    : Protocol(std::move(id)), token0_(std::move(token0)), token1_(std::move(token1)),
      lp_token_(std::move(lp_token)), fee_num_(std::move(fee_num)), fee_den_(std::move(fee_den))
{
    if (token0_ == token1_)
        throw std::invalid_argument("constant product pool needs two distinct tokens");
    if (fee_den_ <= 0 || fee_num_ < 0 || fee_num_ >= fee_den_)
        throw std::invalid_argument("constant product fee must be a fraction in [0, 1)");
}

void ConstantProductPool::init(LedgerState& state, const Amount& reserve0, const Amount& reserve1,
                               const std::string& provider) const
{
    state.set_var(id(), "reserve0", 0);
    state.set_var(id(), "reserve1", 0);
    state.set_var(id(), "totalSupply", 0);
    state.mint(provider, token0_, reserve0);
    state.mint(provider, token1_, reserve1);
    add_liquidity(state, provider, reserve0, reserve1);
}

std::vector<MethodInfo> ConstantProductPool::methods() const
{
    return {{"swap", {"token_in"}, {"dx"}},
            {"mint", {}, {"amount0"}},
            {"add_liquidity", {}, {"amount0", "amount1"}},
            {"burn", {}, {"lp"}}};
}

bool ConstantProductPool::readable(const LedgerState&, const std::string& name) const
{
    return name == "reserve0" || name == "reserve1" || name == "totalSupply";
}

Amount ConstantProductPool::read(const LedgerState& state, const std::string& name) const
{
    if (!readable(state, name))
        throw std::out_of_range("unknown state " + id() + "." + name);
    return state.var(id(), name);
}

bool ConstantProductPool::loadable(const std::string& name) const
{
    return name == "reserve0" || name == "reserve1" || name == "totalSupply";
}

void ConstantProductPool::load(LedgerState& state, const std::string& name, const Amount& value) const
{
    if (!loadable(name))
        Protocol::load(state, name, value);
    Amount v = value < 0 ? Amount(0) : value;
    state.set_var(id(), name, v);
    if (name == "reserve0")
        state.set_balance(id(), token0_, v);
    else if (name == "reserve1")
        state.set_balance(id(), token1_, v);
}

std::vector<std::string> ConstantProductPool::writes(const std::string& method,
                                                     const std::vector<std::string>&) const
{
    if (method == "swap")
        return {"reserve0", "reserve1"};
    if (method == "mint" || method == "add_liquidity" || method == "burn")
        return {"reserve0", "reserve1", "totalSupply"};
    return {};
}

Amount ConstantProductPool::swap(LedgerState& state, const std::string& caller, const std::string& token_in,
                                 const Amount& dx) const
{
    require(token_in == token0_ || token_in == token1_, "swap: token not in pair");
    const bool zero_in = token_in == token0_;
    const std::string& token_out = zero_in ? token1_ : token0_;
    Amount r0 = state.var(id(), "reserve0");
    Amount r1 = state.var(id(), "reserve1");
    const Amount& r_in = zero_in ? r0 : r1;
    const Amount& r_out = zero_in ? r1 : r0;
    Amount dy = cp_amount_out(dx, r_in, r_out, fee_num_, fee_den_);
    require(dy > 0, "swap: zero output");
    state.transfer(caller, id(), token_in, dx);
    state.transfer(id(), caller, token_out, dy);
    state.set_var(id(), "reserve0", zero_in ? r0 + dx : r0 - dy);
    state.set_var(id(), "reserve1", zero_in ? r1 - dy : r1 + dx);
    return dy;
}

Amount ConstantProductPool::add_liquidity(LedgerState& state, const std::string& caller, const Amount& amount0,
                                          const Amount& amount1) const
{
    Amount r0 = state.var(id(), "reserve0");
    Amount r1 = state.var(id(), "reserve1");
    Amount supply = state.var(id(), "totalSupply");
    Amount lp = cp_lp_minted(amount0, amount1, r0, r1, supply);
    require(lp > 0, "mint: zero liquidity");
    state.transfer(caller, id(), token0_, amount0);
    state.transfer(caller, id(), token1_, amount1);
    state.mint(caller, lp_token_, lp);
    state.set_var(id(), "reserve0", r0 + amount0);
    state.set_var(id(), "reserve1", r1 + amount1);
    state.set_var(id(), "totalSupply", supply + lp);
    return lp;
}

Amount ConstantProductPool::mint(LedgerState& state, const std::string& caller, const Amount& amount0) const
{
    Amount r0 = state.var(id(), "reserve0");
    Amount r1 = state.var(id(), "reserve1");
    require(r0 > 0 && r1 > 0, "mint: pool is empty, use add_liquidity");
    require(amount0 > 0, "mint: amount must be positive");
    Amount amount1 = (amount0 * r1 + r0 - 1) / r0;
    return add_liquidity(state, caller, amount0, amount1);
}

void ConstantProductPool::burn(LedgerState& state, const std::string& caller, const Amount& lp) const
{
    require(lp > 0, "burn: amount must be positive");
    Amount r0 = state.var(id(), "reserve0");
    Amount r1 = state.var(id(), "reserve1");
    Amount supply = state.var(id(), "totalSupply");
    require(supply > 0, "burn: no liquidity");
    state.burn(caller, lp_token_, lp);
    Amount out0 = lp * r0 / supply;
    Amount out1 = lp * r1 / supply;
    require(out0 > 0 && out1 > 0, "burn: zero output");
    state.transfer(id(), caller, token0_, out0);
    state.transfer(id(), caller, token1_, out1);
    state.set_var(id(), "reserve0", r0 - out0);
    state.set_var(id(), "reserve1", r1 - out1);
    state.set_var(id(), "totalSupply", supply - lp);
}

void ConstantProductPool::call(LedgerState& state, const std::string& caller, const std::string& method,
                               const std::vector<std::string>& fixed, std::span<const Amount> params) const
{
    auto info = method_info(method);
    if (fixed.size() != info.fixed_args.size() || params.size() != info.int_params.size())
        throw std::invalid_argument(id() + "." + method + ": wrong argument count");
    if (method == "swap")
        swap(state, caller, fixed[0], params[0]);
    else if (method == "mint")
        mint(state, caller, params[0]);
    else if (method == "add_liquidity")
        add_liquidity(state, caller, params[0], params[1]);
    else
        burn(state, caller, params[0]);
}

} // namespace loansynth
