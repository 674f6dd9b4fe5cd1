#include "loansynth/lending.hpp"

#include <algorithm>

namespace loansynth {

namespace {

std::string bracket_arg(const std::string& name, const std::string& prefix)
{
    if (name.rfind(prefix + "[", 0) != 0 || name.back() != ']')
        return {};
    return name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
}

std::string collateral_key(const std::string& account) { return "collateral[" + account + "]"; }

std::string debt_key(const std::string& account, const std::string& token)
{
    return "debt[" + account + "][" + token + "]";
}

} // namespace

LendingMarket::LendingMarket(std::string id, const ConstantProductPool& lp_pool, std::vector<std::string> borrowable,
                             Amount factor_num, Amount factor_den)
    : Protocol(std::move(id)), lp_pool_(lp_pool.id()), lp_token_(lp_pool.lp_token()), token0_(lp_pool.token0()),
      token1_(lp_pool.token1()), borrowable_(std::move(borrowable)), factor_num_(std::move(factor_num)),
      factor_den_(std::move(factor_den))
{
    if (factor_den_ <= 0 || factor_num_ < 0 || factor_num_ > factor_den_)
        throw std::invalid_argument("collateral factor must be a fraction in [0, 1]");
}

void LendingMarket::init(LedgerState& state, const std::vector<std::pair<std::string, Amount>>& reserves) const
{
    for (const auto& [token, amount] : reserves) {
        if (std::find(borrowable_.begin(), borrowable_.end(), token) == borrowable_.end())
            throw std::invalid_argument("market " + id() + " cannot lend " + token);
        state.mint(id(), token, amount);
    }
}

std::vector<MethodInfo> LendingMarket::methods() const
{
    return {{"provideCollateral", {}, {"lpAmount"}}, {"borrow", {"token"}, {"amount"}}};
}

bool LendingMarket::readable(const LedgerState&, const std::string& name) const
{
    if (!bracket_arg(name, "collateral").empty() || !bracket_arg(name, "headroom").empty())
        return true;
    std::string token = bracket_arg(name, "reserves");
    if (!token.empty())
        return std::find(borrowable_.begin(), borrowable_.end(), token) != borrowable_.end();
    return name.rfind("debt[", 0) == 0 && name.back() == ']';
}

Amount LendingMarket::read(const LedgerState& state, const std::string& name) const
{
    if (!readable(state, name))
        throw std::out_of_range("unknown state " + id() + "." + name);
    std::string token = bracket_arg(name, "reserves");
    if (!token.empty())
        return state.balance(id(), token);
    std::string account = bracket_arg(name, "headroom");
    if (!account.empty())
        return headroom(state, account);
    return state.var_or_zero(id(), name, true);
}

bool LendingMarket::loadable(const std::string& name) const
{
    return name.rfind("reserves[", 0) == 0 || name.rfind("collateral[", 0) == 0 || name.rfind("debt[", 0) == 0;
}

void LendingMarket::load(LedgerState& state, const std::string& name, const Amount& value) const
{
    if (!loadable(name))
        Protocol::load(state, name, value);
    Amount v = value < 0 ? Amount(0) : value;
    std::string token = bracket_arg(name, "reserves");
    if (!token.empty())
        state.set_balance(id(), token, v);
    else
        state.set_var(id(), name, v, true);
}

std::vector<std::string> LendingMarket::writes(const std::string& method,
                                               const std::vector<std::string>& fixed) const
{
    if (method == "provideCollateral")
        return {"collateral[*]"};
    if (method == "borrow" && fixed.size() == 1)
        return {"reserves[" + fixed[0] + "]", "debt[*]"};
    return {};
}

bool LendingMarket::is_view(const std::string& name) const
{
    return name.rfind("reserves[", 0) == 0 || name.rfind("headroom[", 0) == 0;
}

Amount LendingMarket::headroom(const LedgerState& state, const std::string& account) const
{
    Rational limit = collateral_value(state, account) *
                     Rational(boost::multiprecision::cpp_int(factor_num_), boost::multiprecision::cpp_int(factor_den_));
    Rational micro = (limit - debt_value(state, account)) * 1000000;
    boost::multiprecision::cpp_int q = boost::multiprecision::numerator(micro) / boost::multiprecision::denominator(micro);
    if (micro < 0 && Rational(q) != micro)
        q -= 1;
    return Amount(q);
}

Rational LendingMarket::lp_price(const LedgerState& state) const
{
    Amount supply = state.var(lp_pool_, "totalSupply");
    if (supply <= 0)
        return 0;
    const auto& reg = state.registry();
    Rational pool_value = reg.value(token0_, state.var(lp_pool_, "reserve0")) +
                          reg.value(token1_, state.var(lp_pool_, "reserve1"));
    return pool_value / Rational(boost::multiprecision::cpp_int(supply));
}

Rational LendingMarket::collateral_value(const LedgerState& state, const std::string& account) const
{
    Amount lp = state.var_or_zero(id(), collateral_key(account), true);
    return Rational(boost::multiprecision::cpp_int(lp)) * lp_price(state);
}

Rational LendingMarket::debt_value(const LedgerState& state, const std::string& account) const
{
    Rational total = 0;
    for (const auto& token : borrowable_)
        total += state.registry().value(token, state.var_or_zero(id(), debt_key(account, token), true));
    return total;
}

void LendingMarket::provide_collateral(LedgerState& state, const std::string& account, const Amount& lp_amount) const
{
    require(lp_amount > 0, "provideCollateral: amount must be positive");
    state.transfer(account, id(), lp_token_, lp_amount);
    state.set_var(id(), collateral_key(account), state.var_or_zero(id(), collateral_key(account), true) + lp_amount,
                  true);
}

void LendingMarket::borrow(LedgerState& state, const std::string& account, const std::string& token,
                           const Amount& amount) const
{
    require(amount > 0, "borrow: amount must be positive");
    require(std::find(borrowable_.begin(), borrowable_.end(), token) != borrowable_.end(),
            "borrow: token not lendable");
    require(state.balance(id(), token) >= amount, "borrow: insufficient market reserves");
    Amount debt = state.var_or_zero(id(), debt_key(account, token), true);
    Rational new_debt_value = debt_value(state, account) + state.registry().value(token, amount);
    Rational limit = collateral_value(state, account) *
                     Rational(boost::multiprecision::cpp_int(factor_num_), boost::multiprecision::cpp_int(factor_den_));
    require(new_debt_value <= limit, "borrow: exceeds borrow limit");
    state.set_var(id(), debt_key(account, token), debt + amount, true);
    state.transfer(id(), account, token, amount);
}

void LendingMarket::call(LedgerState& state, const std::string& caller, const std::string& method,
                         const std::vector<std::string>& fixed, std::span<const Amount> params) const
{
    auto info = method_info(method);
    if (fixed.size() != info.fixed_args.size() || params.size() != info.int_params.size())
        throw std::invalid_argument(id() + "." + method + ": wrong argument count");
    if (method == "provideCollateral")
        provide_collateral(state, caller, params[0]);
    else
        borrow(state, caller, fixed[0], params[0]);
}

} // namespace loansynth
