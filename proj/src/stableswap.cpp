#include "loansynth/stableswap.hpp"

#include <algorithm>

namespace loansynth {

namespace {

Amount abs_diff(const Amount& a, const Amount& b) { return a > b ? a - b : b - a; }

Amount npow(std::size_t n, std::size_t k)
{
    Amount v = 1;
    for (std::size_t i = 0; i < k; ++i)
        v *= static_cast<long long>(n);
    return v;
}

} // namespace

Amount get_d(std::span<const Amount> xp, const Amount& amp)
{
    const std::size_t n = xp.size();
    if (n < 2)
        throw std::invalid_argument("get_d: need at least two coins");
    Amount sum = 0;
    for (const auto& x : xp) {
        if (x <= 0)
            throw ZeroBalance("get_d: zero pool balance");
        sum += x;
    }
    const Amount n_coins = static_cast<long long>(n);
    const Amount ann = amp * npow(n, n);
    Amount d = sum;
    for (int it = 0; it < kStableSwapMaxIterations; ++it) {
        Amount d_p = d;
        for (const auto& x : xp)
            d_p = d_p * d / (x * n_coins);
        Amount d_prev = d;
        d = (ann * sum + d_p * n_coins) * d / ((ann - 1) * d + (n_coins + 1) * d_p);
        if (abs_diff(d, d_prev) <= 1)
            return d;
    }
    throw NoConvergence("get_d did not converge");
}

Amount get_y(std::size_t i, std::size_t j, const Amount& x, std::span<const Amount> xp, const Amount& amp)
{
    const std::size_t n = xp.size();
    if (i == j || i >= n || j >= n)
        throw std::invalid_argument("get_y: bad coin indices");
    if (x <= 0)
        throw ZeroBalance("get_y: non-positive input balance");
    const Amount d = get_d(xp, amp);
    const Amount n_coins = static_cast<long long>(n);
    const Amount ann = amp * npow(n, n);

    Amount c = d;
    Amount s = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == j)
            continue;
        const Amount& xk = k == i ? x : xp[k];
        s += xk;
        c = c * d / (xk * n_coins);
    }
    c = c * d / (ann * n_coins);
    const Amount b = s + d / ann;

    Amount y = d;
    for (int it = 0; it < kStableSwapMaxIterations; ++it) {
        Amount y_prev = y;
        Amount denom = 2 * y + b - d;
        if (denom <= 0)
            throw NoConvergence("get_y: non-positive Newton denominator");
        y = (y * y + c) / denom;
        if (y <= 0)
            throw NoConvergence("get_y: balance driven to zero");
        if (abs_diff(y, y_prev) <= 1)
            return y;
    }
    throw NoConvergence("get_y did not converge");
}

StableSwapPool::StableSwapPool(std::string id, std::vector<std::string> coins, Amount amp, Amount fee_num,
                               Amount fee_den)
    : Protocol(std::move(id)), coins_(std::move(coins)), amp_(std::move(amp)), fee_num_(std::move(fee_num)),
      fee_den_(std::move(fee_den))
{
    if (coins_.size() < 2)
        throw std::invalid_argument("stableswap pool needs at least two coins");
    if (amp_ <= 0)
        throw std::invalid_argument("stableswap amp must be positive");
    if (fee_den_ <= 0 || fee_num_ < 0 || fee_num_ >= fee_den_)
        throw std::invalid_argument("stableswap fee must be a fraction in [0, 1)");
}

void StableSwapPool::init(LedgerState& state, std::span<const Amount> balances) const
{
    if (balances.size() != coins_.size())
        throw std::invalid_argument("stableswap init: balance count mismatch");
    for (std::size_t k = 0; k < coins_.size(); ++k) {
        if (balances[k] <= 0)
            throw std::invalid_argument("stableswap init: balances must be positive");
        state.set_var(id(), balance_var(coins_[k]), balances[k]);
        state.mint(id(), coins_[k], balances[k]);
    }
}

std::vector<MethodInfo> StableSwapPool::methods() const { return {{"exchange", {"i", "j"}, {"dx"}}}; }

std::size_t StableSwapPool::coin_index(const std::string& symbol) const
{
    auto it = std::find(coins_.begin(), coins_.end(), symbol);
    if (it == coins_.end())
        throw std::invalid_argument("pool " + id() + " does not hold " + symbol);
    return static_cast<std::size_t>(it - coins_.begin());
}

std::vector<Amount> StableSwapPool::balances(const LedgerState& state) const
{
    std::vector<Amount> xp;
    xp.reserve(coins_.size());
    for (const auto& c : coins_)
        xp.push_back(state.var(id(), balance_var(c)));
    return xp;
}

bool StableSwapPool::readable(const LedgerState&, const std::string& name) const
{
    if (name == "D")
        return true;
    for (const auto& c : coins_)
        if (name == balance_var(c))
            return true;
    return false;
}

Amount StableSwapPool::read(const LedgerState& state, const std::string& name) const
{
    if (name == "D") {
        auto xp = balances(state);
        return get_d(xp, amp_);
    }
    if (!readable(state, name))
        throw std::out_of_range("unknown state " + id() + "." + name);
    return state.var(id(), name);
}

bool StableSwapPool::loadable(const std::string& name) const { return name != "D" && name.rfind("balances[", 0) == 0; }

void StableSwapPool::load(LedgerState& state, const std::string& name, const Amount& value) const
{
    if (!loadable(name))
        Protocol::load(state, name, value);
    std::string coin = name.substr(9, name.size() - 10);
    coin_index(coin);
    state.set_var(id(), name, value);
    state.set_balance(id(), coin, value < 0 ? Amount(0) : value);
}

std::vector<std::string> StableSwapPool::writes(const std::string& method,
                                                const std::vector<std::string>& fixed) const
{
    if (method != "exchange" || fixed.size() != 2)
        return {};
    return {balance_var(fixed[0]), balance_var(fixed[1])};
}

bool StableSwapPool::is_view(const std::string& name) const { return name == "D"; }

Amount StableSwapPool::get_dy(const LedgerState& state, std::size_t i, std::size_t j, const Amount& dx) const
{
    auto xp = balances(state);
    Amount y = get_y(i, j, xp[i] + dx, xp, amp_);
    Amount dy = xp[j] - y;
    dy -= dy * fee_num_ / fee_den_;
    return dy;
}

Amount StableSwapPool::exchange(LedgerState& state, const std::string& caller, std::size_t i, std::size_t j,
                                const Amount& dx) const
{
    require(dx > 0, "exchange: dx must be positive");
    require(i != j && i < coins_.size() && j < coins_.size(), "exchange: bad coin indices");
    require(state.balance(caller, coins_[i]) >= dx, "exchange: insufficient balance");
    auto xp = balances(state);
    Amount y = get_y(i, j, xp[i] + dx, xp, amp_);
    Amount dy = xp[j] - y;
    dy -= dy * fee_num_ / fee_den_;
    require(dy > 0, "exchange: zero output");
    require(dy <= xp[j], "exchange: output exceeds pool balance");

    state.set_var(id(), balance_var(coins_[i]), xp[i] + dx);
    state.set_var(id(), balance_var(coins_[j]), xp[j] - dy);
    state.transfer(caller, id(), coins_[i], dx);
    state.transfer(id(), caller, coins_[j], dy);
    return dy;
}

void StableSwapPool::call(LedgerState& state, const std::string& caller, const std::string& method,
                          const std::vector<std::string>& fixed, std::span<const Amount> params) const
{
    auto info = method_info(method);
    if (fixed.size() != info.fixed_args.size() || params.size() != info.int_params.size())
        throw std::invalid_argument(id() + "." + method + ": wrong argument count");
    exchange(state, caller, coin_index(fixed[0]), coin_index(fixed[1]), params[0]);
}

} // namespace loansynth
