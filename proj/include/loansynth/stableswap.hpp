#pragma once

#include "loansynth/protocol.hpp"

#include <span>
#include <string>
#include <vector>

namespace loansynth {

class ZeroBalance : public Revert {
public:
    using Revert::Revert;
};

class NoConvergence : public Revert {
public:
    using Revert::Revert;
};

inline constexpr int kStableSwapMaxIterations = 255;

/// Invariant D of a StableSwap pool with amplification `amp`:
///   amp*n^n*sum(x) + D = amp*n^n*D + D^(n+1) / (n^n * prod(x))
/// solved with the pool's integer Newton update (255 rounds, stop at |dD| <= 1).
Amount get_d(std::span<const Amount> xp, const Amount& amp);

/// New balance of coin j when coin i's balance becomes `x`, keeping D fixed.
Amount get_y(std::size_t i, std::size_t j, const Amount& x, std::span<const Amount> xp, const Amount& amp);

/// Curve-style pool over n coins; exchange(i, j, dx) charges fee_num/fee_den
/// of the output and leaves the fee in the pool.
class StableSwapPool : public Protocol {
public:
    StableSwapPool(std::string id, std::vector<std::string> coins, Amount amp, Amount fee_num = 4,
                   Amount fee_den = 10000);

    /// Writes balances[...] and mints custody to the pool account.
    void init(LedgerState& state, std::span<const Amount> balances) const;

    std::string kind() const override { return "stableswap"; }
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

    /// exchange on the ledger, returns dy.
    Amount exchange(LedgerState& state, const std::string& caller, std::size_t i, std::size_t j,
                    const Amount& dx) const;
    /// Quote without state change.
    Amount get_dy(const LedgerState& state, std::size_t i, std::size_t j, const Amount& dx) const;

    std::vector<Amount> balances(const LedgerState& state) const;
    std::size_t coin_index(const std::string& symbol) const;
    const std::vector<std::string>& coins() const { return coins_; }
    const Amount& amp() const { return amp_; }

    static std::string balance_var(const std::string& coin) { return "balances[" + coin + "]"; }

private:
    std::vector<std::string> coins_;
    Amount amp_;
    Amount fee_num_;
    Amount fee_den_;
};

} // namespace loansynth
