#pragma once

#include "loansynth/protocol.hpp"

namespace loansynth {

/// Output of a constant-product swap with fee fee_num/fee_den on the input.
Amount cp_amount_out(const Amount& dx, const Amount& reserve_in, const Amount& reserve_out,
                     const Amount& fee_num, const Amount& fee_den);

/// LP tokens minted for depositing (amount0, amount1); first mint is
/// isqrt(amount0 * amount1), afterwards the pro-rata minimum.
Amount cp_lp_minted(const Amount& amount0, const Amount& amount1, const Amount& reserve0,
                    const Amount& reserve1, const Amount& total_supply);

/// Uniswap-style pair. Methods:
///   swap(token_in; dx)
///   mint(; amount0)            token1 side computed at the current ratio, rounded up
///   add_liquidity(; amount0, amount1)
///   burn(; lp)
class ConstantProductPool : public Protocol {
public:
    ConstantProductPool(std::string id, std::string token0, std::string token1, std::string lp_token,
                        Amount fee_num = 3, Amount fee_den = 1000);

    /// Seeds reserves held by `provider` (LP minted to it).
    void init(LedgerState& state, const Amount& reserve0, const Amount& reserve1,
              const std::string& provider) const;

    std::string kind() const override { return "constant_product"; }
    std::vector<MethodInfo> methods() const override;
    bool readable(const LedgerState& state, const std::string& name) const override;
    Amount read(const LedgerState& state, const std::string& name) const override;
    bool loadable(const std::string& name) const override;
    void load(LedgerState& state, const std::string& name, const Amount& value) const override;
    std::vector<std::string> writes(const std::string& method,
                                    const std::vector<std::string>& fixed) const override;
    bool is_view(const std::string&) const override { return false; }
    void call(LedgerState& state, const std::string& caller, const std::string& method,
              const std::vector<std::string>& fixed, std::span<const Amount> params) const override;

    Amount swap(LedgerState& state, const std::string& caller, const std::string& token_in, const Amount& dx) const;
    Amount add_liquidity(LedgerState& state, const std::string& caller, const Amount& amount0,
                         const Amount& amount1) const;
    Amount mint(LedgerState& state, const std::string& caller, const Amount& amount0) const;
    void burn(LedgerState& state, const std::string& caller, const Amount& lp) const;

    const std::string& token0() const { return token0_; }
    const std::string& token1() const { return token1_; }
    const std::string& lp_token() const { return lp_token_; }

private:
    std::string token0_;
    std::string token1_;
    std::string lp_token_;
    Amount fee_num_;
    Amount fee_den_;
};

} // namespace loansynth
