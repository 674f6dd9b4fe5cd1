#pragma once

#include "loansynth/constant_product.hpp"

namespace loansynth {

/// Collateralized lending against LP tokens of a constant-product pool.
///
/// The LP price is (reserve0*p0 + reserve1*p1) / totalSupply with p0, p1 the
/// registry's fixed token prices. Reserves come straight from the pool, so a
/// large swap into the pool inflates the collateral value.
///
/// Storage: collateral[<account>], debt[<account>][<token>] (sender-keyed).
/// Views:   reserves[<token>] (ledger balance of the market account),
///          headroom[<account>] (borrow capacity left, micro-USD).
class LendingMarket : public Protocol {
public:
    LendingMarket(std::string id, const ConstantProductPool& lp_pool, std::vector<std::string> borrowable,
                  Amount factor_num = 3, Amount factor_den = 4);

    void init(LedgerState& state, const std::vector<std::pair<std::string, Amount>>& reserves) const;

    std::string kind() const override { return "lending"; }
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

    void provide_collateral(LedgerState& state, const std::string& account, const Amount& lp_amount) const;
    void borrow(LedgerState& state, const std::string& account, const std::string& token,
                const Amount& amount) const;

    /// USD value of one LP base unit at current pool reserves.
    Rational lp_price(const LedgerState& state) const;
    Rational collateral_value(const LedgerState& state, const std::string& account) const;
    Rational debt_value(const LedgerState& state, const std::string& account) const;
    /// Remaining borrow capacity in micro-USD, floored; negative when under water.
    Amount headroom(const LedgerState& state, const std::string& account) const;

private:
    std::string lp_pool_;
    std::string lp_token_;
    std::string token0_;
    std::string token1_;
    std::vector<std::string> borrowable_;
    Amount factor_num_;
    Amount factor_den_;
};

} // namespace loansynth
