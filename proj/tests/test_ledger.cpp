#include "loansynth/ledger.hpp"
#include "loansynth/stableswap.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace loansynth;

namespace {

std::shared_ptr<TokenRegistry> registry()
{
    auto r = std::make_shared<TokenRegistry>();
    r->add({"USDC", 6}, Rational(1));
    r->add({"WETH", 18}, Rational(2000));
    r->add({"LP", 18});
    return r;
}

} // namespace

TEST(Amounts, ParsesScientificShorthand)
{
    EXPECT_EQ(parse_amount("2900030e18"), Amount(2900030) * pow10(18));
    EXPECT_EQ(parse_amount("1.5e6"), Amount(1500000));
    EXPECT_EQ(parse_amount("007"), Amount(7));
    EXPECT_THROW(parse_amount("1.25e1"), std::invalid_argument);
    EXPECT_THROW(parse_amount("12x"), std::invalid_argument);
}

TEST(Amounts, OverflowIsReported)
{
    Amount big = pow10(76);
    EXPECT_THROW(big * 100, std::overflow_error);
}

TEST(Registry, ValuesUseDecimalsAndPrice)
{
    auto r = registry();
    EXPECT_EQ(r->value("WETH", pow10(18) * 3), Rational(6000));
    EXPECT_EQ(r->value("USDC", Amount(2500000)), Rational(5, 2));
    EXPECT_EQ(r->value("LP", pow10(20)), Rational(0));
    EXPECT_FALSE(r->has_price("LP"));
}

TEST(Ledger, TransferConservesSupply)
{
    LedgerState s(registry());
    s.mint("a", "USDC", 1000);
    s.mint("b", "USDC", 5);
    s.transfer("a", "b", "USDC", 400);
    EXPECT_EQ(s.balance("a", "USDC"), Amount(600));
    EXPECT_EQ(s.balance("b", "USDC"), Amount(405));
    EXPECT_EQ(s.total_supply("USDC"), Amount(1005));
}

TEST(Ledger, OverdraftRevertsWithoutSideEffects)
{
    LedgerState s(registry());
    s.mint("a", "USDC", 10);
    LedgerState before = s;
    EXPECT_THROW(s.transfer("a", "b", "USDC", 11), Revert);
    EXPECT_THROW(s.burn("a", "USDC", 11), Revert);
    EXPECT_EQ(s, before);
}

TEST(Ledger, HashDependsOnContentNotInsertionOrder)
{
    auto r = registry();
    LedgerState x(r), y(r);
    x.mint("a", "USDC", 1);
    x.mint("b", "WETH", 2);
    x.set_var("p", "k", 3);
    y.set_var("p", "k", 3);
    y.mint("b", "WETH", 2);
    y.mint("a", "USDC", 1);
    EXPECT_EQ(x.canonical_json(), y.canonical_json());
    EXPECT_EQ(x.hash(), y.hash());
    y.mint("a", "USDC", 1);
    EXPECT_NE(x.hash(), y.hash());
}

TEST(Ledger, ZeroBalancesDoNotChangeHash)
{
    auto r = registry();
    LedgerState x(r), y(r);
    x.mint("a", "USDC", 5);
    y.mint("a", "USDC", 5);
    y.mint("c", "USDC", 3);
    y.burn("c", "USDC", 3);
    EXPECT_EQ(x.hash(), y.hash());
}

TEST(Ledger, SnapshotRestoreRoundTrip)
{
    LedgerState s(registry());
    s.mint("a", "USDC", 77);
    s.set_var("p", "x", 9);
    auto snap = snapshot(s);
    std::uint64_t h = s.hash();
    s.transfer("a", "b", "USDC", 70);
    s.set_var("p", "x", 1);
    LedgerState back = restore(snap);
    EXPECT_EQ(back.hash(), h);
    EXPECT_EQ(back.balance("a", "USDC"), Amount(77));
    EXPECT_EQ(back.var("p", "x"), Amount(9));
}

TEST(Ledger, ProfitIsAntisymmetric)
{
    auto r = registry();
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long long> amt(0, 1'000'000'000);
    for (int k = 0; k < 50; ++k) {
        LedgerState a(r), b(r);
        for (const char* t : {"USDC", "WETH", "LP"}) {
            a.mint("adv", t, amt(rng));
            b.mint("adv", t, amt(rng));
        }
        auto ab = profit(a, b, "adv");
        auto ba = profit(b, a, "adv");
        EXPECT_EQ(ab.usd_profit, -ba.usd_profit);
        for (const auto& [t, d] : ab.per_token)
            EXPECT_EQ(d, -ba.per_token.at(t));
        EXPECT_EQ(profit(a, a, "adv").usd_profit, Rational(0));
    }
}

TEST(Ledger, ProfitCountsOnlyTheAdversary)
{
    LedgerState a(registry());
    a.mint("adv", "WETH", pow10(18));
    LedgerState b = a;
    b.mint("someone", "WETH", pow10(18));
    b.transfer("adv", "someone", "WETH", pow10(17));
    EXPECT_EQ(profit(a, b, "adv").usd_profit, Rational(-200));
}

TEST(World, CallIsAtomicOnRevert)
{
    auto r = std::make_shared<TokenRegistry>();
    r->add({"A", 6}, Rational(1));
    r->add({"B", 6}, Rational(1));
    World w(r);
    auto pool = std::make_shared<StableSwapPool>("pool", std::vector<std::string>{"A", "B"}, Amount(100));
    std::vector<Amount> bal{Amount(1'000'000'000), Amount(1'000'000'000)};
    pool->init(w.state(), bal);
    w.add_protocol(pool);
    w.state().mint("adv", "A", 100);
    auto before = w.state().hash();
    std::vector<Amount> dx{Amount(101)};
    EXPECT_THROW(w.call("adv", "pool", "exchange", {"A", "B"}, dx), Revert);
    EXPECT_EQ(w.state().hash(), before);
    dx[0] = 100;
    w.call("adv", "pool", "exchange", {"A", "B"}, dx);
    EXPECT_NE(w.state().hash(), before);
}

TEST(World, StateRefsResolve)
{
    auto r = std::make_shared<TokenRegistry>();
    r->add({"A", 6}, Rational(1));
    r->add({"B", 6}, Rational(1));
    World w(r);
    auto pool = std::make_shared<StableSwapPool>("pool", std::vector<std::string>{"A", "B"}, Amount(100));
    std::vector<Amount> bal{Amount(5'000'000), Amount(5'000'000)};
    pool->init(w.state(), bal);
    w.add_protocol(pool);
    EXPECT_EQ(w.read("pool.balances[A]"), Amount(5'000'000));
    EXPECT_EQ(w.read("pool.D"), Amount(10'000'000));
    EXPECT_TRUE(w.is_view("pool.D"));
    EXPECT_FALSE(w.readable("pool.nothing"));
    EXPECT_FALSE(w.readable("nopool.x"));
    EXPECT_EQ(split_ref("a.b.c"), (std::pair<std::string, std::string>{"a", "b.c"}));
}
