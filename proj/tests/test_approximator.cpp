#include "loansynth/approximator.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace loansynth;
using testing_support::harvest;

namespace {

// Dense least squares through the normal equations, Gaussian elimination with
// partial pivoting in long double. Features are given per row.
std::vector<long double> normal_equations(const std::vector<std::vector<long double>>& f, const std::vector<double>& y)
{
    const std::size_t m = f.front().size();
    std::vector<std::vector<long double>> a(m, std::vector<long double>(m + 1, 0.0L));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c)
                a[r][c] += f[i][r] * f[i][c];
            a[r][m] += f[i][r] * y[i];
        }
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c]))
                piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == c)
                continue;
            long double k = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= m; ++j)
                a[r][j] -= k * a[c][j];
        }
    }
    std::vector<long double> out(m);
    for (std::size_t r = 0; r < m; ++r)
        out[r] = a[r][m] / a[r][r];
    return out;
}

std::vector<std::vector<double>> column(std::initializer_list<double> xs)
{
    std::vector<std::vector<double>> out;
    for (double x : xs)
        out.push_back({x});
    return out;
}

} // namespace

TEST(Monomials, GradedOrderAndCount)
{
    auto e = monomial_exponents(2, 2);
    std::vector<std::vector<int>> expect{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    EXPECT_EQ(e, expect);
    for (std::size_t d = 1; d <= 5; ++d)
        for (int g = 1; g <= 3; ++g)
            EXPECT_EQ(monomial_exponents(d, g).size(), monomial_count(d, g));
    EXPECT_EQ(monomial_count(5, 2), 21u);
}

TEST(Polynomial, RecoversLine)
{
    auto x = column({0, 1, 2, 3, 4, 5});
    std::vector<double> y;
    for (const auto& r : x)
        y.push_back(2 * r[0] + 1);
    FitReport rep;
    auto m = fit_polynomial(x, y, 1, &rep);
    auto raw = m.raw_coefficients();
    ASSERT_EQ(raw.size(), 2u);
    EXPECT_NEAR(raw[0], 1.0, 1e-9);
    EXPECT_NEAR(raw[1], 2.0, 1e-9);
    EXPECT_LT(rep.residual, 1e-18);
    EXPECT_FALSE(rep.rank_deficient);
}

TEST(Polynomial, RecoversSquare)
{
    auto x = column({-3, -1, 0, 2, 4, 7, 9});
    std::vector<double> y;
    for (const auto& r : x)
        y.push_back(r[0] * r[0]);
    auto raw = fit_polynomial(x, y, 2).raw_coefficients();
    ASSERT_EQ(raw.size(), 3u);
    EXPECT_NEAR(raw[0], 0.0, 1e-9);
    EXPECT_NEAR(raw[1], 0.0, 1e-9);
    EXPECT_NEAR(raw[2], 1.0, 1e-9);
}

TEST(Polynomial, QuadraticGeneralizes)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    auto f = [](double a, double b, double c) { return 3 + a - 2 * b + 0.5 * c + a * b - 0.25 * c * c + b * b; };
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int k = 0; k < 60; ++k) {
        double a = u(rng), b = u(rng), c = u(rng);
        x.push_back({a, b, c});
        y.push_back(f(a, b, c));
    }
    auto m = fit_polynomial(x, y, 2);
    for (int k = 0; k < 100; ++k) {
        double a = u(rng), b = u(rng), c = u(rng);
        std::vector<double> q{a, b, c};
        EXPECT_NEAR(m.eval(q), f(a, b, c), 1e-6);
    }
}

TEST(Polynomial, ResidualMatchesNormalEquations)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 4), noise(-1, 1);
    std::vector<std::vector<double>> x;
    std::vector<std::vector<long double>> feats;
    std::vector<double> y;
    for (int k = 0; k < 40; ++k) {
        double t = u(rng);
        x.push_back({t});
        feats.push_back({1.0L, t, static_cast<long double>(t) * t});
        y.push_back(std::sin(t) * 5 + noise(rng));
    }
    FitReport rep;
    auto m = fit_polynomial(x, y, 2, &rep);
    auto beta = normal_equations(feats, y);
    long double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double pred = beta[0] + beta[1] * feats[i][1] + beta[2] * feats[i][2];
        sse += (pred - y[i]) * (pred - y[i]);
        EXPECT_NEAR(m.eval(x[i]), static_cast<double>(pred), 1e-9);
    }
    EXPECT_NEAR(rep.residual, static_cast<double>(sse), 1e-9 * static_cast<double>(sse));
    auto raw = m.raw_coefficients();
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(raw[k], static_cast<double>(beta[k]), 1e-8);
}

TEST(Polynomial, ConstantColumnIsRankDeficient)
{
    std::vector<std::vector<double>> x{{1, 5}, {2, 5}, {3, 5}, {4, 5}, {6, 5}};
    std::vector<double> y{2, 4, 6, 8, 12};
    FitReport rep;
    auto m = fit_polynomial(x, y, 1, &rep);
    EXPECT_TRUE(rep.rank_deficient);
    EXPECT_EQ(rep.rank, 2u);
    std::vector<double> q{5, 5};
    EXPECT_NEAR(m.eval(q), 10.0, 1e-9);
}

TEST(Polynomial, ExtrapolationDistance)
{
    auto x = column({0, 10});
    auto m = fit_polynomial(x, {0.0, 1.0}, 1);
    std::vector<double> in{5}, above{15}, below{-20};
    EXPECT_EQ(m.predict(in).extrapolation, 0.0);
    EXPECT_NEAR(m.predict(above).extrapolation, 0.5, 1e-12);
    EXPECT_NEAR(m.predict(below).extrapolation, 2.0, 1e-12);
}

TEST(Nearest, ExactOnTrainingInputs)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1e6);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int k = 0; k < 200; ++k) {
        x.push_back({u(rng), u(rng), u(rng)});
        y.push_back(u(rng));
    }
    auto m = fit_nearest(x, y);
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_EQ(m.eval(x[i]), y[i]);
}

TEST(Nearest, MatchesBruteForceScan)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int k = 0; k < 300; ++k) {
        // second feature spans a much wider range; distances use min-max scaling
        x.push_back({u(rng), u(rng) * 1e9});
        y.push_back(k);
    }
    auto m = fit_nearest(x, y);
    double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
    for (const auto& r : x) {
        lo0 = std::min(lo0, r[0]), hi0 = std::max(hi0, r[0]);
        lo1 = std::min(lo1, r[1]), hi1 = std::max(hi1, r[1]);
    }
    for (int q = 0; q < 1000; ++q) {
        std::vector<double> p{u(rng) * 1.2 - 0.1, (u(rng) * 1.2 - 0.1) * 1e9};
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double a = (x[i][0] - lo0) / (hi0 - lo0) - (p[0] - lo0) / (hi0 - lo0);
            double b = (x[i][1] - lo1) / (hi1 - lo1) - (p[1] - lo1) / (hi1 - lo1);
            double d = a * a + b * b;
            if (d < best_d)
                best_d = d, best = i;
        }
        EXPECT_EQ(m.nearest_index(p), best);
        EXPECT_EQ(m.eval(p), y[best]);
    }
}

TEST(Nearest, TiesGoToLowestIndex)
{
    auto x = column({0, 2, 4});
    auto m = fit_nearest(x, {10, 20, 30});
    std::vector<double> mid{1}, mid2{3};
    EXPECT_EQ(m.nearest_index(mid), 0u);
    EXPECT_EQ(m.nearest_index(mid2), 1u);
    auto dup = fit_nearest(column({1, 1, 1}), {5, 6, 7});
    std::vector<double> one{1};
    EXPECT_EQ(dup.eval(one), 5.0);
}

TEST(Batch, ParallelMatchesSerial)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<std::vector<double>> x, q;
    std::vector<double> y;
    for (int k = 0; k < 100; ++k) {
        x.push_back({u(rng), u(rng)});
        y.push_back(u(rng));
    }
    for (int k = 0; k < 5000; ++k)
        q.push_back({u(rng) * 2, u(rng) * 2});
    for (const auto& m : {fit_polynomial(x, y, 3), fit_nearest(x, y)}) {
        auto s = predict_batch(m, q, ExecPolicy::serial);
        auto p = predict_batch(m, q, ExecPolicy::parallel);
        EXPECT_EQ(s, p);
        for (std::size_t i = 0; i < q.size(); i += 97)
            EXPECT_EQ(s[i], m.eval(q[i]));
    }
}

TEST(Models, JsonRoundTripPreservesPredictions)
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int k = 0; k < 30; ++k) {
        x.push_back({u(rng), u(rng)});
        y.push_back(x.back()[0] * x.back()[1]);
    }
    for (const auto& m : {fit_polynomial(x, y, 2), fit_nearest(x, y)}) {
        auto back = SurrogateModel::from_json(nlohmann::json::parse(m.to_json().dump()));
        for (int k = 0; k < 50; ++k) {
            std::vector<double> q{u(rng) * 1.5, u(rng) * 1.5};
            EXPECT_EQ(back.eval(q), m.eval(q));
            EXPECT_EQ(back.extrapolation(q), m.extrapolation(q));
        }
    }
}

TEST(Models, ExplicitPolynomial)
{
    // 1 + 2a + 3b + 4a^2 + 5ab + 6b^2
    auto m = SurrogateModel::polynomial(2, 2, {1, 2, 3, 4, 5, 6});
    std::vector<double> q{2, -1};
    EXPECT_DOUBLE_EQ(m.eval(q), 1 + 4 - 3 + 16 - 10 + 6);
    EXPECT_THROW(SurrogateModel::polynomial(2, 2, {1, 2}), std::invalid_argument);
}

TEST(FitAll, HarvestSurrogatesTrackTheProtocols)
{
    const auto& h = harvest();
    SampleBudget budget;
    budget.initial_per_action = 60;
    auto data = collect_initial(h.world, h.actions, h.raw, budget, h.adversary);
    auto set = fit_all(h.actions, data, {ApproxMethod::poly, 2});
    const auto& dep = set.at("deposit");
    ASSERT_FALSE(dep.exact);
    const auto& spec = h.actions[h.action_index("deposit")];
    ASSERT_EQ(dep.models.size(), spec.output_count());
    auto pre = read_states(spec, h.world);
    std::vector<double> pre_d, par{5e12};
    for (const auto& v : pre)
        pre_d.push_back(to_double(v));
    auto est = estimate_action(dep, spec, pre_d, par);
    // USDC leaves exactly, shares are minted at roughly supply / total
    EXPECT_NEAR(est.deltas[0], -5e12, 5e12 * 1e-3);
    double shares = 5e12 * pre_d[0] / (pre_d[1] + pre_d[2]);
    EXPECT_NEAR(est.deltas[1], shares, shares * 2e-2);

    auto exact = fit_all(h.actions, data, {ApproxMethod::exact, 2});
    for (const auto& [id, s] : exact)
        EXPECT_TRUE(s.exact) << id;

    auto back = surrogates_from_json(nlohmann::json::parse(to_json(set).dump()));
    auto est2 = estimate_action(back.at("deposit"), spec, pre_d, par);
    EXPECT_EQ(est.deltas, est2.deltas);
    EXPECT_EQ(est.poststates, est2.poststates);
}

TEST(FitAll, MethodNames)
{
    for (auto m : {ApproxMethod::poly, ApproxMethod::inter, ApproxMethod::exact})
        EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_THROW(parse_method("spline"), std::invalid_argument);
}
