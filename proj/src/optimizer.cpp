#include "loansynth/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace loansynth {

namespace {
// Relative slack for round-off in residuals accumulated as doubles.
constexpr double kFeasibleTol = 1e-12;
} // namespace

std::size_t OptimizationProblem::constraint_count() const
{
    if (plan)
        return plan->residual_count();
    return residual_scales.size();
}

double OptimizationProblem::violation(const Evaluation& e) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < e.residuals.size(); ++i) {
        double s = i < residual_scales.size() ? residual_scales[i] : 1.0;
        double need = i < slack.size() ? slack[i] : 0.0;
        double short_by = (need - e.residuals[i]) / s;
        if (!(short_by <= 0))
            v += std::isfinite(short_by) ? short_by : 1e9;
    }
    return v;
}

bool OptimizationProblem::feasible(const Evaluation& e) const
{
    if (!e.valid || !std::isfinite(e.objective))
        return false;
    for (std::size_t i = 0; i < e.residuals.size(); ++i) {
        double s = i < residual_scales.size() ? residual_scales[i] : 1.0;
        double need = i < slack.size() ? slack[i] : 0.0;
        if (!(e.residuals[i] >= need - kFeasibleTol * s))
            return false;
    }
    return true;
}

StrengthLevel StrengthLevel::from_budget(int level, std::size_t evals_per_dim)
{
    StrengthLevel s;
    s.level = level;
    s.sampling_points_per_dim = std::max<std::size_t>(4, evals_per_dim / 2);
    s.local_polish_budget = std::max<std::size_t>(4, evals_per_dim - s.sampling_points_per_dim);
    s.refinement_iterations = static_cast<std::size_t>(std::clamp(level + 1, 2, 6));
    return s;
}

StrengthLevel StrengthLevel::preset(int level)
{
    static const std::size_t budgets[] = {64, 256, 1024};
    if (level < 1 || level > 3)
        throw std::invalid_argument("strength level must be 1, 2 or 3");
    return from_budget(level, budgets[level - 1]);
}

OptimizationProblem construct(const SymbolicVector& vector, const SurrogateSet& surrogates, const World& world,
                              const std::vector<ActionSpec>& specs, const std::string& adversary, double margin)
{
    auto plan = std::make_shared<const VectorPlan>(world, specs, surrogates, vector, adversary);
    OptimizationProblem p;
    p.bounds = plan->param_bounds();
    p.residual_scales = plan->residual_scales();
    for (std::size_t i = 0; i < p.residual_scales.size(); ++i)
        p.slack.push_back(plan->residual_estimated()[i] ? margin * p.residual_scales[i] : 0.0);
    p.plan = plan;
    p.evaluate = [plan](std::span<const double> x) {
        PlanResult r = plan->evaluate(x);
        Evaluation e;
        e.valid = !r.reverted;
        e.objective = r.profit;
        e.residuals = std::move(r.residuals);
        return e;
    };
    return p;
}

std::vector<double> halton_point(std::size_t index, std::size_t dim, std::span<const double> shift)
{
    static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
    if (dim > std::size(primes))
        throw std::invalid_argument("halton_point: too many dimensions");
    std::vector<double> u(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        double f = 1.0, r = 0.0;
        std::size_t i = index + 1;
        while (i > 0) {
            f /= primes[d];
            r += f * static_cast<double>(i % primes[d]);
            i /= primes[d];
        }
        if (d < shift.size())
            r = std::fmod(r + shift[d], 1.0);
        u[d] = r;
    }
    return u;
}

std::vector<Evaluation> evaluate_batch(const OptimizationProblem& problem, const std::vector<std::vector<double>>& xs,
                                       ExecPolicy policy)
{
    std::vector<Evaluation> out(xs.size());
    const long n = static_cast<long>(xs.size());
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long i = 0; i < n; ++i)
            out[i] = problem.evaluate(xs[i]);
    } else {
        for (long i = 0; i < n; ++i)
            out[i] = problem.evaluate(xs[i]);
    }
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDiagonalMaxDim = 6;
constexpr double kStartSeparation = 0.1;

/// Maps the unit cube to the (rounded) parameter box; log scale when the
/// lower bound is positive.
struct BoxMap {
    std::vector<std::pair<double, double>> bounds;
    std::vector<bool> logscale;

    explicit BoxMap(const std::vector<std::pair<double, double>>& b) : bounds(b)
    {
        for (auto [lo, hi] : b) {
            if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
                throw std::invalid_argument("solve: bounds must be finite with lower <= upper");
            logscale.push_back(lo > 0 && hi > lo);
        }
    }

    std::vector<double> to_x(std::span<const double> u) const
    {
        std::vector<double> x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            auto [lo, hi] = bounds[i];
            double t = std::clamp(u[i], 0.0, 1.0);
            double v = logscale[i] ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
            x[i] = std::clamp(std::round(v), std::ceil(lo), std::floor(hi));
        }
        return x;
    }

    std::vector<double> to_u(std::span<const double> x) const
    {
        std::vector<double> u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto [lo, hi] = bounds[i];
            if (hi <= lo)
                u[i] = 0.0;
            else if (logscale[i])
                u[i] = (std::log(std::clamp(x[i], lo, hi)) - std::log(lo)) / (std::log(hi) - std::log(lo));
            else
                u[i] = (std::clamp(x[i], lo, hi) - lo) / (hi - lo);
        }
        return u;
    }
};

struct Scored {
    std::vector<double> u;
    std::vector<double> x;
    Evaluation eval;
    bool feasible = false;
    double violation = kInf;
};

/// Tracks evaluations for one search thread.
struct Searcher {
    const OptimizationProblem& problem;
    const BoxMap& map;
    double weight;
    std::size_t evals = 0;
    std::optional<Scored> best_feasible = std::nullopt;

    Scored eval(std::vector<double> u)
    {
        for (auto& v : u)
            v = std::clamp(v, 0.0, 1.0);
        Scored s;
        s.x = map.to_x(u);
        s.u = std::move(u);
        s.eval = problem.evaluate(s.x);
        ++evals;
        s.feasible = problem.feasible(s.eval);
        s.violation = s.eval.valid ? problem.violation(s.eval) : kInf;
        if (s.feasible && (!best_feasible || s.eval.objective > best_feasible->eval.objective))
            best_feasible = s;
        return s;
    }

    double merit(const Scored& s) const
    {
        if (!s.eval.valid || !std::isfinite(s.eval.objective) || !std::isfinite(s.violation))
            return -kInf;
        return s.eval.objective - weight * s.violation;
    }
};

/// Poll directions: the coordinate axes, plus pairwise diagonals in low
/// dimension so the search can follow constraints that couple two parameters.
std::vector<std::vector<double>> poll_directions(std::size_t n)
{
    std::vector<std::vector<double>> dirs;
    for (std::size_t d = 0; d < n; ++d)
        for (double sign : {1.0, -1.0}) {
            std::vector<double> v(n, 0.0);
            v[d] = sign;
            dirs.push_back(std::move(v));
        }
    if (n <= kDiagonalMaxDim)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                for (double sa : {1.0, -1.0})
                    for (double sb : {1.0, -1.0}) {
                        std::vector<double> v(n, 0.0);
                        v[a] = sa;
                        v[b] = sb;
                        dirs.push_back(std::move(v));
                    }
    return dirs;
}

/// Compass search from `start`. Polling is opportunistic: the first improving
/// direction is taken and tried first on the next poll.
Scored compass(Searcher& S, Scored start, double step, std::size_t budget)
{
    const std::size_t n = start.u.size();
    auto dirs = poll_directions(n);
    Scored cur = std::move(start);
    double cur_m = S.merit(cur);
    const std::size_t stop = S.evals + budget;
    while (step > 1e-9 && S.evals < stop) {
        bool improved = false;
        for (std::size_t k = 0; k < dirs.size() && S.evals < stop; ++k) {
            auto u = cur.u;
            bool moved = false;
            for (std::size_t d = 0; d < n; ++d) {
                u[d] = std::clamp(u[d] + dirs[k][d] * step, 0.0, 1.0);
                moved = moved || u[d] != cur.u[d];
            }
            if (!moved)
                continue;
            Scored cand = S.eval(std::move(u));
            double m = S.merit(cand);
            if (m > cur_m) {
                cur = std::move(cand);
                cur_m = m;
                std::rotate(dirs.begin(), dirs.begin() + static_cast<long>(k), dirs.begin() + static_cast<long>(k) + 1);
                improved = true;
                break;
            }
        }
        if (improved)
            step = std::min(step * 2.0, 0.5);
        else
            step *= 0.5;
    }
    return cur;
}

Scored nelder_mead(Searcher& S, const Scored& start, double size, std::size_t budget)
{
    const std::size_t n = start.u.size();
    std::vector<Scored> simplex{start};
    for (std::size_t d = 0; d < n; ++d) {
        auto u = start.u;
        u[d] += (u[d] + size <= 1.0) ? size : -size;
        simplex.push_back(S.eval(std::move(u)));
    }
    auto by_merit = [&](const Scored& a, const Scored& b) { return S.merit(a) > S.merit(b); };
    const std::size_t stop = S.evals + budget;
    while (S.evals + 2 < stop) {
        std::stable_sort(simplex.begin(), simplex.end(), by_merit);
        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                spread = std::max(spread, std::abs(simplex[i].u[d] - simplex[0].u[d]));
        if (spread < 1e-10)
            break;
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                c[d] += simplex[i].u[d] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> u(n);
            for (std::size_t d = 0; d < n; ++d)
                u[d] = c[d] + t * (simplex[n].u[d] - c[d]);
            return u;
        };
        Scored r = S.eval(along(-1.0));
        double mr = S.merit(r), m0 = S.merit(simplex[0]), mw = S.merit(simplex[n]),
               msw = S.merit(simplex[n - 1]);
        if (mr > m0) {
            Scored e = S.eval(along(-2.0));
            simplex[n] = S.merit(e) > mr ? std::move(e) : std::move(r);
        } else if (mr > msw) {
            simplex[n] = std::move(r);
        } else {
            Scored k = S.eval(along(mr > mw ? -0.5 : 0.5));
            if (S.merit(k) > std::max(mr, mw)) {
                simplex[n] = std::move(k);
            } else {
                for (std::size_t i = 1; i <= n && S.evals < stop; ++i) {
                    std::vector<double> u(n);
                    for (std::size_t d = 0; d < n; ++d)
                        u[d] = simplex[0].u[d] + 0.5 * (simplex[i].u[d] - simplex[0].u[d]);
                    simplex[i] = S.eval(std::move(u));
                }
            }
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_merit);
    return simplex.front();
}

/// Pattern search on the integer lattice from a feasible point. Only feasible
/// improvements are taken. Steps start at t times each dimension's scale,
/// double on success and halve down to one base unit, so the point can slide
/// along an active constraint to its end.
Scored lattice_polish(Searcher& S, Scored cur, double t, std::size_t budget)
{
    const std::size_t n = cur.x.size();
    auto dirs = poll_directions(n);
    std::vector<double> scale(n);
    for (std::size_t d = 0; d < n; ++d) {
        auto [lo, hi] = S.map.bounds[d];
        scale[d] = S.map.logscale[d] ? std::max(std::abs(cur.x[d]), lo) : hi - lo;
    }
    const std::size_t stop = S.evals + budget;
    while (S.evals < stop) {
        bool improved = false;
        bool unit = true;
        for (std::size_t k = 0; k < dirs.size() && S.evals < stop; ++k) {
            std::vector<double> x = cur.x;
            bool moved = false;
            for (std::size_t d = 0; d < n; ++d) {
                if (dirs[k][d] == 0.0)
                    continue;
                auto [lo, hi] = S.map.bounds[d];
                double h = std::max(1.0, std::round(t * scale[d]));
                unit = unit && h == 1.0;
                x[d] = std::clamp(x[d] + dirs[k][d] * h, std::ceil(lo), std::floor(hi));
                moved = moved || x[d] != cur.x[d];
            }
            if (!moved)
                continue;
            Scored cand = S.eval(S.map.to_u(x));
            if (cand.feasible && cand.x != cur.x && cand.eval.objective > cur.eval.objective) {
                cur = std::move(cand);
                std::rotate(dirs.begin(), dirs.begin() + static_cast<long>(k), dirs.begin() + static_cast<long>(k) + 1);
                improved = true;
                break;
            }
        }
        if (improved)
            t *= 2.0;
        else if (unit)
            break;
        else
            t *= 0.5;
    }
    return cur;
}

bool better_feasible(const std::optional<Scored>& a, const std::optional<Scored>& b)
{
    // true when b improves on a
    return b && (!a || b->eval.objective > a->eval.objective);
}

} // namespace

OptResult solve(const OptimizationProblem& problem, const StrengthLevel& strength, std::uint64_t seed,
                const std::vector<std::vector<double>>& warm_starts, ExecPolicy policy)
{
    const std::size_t n = problem.bounds.size();
    BoxMap map(problem.bounds);
    OptResult result;
    if (n == 0) {
        Evaluation e = problem.evaluate(std::vector<double>{});
        result.evaluations = 1;
        result.feasible = problem.feasible(e);
        result.best_objective = e.objective;
        result.feasible_fraction = result.feasible ? 1.0 : 0.0;
        return result;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> shift(n);
    for (auto& s : shift)
        s = unit(rng);

    // Global sample: warm starts first, then shifted Halton points.
    std::vector<std::vector<double>> us;
    for (const auto& w : warm_starts)
        if (w.size() == n)
            us.push_back(map.to_u(w));
    const std::size_t samples = strength.sampling_points_per_dim * n;
    for (std::size_t i = 0; i < samples; ++i)
        us.push_back(halton_point(i, n, shift));
    std::vector<std::vector<double>> xs;
    for (const auto& u : us)
        xs.push_back(map.to_x(u));
    auto evals = evaluate_batch(problem, xs, policy);

    std::vector<Scored> pool(us.size());
    std::optional<Scored> best;
    std::size_t feasible_count = 0;
    double obj_scale = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        Scored& s = pool[i];
        s.u = us[i];
        s.x = xs[i];
        s.eval = std::move(evals[i]);
        s.feasible = problem.feasible(s.eval);
        s.violation = s.eval.valid ? problem.violation(s.eval) : kInf;
        if (s.feasible)
            ++feasible_count;
        if (s.eval.valid && std::isfinite(s.eval.objective))
            obj_scale = std::max(obj_scale, std::abs(s.eval.objective));
        if (s.feasible && better_feasible(best, std::optional<Scored>(s)))
            best = s;
    }
    result.evaluations = us.size();
    result.feasible_fraction = us.empty() ? 0.0 : static_cast<double>(feasible_count) / static_cast<double>(us.size());
    if (!(obj_scale > 0))
        obj_scale = 1.0;

    // Multi-start local refinement with escalating penalty weight.
    const std::size_t rounds = std::max<std::size_t>(1, strength.refinement_iterations);
    const std::size_t local_total = strength.local_polish_budget * n;
    const std::size_t polish_budget = local_total / 4;
    const std::size_t per_round = (local_total - polish_budget) / rounds;
    const std::size_t starts_wanted = std::min<std::size_t>(pool.size(), 2 + static_cast<std::size_t>(strength.level) * 2);

    auto merit0 = [&](const Scored& s, double w) {
        if (!s.eval.valid || !std::isfinite(s.eval.objective) || !std::isfinite(s.violation))
            return -kInf;
        return s.eval.objective - w * s.violation;
    };

    std::vector<Scored> starts;
    {
        std::vector<std::size_t> idx(pool.size());
        std::iota(idx.begin(), idx.end(), 0);
        double w = obj_scale * 10.0;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return merit0(pool[a], w) > merit0(pool[b], w); });
        // warm starts always seed the local phase
        for (std::size_t i = 0; i < warm_starts.size() && i < pool.size(); ++i)
            starts.push_back(pool[i]);
        // Best-first, skipping points close to a chosen start so the local
        // phase covers separate basins.
        const double radius = kStartSeparation * std::sqrt(static_cast<double>(n));
        for (std::size_t i : idx) {
            if (starts.size() >= starts_wanted + warm_starts.size())
                break;
            if (i < warm_starts.size())
                continue;
            if (merit0(pool[i], w) == -kInf)
                break;
            bool near = false;
            for (const auto& st : starts) {
                double d2 = 0.0;
                for (std::size_t d = 0; d < n; ++d)
                    d2 += (st.u[d] - pool[i].u[d]) * (st.u[d] - pool[i].u[d]);
                near = near || d2 < radius * radius;
            }
            if (!near)
                starts.push_back(pool[i]);
        }
    }

    double step = 0.125;
    for (std::size_t r = 0; r < rounds && !starts.empty(); ++r) {
        double w = obj_scale * std::pow(10.0, static_cast<double>(r) - 1.0);
        const std::size_t budget = std::max<std::size_t>(2 * n, per_round / starts.size());
        std::vector<Scored> next(starts.size());
        std::vector<std::optional<Scored>> found(starts.size());
        std::vector<std::size_t> used(starts.size());
        const long m = static_cast<long>(starts.size());
        auto work = [&](long i) {
            Searcher S{problem, map, w};
            next[i] = compass(S, starts[i], step, budget);
            found[i] = S.best_feasible;
            used[i] = S.evals;
        };
        if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (long i = 0; i < m; ++i)
                work(i);
        } else {
            for (long i = 0; i < m; ++i)
                work(i);
        }
        for (long i = 0; i < m; ++i) {
            result.evaluations += used[i];
            if (better_feasible(best, found[i]))
                best = found[i];
        }
        starts = std::move(next);
        step *= 0.25;
    }

    // Polish the best feasible point and every local end point.
    if (best)
        starts.insert(starts.begin(), *best);
    if (!starts.empty() && polish_budget / starts.size() > n + 2) {
        const double w = obj_scale * std::pow(10.0, static_cast<double>(rounds + 1));
        const std::size_t budget = polish_budget / starts.size();
        const long m = static_cast<long>(starts.size());
        std::vector<std::optional<Scored>> found(starts.size());
        std::vector<std::size_t> used(starts.size());
        auto work = [&](long i) {
            Searcher S{problem, map, w};
            nelder_mead(S, starts[i], std::max(step, 1e-4), budget);
            found[i] = S.best_feasible;
            used[i] = S.evals;
        };
        if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (long i = 0; i < m; ++i)
                work(i);
        } else {
            for (long i = 0; i < m; ++i)
                work(i);
        }
        for (long i = 0; i < m; ++i) {
            result.evaluations += used[i];
            if (better_feasible(best, found[i]))
                best = found[i];
        }
    }

    // Finally walk the best point along the integer lattice.
    if (best) {
        Searcher S{problem, map, 0.0};
        auto walked = lattice_polish(S, *best, step, std::max(polish_budget / 2, 2 * n));
        result.evaluations += S.evals;
        if (walked.eval.objective > best->eval.objective)
            best = std::move(walked);
    }

    if (!best) {
        result.feasible = false;
        return result;
    }
    result.feasible = true;
    result.best_params = best->x;
    // re-evaluate to report a fresh value
    result.best_objective = problem.evaluate(best->x).objective;
    ++result.evaluations;
    return result;
}

} // namespace loansynth
