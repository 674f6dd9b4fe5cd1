#include "loansynth/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace loansynth {

namespace {

const Amount kShadowFunding = pow10(36);

std::size_t intern(std::vector<std::string>& list, const std::string& value)
{
    auto it = std::find(list.begin(), list.end(), value);
    if (it != list.end())
        return static_cast<std::size_t>(it - list.begin());
    list.push_back(value);
    return list.size() - 1;
}

} // namespace

VectorPlan::VectorPlan(const World& base, const std::vector<ActionSpec>& specs, const SurrogateSet& surrogates,
                       const SymbolicVector& vector, std::string adversary)
    : adversary_(std::move(adversary))
{
    if (vector.actions.empty())
        throw std::invalid_argument("empty symbolic vector");
    for (std::size_t idx : vector.actions) {
        const ActionSpec& spec = specs.at(idx);
        auto it = surrogates.find(spec.id);
        if (it == surrogates.end())
            throw MissingSurrogate("no surrogates or exact summary for action " + spec.id);
        if (!it->second.exact && it->second.models.size() != spec.output_count())
            throw MissingSurrogate("surrogate count mismatch for action " + spec.id);
        Step s;
        s.spec = &spec;
        s.surrogates = &it->second;
        s.param_offset = param_count_;
        param_count_ += spec.params.size();
        for (const auto& r : spec.prestates) {
            s.pre_slots.push_back(intern(slot_refs_, r));
            s.pre_loadable.push_back(base.loadable(r));
        }
        for (const auto& r : spec.poststates)
            s.post_slots.push_back(intern(slot_refs_, r));
        for (const auto& t : spec.flow_tokens())
            s.flow_tokens.push_back(intern(tokens_, t));
        has_exact_ = has_exact_ || s.surrogates->exact;
        steps_.push_back(std::move(s));
    }

    for (const auto& r : slot_refs_)
        init_slots_.push_back(to_double(base.read(r)));
    const auto& reg = base.registry();
    for (const auto& t : tokens_) {
        init_balances_.push_back(to_double(base.state().balance(adversary_, t)));
        token_weights_.push_back(to_double(reg.price(t)) / std::pow(10.0, reg.token(t).decimals));
    }

    // Residual scale: a token's magnitude is the larger of the starting
    // balance and any parameter bound in the vector.
    double param_scale = 1.0;
    for (const auto& s : steps_)
        for (const auto& p : s.spec->params)
            param_scale = std::max(param_scale, to_double(p.upper));
    std::vector<bool> token_est(tokens_.size(), false), slot_est(slot_refs_.size(), false);
    for (const auto& s : steps_) {
        bool approx = !s.surrogates->exact;
        for (std::size_t t : s.flow_tokens)
            token_est[t] = token_est[t] || approx;
        for (std::size_t slot : s.post_slots) {
            // an exact step recomputes its outputs, but from possibly estimated inputs
            bool from_est = approx;
            for (std::size_t pre : s.pre_slots)
                from_est = from_est || slot_est[pre];
            slot_est[slot] = from_est;
        }
        if (!approx)
            for (std::size_t pre : s.pre_slots)
                if (slot_est[pre])
                    for (std::size_t t : s.flow_tokens)
                        token_est[t] = true;
        for (std::size_t t = 0; t < tokens_.size(); ++t) {
            residual_scales_.push_back(std::max({1.0, init_balances_[t], param_scale}));
            residual_estimated_.push_back(token_est[t]);
        }
        for (std::size_t slot : s.post_slots) {
            residual_scales_.push_back(std::max(1.0, std::abs(init_slots_[slot])));
            residual_estimated_.push_back(slot_est[slot]);
        }
    }

    if (has_exact_) {
        auto shadow = std::make_shared<World>(base);
        for (const auto& t : tokens_)
            shadow->state().set_balance(adversary_, t, kShadowFunding);
        shadow_base_ = std::move(shadow);
    }
}

std::vector<std::pair<double, double>> VectorPlan::param_bounds() const
{
    std::vector<std::pair<double, double>> b;
    for (const auto& s : steps_)
        for (const auto& p : s.spec->params)
            b.emplace_back(to_double(p.lower), to_double(p.upper));
    return b;
}

PlanResult VectorPlan::evaluate(std::span<const double> params, Trajectory* trace) const
{
    if (params.size() != param_count_)
        throw std::invalid_argument("parameter vector has wrong length");
    PlanResult res;
    res.residuals.reserve(residual_scales_.size());
    std::vector<double> slots = init_slots_;
    std::vector<double> bal = init_balances_;
    std::vector<char> dirty(slots.size(), 0);
    std::optional<World> shadow;
    if (has_exact_)
        shadow.emplace(*shadow_base_);
    if (trace) {
        trace->slots.clear();
        trace->balances.clear();
    }

    std::vector<double> in;
    std::vector<Amount> iparams;
    for (std::size_t k = 0; k < steps_.size(); ++k) {
        const Step& s = steps_[k];
        const ActionSpec& spec = *s.spec;
        const std::size_t np = spec.params.size();
        iparams.clear();
        for (std::size_t i = 0; i < np; ++i)
            iparams.push_back(amount_from_double(params[s.param_offset + i]));

        if (s.surrogates->exact) {
            try {
                for (std::size_t i = 0; i < s.pre_slots.size(); ++i) {
                    std::size_t slot = s.pre_slots[i];
                    if (!dirty[slot] || !s.pre_loadable[i])
                        continue;
                    if (!(slots[slot] >= 0) || !std::isfinite(slots[slot]))
                        throw Revert("estimated prestate out of range");
                    shadow->load(slot_refs_[slot], amount_from_double(slots[slot]));
                }
                const auto flows = spec.flow_tokens();
                std::vector<Amount> before;
                for (const auto& t : flows)
                    before.push_back(shadow->state().balance(adversary_, t));
                shadow->call(adversary_, spec.protocol, spec.method, spec.fixed_args, iparams);
                for (std::size_t i = 0; i < flows.size(); ++i)
                    bal[s.flow_tokens[i]] += to_double(shadow->state().balance(adversary_, flows[i]) - before[i]);
                for (std::size_t slot : s.post_slots) {
                    slots[slot] = to_double(shadow->read(slot_refs_[slot]));
                    dirty[slot] = 0;
                }
            } catch (const Revert&) {
                res.reverted = true;
                res.failed_step = k;
                return res;
            } catch (const std::domain_error&) {
                res.reverted = true;
                res.failed_step = k;
                return res;
            }
        } else {
            in.clear();
            for (std::size_t slot : s.pre_slots)
                in.push_back(slots[slot]);
            for (std::size_t i = 0; i < np; ++i)
                in.push_back(std::round(params[s.param_offset + i]));
            const auto& models = s.surrogates->models;
            const std::size_t npost = s.post_slots.size();
            std::vector<double> out(models.size());
            for (std::size_t o = 0; o < models.size(); ++o)
                out[o] = models[o].eval(in);
            for (std::size_t i = 0; i < npost; ++i) {
                slots[s.post_slots[i]] = out[i];
                dirty[s.post_slots[i]] = 1;
            }
            for (std::size_t i = 0; i < s.flow_tokens.size(); ++i)
                bal[s.flow_tokens[i]] += out[npost + i];
        }

        for (double b : bal)
            res.residuals.push_back(b);
        for (std::size_t slot : s.post_slots)
            res.residuals.push_back(slots[slot]);
        if (trace) {
            trace->slots.push_back(slots);
            trace->balances.push_back(bal);
        }
    }

    double profit = 0.0;
    for (std::size_t t = 0; t < tokens_.size(); ++t)
        profit += (bal[t] - init_balances_[t]) * token_weights_[t];
    res.profit = profit;
    return res;
}

void observe(const VectorPlan& plan, const World& world, const std::string& adversary, std::vector<double>& slots,
             std::vector<double>& balances)
{
    slots.clear();
    balances.clear();
    for (const auto& r : plan.slot_refs())
        slots.push_back(to_double(world.read(r)));
    for (const auto& t : plan.tokens())
        balances.push_back(to_double(world.state().balance(adversary, t)));
}

} // namespace loansynth
