#include "dppsim/core/algorithm.hpp"

#include <algorithm>
#include <cmath>

#include "dppsim/core/queues.hpp"
#include "dppsim/core/scalar_min.hpp"

namespace dpp::core {

double ApproximationPolicy::budget(double V, const QueueState& state) const {
    if (mode == Mode::Exact) return 0.0;
    double b = C + V * eps_V;
    for (double z : state.Z) b += z * eps_Z;
    for (double q : state.Q) b += q * eps_Q;
    for (double h : state.H) b += std::abs(h) * eps_H;
    return b;
}

double action_score(const ProblemFrame& frame, const AttributeEvaluation& eval,
                    const QueueState& state, double V) {
    double s = V * eval.penalties[0];
    for (std::size_t l = 0; l < frame.L; ++l) s += state.Z[l] * eval.penalties[l + 1];
    for (std::size_t k = 0; k < frame.K; ++k)
        s += state.Q[k] * (eval.arrivals[k] - eval.services[k]);
    for (std::size_t m = 0; m < frame.M; ++m) s -= state.H[m] * eval.attributes[m];
    return s;
}

double drift_penalty_score(const SystemModel& model, std::size_t event_id,
                           std::size_t action_index, std::span<const double> gamma,
                           const QueueState& state, double V) {
    const auto& frame = model.frame;
    if (gamma.size() != frame.M)
        throw std::invalid_argument("drift_penalty_score: gamma dimension mismatch");
    if (!frame.cost.in_box(gamma, kSlack) || !frame.cost.in_x_set(gamma, kSlack))
        throw std::invalid_argument("drift_penalty_score: gamma outside X ∩ box");
    const auto& eval = model.catalog.at(event_id).actions.at(action_index);
    double s = action_score(frame, eval, state, V);
    s += V * frame.cost.f_value(gamma);
    for (std::size_t l = 0; l < frame.L; ++l)
        s += state.Z[l] * frame.cost.g_value(l, gamma);
    for (std::size_t m = 0; m < frame.M; ++m) s += state.H[m] * gamma[m];
    return s;
}

std::vector<double> choose_aux(const CostSpec& cost, std::span<const double> Z,
                               std::span<const double> H, double V) {
    const std::size_t M = cost.dims;
    if (M == 0) return {};
    if (!cost.separable) {
        if (!cost.aux_hook)
            throw ConfigError("non-separable cost without an aux minimizer hook");
        return cost.aux_hook(V, Z, H);
    }
    std::vector<double> gamma(M);
    for (std::size_t m = 0; m < M; ++m) {
        const Interval iv = cost.gamma_interval(m);
        // Objective for coordinate m:
        //   V*f_m(g) + sum_l Z_l*g_{l,m}(g) + H_m*g
        bool z_terms = false;
        for (std::size_t l = 0; l < cost.num_g; ++l)
            if (Z[l] != 0.0) z_terms = true;
        if (!z_terms && cost.f_parts[m].argmin) {
            gamma[m] = cost.f_parts[m].argmin(V, H[m], iv);
            continue;
        }
        auto objective = [&](double g) {
            double v = V * cost.f_parts[m].value(g) + H[m] * g;
            for (std::size_t l = 0; l < cost.num_g; ++l)
                if (Z[l] != 0.0) v += Z[l] * cost.g_parts[l][m].value(g);
            return v;
        };
        gamma[m] = iv.clamp(golden_section_min(objective, iv.lo, iv.hi));
    }
    return gamma;
}

std::vector<double> choose_aux(const SystemModel& model, const QueueState& state, double V) {
    return choose_aux(model.frame.cost, state.Z, state.H, V);
}

std::size_t choose_action(const SystemModel& model, std::size_t event_id,
                          std::span<const double> gamma, const QueueState& state,
                          double V, const ApproximationPolicy& approx, CounterRng* rng) {
    (void)gamma;  // fixed for this slot; does not affect the argmin
    const auto& actions = model.catalog.at(event_id).actions;
    if (actions.empty()) throw std::invalid_argument("choose_action: empty action set");
    std::vector<double> scores(actions.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        scores[i] = action_score(model.frame, actions[i], state, V);
        if (scores[i] < scores[best]) best = i;
    }
    if (approx.is_exact()) return best;

    const double budget = approx.budget(V, state);
    const double cutoff = scores[best] + budget;
    switch (approx.mode) {
        case ApproximationPolicy::Mode::WorstWithinBudget: {
            std::size_t pick = best;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                if (scores[i] <= cutoff && scores[i] > scores[pick]) pick = i;
            }
            return pick;
        }
        case ApproximationPolicy::Mode::RandomWithinBudget: {
            std::vector<std::size_t> ok;
            for (std::size_t i = 0; i < scores.size(); ++i)
                if (scores[i] <= cutoff) ok.push_back(i);
            if (!rng) throw std::invalid_argument("RandomWithinBudget needs an rng");
            return ok[rng->next_index(ok.size())];
        }
        case ApproximationPolicy::Mode::Exact: break;
    }
    return best;
}

std::pair<QueueState, SlotRecord> step(const SystemModel& model, const QueueState& state,
                                       const EventSample& event, double V,
                                       const ApproximationPolicy& approx, CounterRng* rng) {
    const auto& frame = model.frame;
    if (state.slot != event.slot)
        throw std::invalid_argument("step: state slot disagrees with event slot");
    std::vector<double> gamma = choose_aux(model, state, V);
    std::size_t action = choose_action(model, event.event_id, gamma, state, V, approx, rng);
    const AttributeEvaluation& eval = model.catalog.at(event.event_id).actions.at(action);

    QueueState next = state;
    next.slot = state.slot + 1;
    for (std::size_t k = 0; k < frame.K; ++k)
        next.Q[k] = update_actual_queue(state.Q[k], eval.services[k], eval.arrivals[k]);
    for (std::size_t l = 0; l < frame.L; ++l)
        next.Z[l] = update_virtual_z(state.Z[l], eval.penalties[l + 1],
                                     frame.cost.g_value(l, gamma));
    for (std::size_t m = 0; m < frame.M; ++m)
        next.H[m] = update_virtual_h(state.H[m], gamma[m], eval.attributes[m]);

    SlotRecord rec;
    rec.slot = event.slot;
    rec.event_id = event.event_id;
    rec.action_index = action;
    rec.gamma = gamma;
    rec.eval = eval;
    rec.queues_after = next;
    rec.objective_term = V * eval.penalties[0] + V * frame.cost.f_value(gamma);
    return {std::move(next), std::move(rec)};
}

Trace run(const SystemModel& model, std::span<const EventSample> events, double V,
          const ApproximationPolicy& approx, const QueueState& initial) {
    if (initial.slot != 0) throw std::invalid_argument("run: initial slot must be 0");
    CounterRng rng(approx.seed);
    Trace trace;
    trace.reserve(events.size());
    QueueState state = initial;
    for (const EventSample& ev : events) {
        auto [next, rec] = step(model, state, ev, V, approx, &rng);
        trace.push_back(std::move(rec));
        state = std::move(next);
    }
    return trace;
}

}  // namespace dpp::core
