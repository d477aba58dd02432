#pragma once

#include "dppsim/core/types.hpp"

namespace dpp::core {

// Per-slot decision policy.  Exact mode minimizes the drift-plus-penalty
// expression with lowest-index tie breaking.  The approximate modes pick an
// action whose score stays within an additive budget of the minimum:
//     budget(t) = C + V*eps_V + sum Z_l*eps_Z + sum Q_k*eps_Q + sum |H_m|*eps_H
// WorstWithinBudget is the adversarial choice (largest admissible score);
// RandomWithinBudget samples uniformly from the admissible set.
struct ApproximationPolicy {
    enum class Mode { Exact, WorstWithinBudget, RandomWithinBudget };

    Mode mode = Mode::Exact;
    double C = 0.0;
    double eps_V = 0.0, eps_Z = 0.0, eps_Q = 0.0, eps_H = 0.0;
    std::uint64_t seed = 0;

    static ApproximationPolicy exact() { return {}; }
    static ApproximationPolicy additive(double C, std::uint64_t seed = 0,
                                        Mode mode = Mode::WorstWithinBudget) {
        ApproximationPolicy p;
        p.mode = mode;
        p.C = C;
        p.seed = seed;
        return p;
    }
    static ApproximationPolicy state_scaled(double C, double eps_V, double eps_Z,
                                            double eps_Q, double eps_H,
                                            std::uint64_t seed = 0,
                                            Mode mode = Mode::WorstWithinBudget) {
        ApproximationPolicy p = additive(C, seed, mode);
        p.eps_V = eps_V;
        p.eps_Z = eps_Z;
        p.eps_Q = eps_Q;
        p.eps_H = eps_H;
        return p;
    }

    bool is_exact() const {
        return mode == Mode::Exact ||
               (C == 0.0 && eps_V == 0.0 && eps_Z == 0.0 && eps_Q == 0.0 && eps_H == 0.0);
    }
    double budget(double V, const QueueState& state) const;
};

// Drift-plus-penalty score of one (action, gamma) pair:
//   V*y0 + V*f(gamma) + sum_l Z_l*[y_l + g_l(gamma)]
//   + sum_k Q_k*[a_k - b_k] + sum_m H_m*[gamma_m - x_m]
double drift_penalty_score(const SystemModel& model, std::size_t event_id,
                           std::size_t action_index, std::span<const double> gamma,
                           const QueueState& state, double V);

// Score restricted to the action-dependent terms; same argmin as
// drift_penalty_score with gamma held fixed.
double action_score(const ProblemFrame& frame, const AttributeEvaluation& eval,
                    const QueueState& state, double V);

// gamma(t): minimize V*f(gamma) + sum_l Z_l*g_l(gamma) + sum_m H_m*gamma_m
// over X ∩ box.  Per-coordinate golden section for separable costs (1e-9
// argument tolerance), analytic part minimizers when registered, aux_hook
// for non-separable costs.
std::vector<double> choose_aux(const SystemModel& model, const QueueState& state, double V);
std::vector<double> choose_aux(const CostSpec& cost, std::span<const double> Z,
                               std::span<const double> H, double V);

// alpha(t): index minimizing action_score; ties break to the lowest index.
// Under an approximate policy, any index within the budget may be returned.
std::size_t choose_action(const SystemModel& model, std::size_t event_id,
                          std::span<const double> gamma, const QueueState& state,
                          double V, const ApproximationPolicy& approx,
                          CounterRng* rng = nullptr);

// One slot of the universal algorithm: choose_aux, choose_action, then the
// three queue updates.  Deterministic given inputs.
std::pair<QueueState, SlotRecord> step(const SystemModel& model, const QueueState& state,
                                       const EventSample& event, double V,
                                       const ApproximationPolicy& approx,
                                       CounterRng* rng = nullptr);

// Folds step over the event sequence; replay-identical across invocations.
Trace run(const SystemModel& model, std::span<const EventSample> events, double V,
          const ApproximationPolicy& approx, const QueueState& initial);

}  // namespace dpp::core
