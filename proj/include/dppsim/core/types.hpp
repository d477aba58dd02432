#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dppsim/common.hpp"

namespace dpp::core {

// Per-slot random event: an index into the owning model's event catalog.
// Structured models (internet, multihop) carry their typed payloads in
// their own event types and map onto this only for shared verification.
struct EventSample {
    std::int64_t slot = 0;
    std::size_t event_id = 0;
};

// The attribute values (a, b, x, y) produced by one (event, action) pair.
struct AttributeEvaluation {
    std::vector<double> arrivals;    // a_k, size K
    std::vector<double> services;    // b_k, size K
    std::vector<double> attributes;  // x_m, size M
    std::vector<double> penalties;   // y_l, size L+1; index 0 is the cost term
};

// One separable convex cost component f_m (or g_{l,m}) on an interval.
struct ScalarConvex {
    std::function<double(double)> value;
    // Minimizer of  scale*value(x) + linear*x  over [iv.lo, iv.hi]; optional
    // closed form that short-circuits the golden-section search.
    std::function<double(double scale, double linear, Interval iv)> argmin;
};

// Cost specification: convex f and g_1..g_L over the attribute box, their
// derivative bounds, value ranges, and the convex set X (restricted to an
// axis-aligned box; empty optional means X = R^M).
struct CostSpec {
    std::size_t dims = 0;  // M
    std::size_t num_g = 0; // L

    std::vector<Interval> box;                 // [x_m^min, x_m^max], size M
    std::optional<std::vector<Interval>> x_set;

    bool separable = true;
    std::vector<ScalarConvex> f_parts;               // size M when separable
    std::vector<std::vector<ScalarConvex>> g_parts;  // L x M when separable

    std::vector<double> nu;                 // size M
    std::vector<std::vector<double>> beta;  // L x M
    double f_min = 0.0, f_max = 0.0;
    std::vector<double> g_min, g_max;       // size L

    // Full-vector minimizer hook for non-separable costs:
    // gamma = aux_hook(V, Z, H).
    std::function<std::vector<double>(double, std::span<const double>,
                                      std::span<const double>)>
        aux_hook;

    double f_value(std::span<const double> x) const;
    double g_value(std::size_t l, std::span<const double> x) const;

    // X ∩ box membership, the feasible region for auxiliary variables.
    Interval gamma_interval(std::size_t m) const;
    bool in_x_set(std::span<const double> x, double slack = 0.0) const;
    bool in_box(std::span<const double> x, double slack = 0.0) const;

    double beta_row_sum(std::size_t l) const;
    double beta_sum_max() const;  // max_l sum_m beta_{l,m}; 0 when L == 0
};

// Assumption A1 constants.
struct Bounds {
    std::vector<double> a_max, b_max;  // size K
    std::vector<Interval> x_range;     // size M
    std::vector<Interval> y_range;     // size L+1
};

// Dimensions, cost, and A1 bounds of one problem instance; shared by the
// general framework and by the structured models for verification.
struct ProblemFrame {
    std::size_t K = 0, L = 0, M = 0;
    CostSpec cost;
    Bounds bounds;

    double y0_range() const { return bounds.y_range.at(0).width(); }
    double f_range() const { return cost.f_max - cost.f_min; }
};

struct CatalogEntry {
    std::vector<AttributeEvaluation> actions;
};

// The general time-varying optimization problem: a ProblemFrame plus a
// finite per-event action catalog (Assumption A4 case 1).
struct SystemModel {
    ProblemFrame frame;
    std::vector<CatalogEntry> catalog;

    // Checks dimension consistency, A1 membership of every action, and the
    // existence of an A2 action in every catalog entry (by enumeration).
    // Throws std::invalid_argument naming the violated assumption.
    void validate() const;

    // True iff the action satisfies Assumption A2 (resp. A3 with margin
    // delta > 0) for this model.
    bool satisfies_a2(const AttributeEvaluation& eval, double delta = 0.0) const;
    // Index of the first A2/A3 action of the entry, if any.
    std::optional<std::size_t> a2_action(std::size_t event_id, double delta = 0.0) const;
};

// All mutable algorithm state: virtual queues Z (size L), actual queues Q
// (size K), signed virtual queues H (size M), and the slot index.
struct QueueState {
    std::vector<double> Z, Q, H;
    std::int64_t slot = 0;

    static QueueState zeros(std::size_t K, std::size_t L, std::size_t M) {
        QueueState s;
        s.Z.assign(L, 0.0);
        s.Q.assign(K, 0.0);
        s.H.assign(M, 0.0);
        return s;
    }
};

struct SlotRecord {
    std::int64_t slot = 0;
    std::size_t event_id = 0;
    std::size_t action_index = 0;
    std::vector<double> gamma;
    AttributeEvaluation eval;
    QueueState queues_after;
    double objective_term = 0.0;  // V*y0 + V*f(gamma) for this slot
};

using Trace = std::vector<SlotRecord>;

// True iff the evaluation satisfies the per-slot feasibility conditions:
// Assumption A2 at delta = 0, its Slater strengthening for delta > 0.
bool satisfies_feasibility(const ProblemFrame& frame, const AttributeEvaluation& eval,
                           double delta = 0.0);

// Per-slot candidate evaluations, the substrate for lookahead enumeration.
// The general model fills it from its catalog; the structured models compile
// their per-slot decision spaces into it.
using ActionTable = std::vector<std::vector<AttributeEvaluation>>;

ActionTable make_action_table(const SystemModel& model,
                              std::span<const EventSample> events);

}  // namespace dpp::core
