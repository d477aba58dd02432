#pragma once

// Seeded random instance families shared by the unit and acceptance suites.

#include <algorithm>
#include <vector>

#include "dppsim/core/cost_terms.hpp"
#include "dppsim/core/types.hpp"

namespace testgen {

using dpp::CounterRng;
using dpp::Interval;
namespace core = dpp::core;

struct GeneralOpts {
    std::size_t max_K = 3, max_L = 3, max_M = 3;
    std::size_t max_events = 3, max_actions = 4;
    double slater_delta = 0.0;  // > 0 adds a margin-delta action to every event
};

inline core::ScalarTerm random_cost_term(CounterRng& rng, Interval box) {
    switch (rng.next_index(4)) {
        case 0: return core::ScalarTerm::zero();
        case 1: return core::ScalarTerm::linear(rng.next_double(-1.0, 1.0));
        case 2:
            return core::ScalarTerm::quadratic(rng.next_double(0.2, 1.0),
                                               rng.next_double(-1.0, 1.0));
        default:
            return core::ScalarTerm::abs_dev(rng.next_double(0.2, 1.0),
                                             rng.next_double(box.lo, box.hi));
    }
}

inline core::SystemModel random_general_model(CounterRng& rng,
                                              const GeneralOpts& opts = {}) {
    const double delta = opts.slater_delta;
    const std::size_t K = rng.next_index(opts.max_K + 1);
    const std::size_t L = rng.next_index(opts.max_L + 1);
    const std::size_t M = rng.next_index(opts.max_M + 1);

    std::vector<Interval> box(M);
    std::vector<core::ScalarTerm> f_terms(M);
    std::vector<std::vector<core::ScalarTerm>> g_terms(L,
                                                       std::vector<core::ScalarTerm>(M));
    for (std::size_t m = 0; m < M; ++m) {
        box[m] = {0.0, rng.next_double(0.5, 2.0)};
        if (delta > 0.0 && box[m].width() < 2.5 * delta) box[m].hi = box[m].lo + 2.5 * delta;
        f_terms[m] = random_cost_term(rng, box[m]);
        for (std::size_t l = 0; l < L; ++l) g_terms[l][m] = random_cost_term(rng, box[m]);
    }
    core::CostSpec cost = core::make_separable_cost(f_terms, g_terms, box);

    core::SystemModel model;
    model.frame.K = K;
    model.frame.L = L;
    model.frame.M = M;

    const std::size_t num_events = 1 + rng.next_index(opts.max_events);
    for (std::size_t e = 0; e < num_events; ++e) {
        core::CatalogEntry entry;
        const std::size_t num_actions = 1 + rng.next_index(opts.max_actions);
        const std::size_t feasible_at = rng.next_index(num_actions);
        for (std::size_t i = 0; i < num_actions; ++i) {
            core::AttributeEvaluation ev;
            const bool anchor = i == feasible_at;
            for (std::size_t k = 0; k < K; ++k) {
                double b = anchor ? delta + rng.next_double(0.0, 1.0)
                                  : rng.next_double(0.0, 1.5);
                double a = anchor ? rng.next_double(0.0, 1.0) * std::max(b - delta, 0.0)
                                  : rng.next_double(0.0, 1.5);
                ev.arrivals.push_back(a);
                ev.services.push_back(b);
            }
            for (std::size_t m = 0; m < M; ++m) {
                Interval draw = box[m];
                if (anchor && delta > 0.0) draw = {box[m].lo + delta, box[m].hi - delta};
                ev.attributes.push_back(rng.next_double(draw.lo, draw.hi));
            }
            ev.penalties.push_back(rng.next_double(-1.0, 1.0));  // y0
            for (std::size_t l = 0; l < L; ++l) {
                if (anchor) {
                    double g = cost.g_value(l, ev.attributes);
                    ev.penalties.push_back(-g - delta - rng.next_double(0.0, 0.5));
                } else {
                    ev.penalties.push_back(rng.next_double(-1.5, 1.5));
                }
            }
            entry.actions.push_back(std::move(ev));
        }
        model.catalog.push_back(std::move(entry));
    }

    // A1 bounds derived from the catalog; x ranges from the box.
    core::Bounds& bounds = model.frame.bounds;
    bounds.a_max.assign(K, 0.0);
    bounds.b_max.assign(K, 0.0);
    bounds.x_range = box;
    bounds.y_range.assign(L + 1, Interval{dpp::kInf, -dpp::kInf});
    for (const auto& entry : model.catalog) {
        for (const auto& ev : entry.actions) {
            for (std::size_t k = 0; k < K; ++k) {
                bounds.a_max[k] = std::max(bounds.a_max[k], ev.arrivals[k]);
                bounds.b_max[k] = std::max(bounds.b_max[k], ev.services[k]);
            }
            for (std::size_t l = 0; l <= L; ++l) {
                bounds.y_range[l].lo = std::min(bounds.y_range[l].lo, ev.penalties[l]);
                bounds.y_range[l].hi = std::max(bounds.y_range[l].hi, ev.penalties[l]);
            }
        }
    }
    model.frame.cost = std::move(cost);
    model.validate();
    return model;
}

inline std::vector<core::EventSample> random_events(CounterRng& rng,
                                                    const core::SystemModel& model,
                                                    std::size_t t_end) {
    std::vector<core::EventSample> events;
    events.reserve(t_end);
    for (std::size_t t = 0; t < t_end; ++t) {
        events.push_back({static_cast<std::int64_t>(t),
                          rng.next_index(model.catalog.size())});
    }
    return events;
}

}  // namespace testgen
