#include "dppsim/core/types.hpp"

#include <algorithm>
#include <sstream>

namespace dpp::core {

double CostSpec::f_value(std::span<const double> x) const {
    if (x.size() != dims) throw std::invalid_argument("f_value: dimension mismatch");
    double v = 0.0;
    for (std::size_t m = 0; m < dims; ++m) v += f_parts[m].value(x[m]);
    return v;
}

double CostSpec::g_value(std::size_t l, std::span<const double> x) const {
    if (l >= num_g) throw std::invalid_argument("g_value: index out of range");
    if (x.size() != dims) throw std::invalid_argument("g_value: dimension mismatch");
    double v = 0.0;
    for (std::size_t m = 0; m < dims; ++m) v += g_parts[l][m].value(x[m]);
    return v;
}

Interval CostSpec::gamma_interval(std::size_t m) const {
    Interval iv = box.at(m);
    if (x_set) {
        const Interval& xs = (*x_set)[m];
        iv.lo = std::max(iv.lo, xs.lo);
        iv.hi = std::min(iv.hi, xs.hi);
    }
    if (iv.lo > iv.hi) throw ConfigError("empty X ∩ box interval");
    return iv;
}

bool CostSpec::in_x_set(std::span<const double> x, double slack) const {
    if (!x_set) return true;
    for (std::size_t m = 0; m < dims; ++m) {
        if (!(*x_set)[m].contains(x[m], slack)) return false;
    }
    return true;
}

bool CostSpec::in_box(std::span<const double> x, double slack) const {
    for (std::size_t m = 0; m < dims; ++m) {
        if (!box[m].contains(x[m], slack)) return false;
    }
    return true;
}

double CostSpec::beta_row_sum(std::size_t l) const {
    double s = 0.0;
    for (double b : beta.at(l)) s += b;
    return s;
}

double CostSpec::beta_sum_max() const {
    double best = 0.0;
    for (std::size_t l = 0; l < num_g; ++l) best = std::max(best, beta_row_sum(l));
    return best;
}

bool satisfies_feasibility(const ProblemFrame& f, const AttributeEvaluation& eval,
                           double delta) {
    for (std::size_t l = 0; l < f.L; ++l) {
        double lhs = eval.penalties[l + 1] + f.cost.g_value(l, eval.attributes);
        if (!(lhs <= -delta + kSlack)) return false;
    }
    for (std::size_t k = 0; k < f.K; ++k) {
        if (!(eval.arrivals[k] <= eval.services[k] - delta + kSlack)) return false;
    }
    if (delta > 0.0) {
        // Slater form additionally needs a delta-ball around x inside X and
        // x within the delta-shrunk box.
        for (std::size_t m = 0; m < f.M; ++m) {
            const Interval& bx = f.cost.box[m];
            if (!(eval.attributes[m] >= bx.lo + delta - kSlack &&
                  eval.attributes[m] <= bx.hi - delta + kSlack))
                return false;
            if (f.cost.x_set) {
                const Interval& xs = (*f.cost.x_set)[m];
                if (!(eval.attributes[m] - delta >= xs.lo - kSlack &&
                      eval.attributes[m] + delta <= xs.hi + kSlack))
                    return false;
            }
        }
    } else {
        if (!f.cost.in_x_set(eval.attributes, kSlack)) return false;
    }
    return true;
}

bool SystemModel::satisfies_a2(const AttributeEvaluation& eval, double delta) const {
    return satisfies_feasibility(frame, eval, delta);
}

std::optional<std::size_t> SystemModel::a2_action(std::size_t event_id, double delta) const {
    const auto& entry = catalog.at(event_id);
    for (std::size_t i = 0; i < entry.actions.size(); ++i) {
        if (satisfies_a2(entry.actions[i], delta)) return i;
    }
    return std::nullopt;
}

namespace {

void check_dims(const AttributeEvaluation& e, const ProblemFrame& f,
                std::size_t event_id, std::size_t action) {
    if (e.arrivals.size() != f.K || e.services.size() != f.K ||
        e.attributes.size() != f.M || e.penalties.size() != f.L + 1) {
        std::ostringstream os;
        os << "event " << event_id << " action " << action
           << ": attribute dimensions disagree with (K,L,M)";
        throw std::invalid_argument(os.str());
    }
}

void check_a1(const AttributeEvaluation& e, const ProblemFrame& f,
              std::size_t event_id, std::size_t action) {
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os << "Assumption A1 violated at event " << event_id << " action " << action
           << ": " << what;
        throw std::invalid_argument(os.str());
    };
    for (std::size_t k = 0; k < f.K; ++k) {
        if (!(e.arrivals[k] >= -kSlack && e.arrivals[k] <= f.bounds.a_max[k] + kSlack))
            fail("arrival outside [0, a_max]");
        if (!(e.services[k] >= -kSlack && e.services[k] <= f.bounds.b_max[k] + kSlack))
            fail("service outside [0, b_max]");
    }
    for (std::size_t m = 0; m < f.M; ++m) {
        if (!f.bounds.x_range[m].contains(e.attributes[m], kSlack)) fail("x outside range");
    }
    for (std::size_t l = 0; l <= f.L; ++l) {
        if (!f.bounds.y_range[l].contains(e.penalties[l], kSlack)) fail("y outside range");
    }
}

}  // namespace

ActionTable make_action_table(const SystemModel& model,
                              std::span<const EventSample> events) {
    ActionTable table;
    table.reserve(events.size());
    for (const EventSample& ev : events) table.push_back(model.catalog.at(ev.event_id).actions);
    return table;
}

void SystemModel::validate() const {
    const auto& f = frame;
    if (f.cost.dims != f.M || f.cost.num_g != f.L)
        throw std::invalid_argument("cost spec dimensions disagree with (L,M)");
    if (f.bounds.a_max.size() != f.K || f.bounds.b_max.size() != f.K ||
        f.bounds.x_range.size() != f.M || f.bounds.y_range.size() != f.L + 1)
        throw std::invalid_argument("A1 bound dimensions disagree with (K,L,M)");
    if (catalog.empty()) throw std::invalid_argument("empty event catalog");
    for (std::size_t m = 0; m < f.M; ++m) f.cost.gamma_interval(m);  // non-empty
    for (std::size_t e = 0; e < catalog.size(); ++e) {
        if (catalog[e].actions.empty()) {
            std::ostringstream os;
            os << "event " << e << " has an empty action set";
            throw std::invalid_argument(os.str());
        }
        for (std::size_t a = 0; a < catalog[e].actions.size(); ++a) {
            check_dims(catalog[e].actions[a], f, e, a);
            check_a1(catalog[e].actions[a], f, e, a);
        }
        if (!a2_action(e)) {
            std::ostringstream os;
            os << "Assumption A2 violated: event " << e
               << " has no action with y_l + g_l(x) <= 0, a_k <= b_k, x in X";
            throw std::invalid_argument(os.str());
        }
    }
}

}  // namespace dpp::core
