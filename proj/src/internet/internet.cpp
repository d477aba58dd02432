#include "dppsim/internet/internet.hpp"

#include <algorithm>
#include <cmath>

#include "dppsim/core/queues.hpp"

namespace dpp::internet {

DelaySpec DelaySpec::constant(std::int64_t t, std::size_t links) {
    DelaySpec d;
    d.tau.assign(links, t);
    d.validate(links);
    return d;
}

DelaySpec DelaySpec::per_link(std::vector<std::int64_t> t) {
    DelaySpec d;
    d.tau = std::move(t);
    d.validate(d.tau.size());
    return d;
}

std::int64_t DelaySpec::max() const {
    std::int64_t m = 0;
    for (std::int64_t t : tau) m = std::max(m, t);
    return m;
}

void DelaySpec::validate(std::size_t links) const {
    if (tau.empty()) return;
    if (tau.size() != links) throw ConfigError("delay spec size disagrees with link count");
    for (std::int64_t t : tau)
        if (t < 0) throw ConfigError("negative feedback delay");
}

namespace {

void enumerate_paths(const Model& model, std::size_t node, std::size_t dest,
                     std::vector<bool>& visited, Path& stack,
                     std::vector<Path>& out) {
    if (node == dest) {
        out.push_back(stack);
        return;
    }
    for (std::size_t l = 0; l < model.links.size(); ++l) {
        const DirectedLink& link = model.links[l];
        if (link.from != node || visited[link.to]) continue;
        visited[link.to] = true;
        stack.push_back(l);
        enumerate_paths(model, link.to, dest, visited, stack, out);
        stack.pop_back();
        visited[link.to] = false;
    }
}

}  // namespace

std::vector<std::size_t> Model::path_node_sequence(std::size_t session,
                                                   const Path& path) const {
    std::vector<std::size_t> seq{sessions[session].source};
    for (std::size_t l : path) seq.push_back(links.at(l).to);
    return seq;
}

void Model::build() {
    if (nodes == 0) throw ConfigError("internet model needs at least one node");
    for (const DirectedLink& l : links) {
        if (l.from >= nodes || l.to >= nodes || l.from == l.to)
            throw ConfigError("link endpoints out of range");
        if (l.cap_max < 0.0) throw ConfigError("negative link capacity bound");
    }
    path_sets.assign(sessions.size(), {});
    link_usable.assign(sessions.size(), std::vector<bool>(links.size(), false));
    for (std::size_t m = 0; m < sessions.size(); ++m) {
        const Session& s = sessions[m];
        if (s.source >= nodes || s.dest >= nodes || s.source == s.dest)
            throw ConfigError("session endpoints out of range");
        if (s.a_max < 0.0) throw ConfigError("negative arrival bound");
        std::vector<Path> paths;
        if (s.explicit_paths) {
            paths = *s.explicit_paths;
            for (const Path& p : paths) {
                std::size_t at = s.source;
                for (std::size_t l : p) {
                    if (l >= links.size() || links[l].from != at)
                        throw ConfigError("explicit path is not connected");
                    at = links[l].to;
                }
                if (at != s.dest) throw ConfigError("explicit path misses the destination");
            }
        } else {
            std::vector<bool> visited(nodes, false);
            visited[s.source] = true;
            Path stack;
            enumerate_paths(*this, s.source, s.dest, visited, stack, paths);
        }
        std::sort(paths.begin(), paths.end(), [&](const Path& a, const Path& b) {
            return path_node_sequence(m, a) < path_node_sequence(m, b);
        });
        for (const Path& p : paths)
            for (std::size_t l : p) link_usable[m][l] = true;
        path_sets[m] = std::move(paths);
    }
}

double Model::nu_max() const {
    double v = 0.0;
    for (const Session& s : sessions) v = std::max(v, s.utility.nu());
    return v;
}

double Model::a_max_overall() const {
    double v = 0.0;
    for (const Session& s : sessions) v = std::max(v, s.a_max);
    return v;
}

double Model::z_bound(double V, std::int64_t tau_max) const {
    const double M = static_cast<double>(sessions.size());
    return V * nu_max() + a_max_overall() +
           (static_cast<double>(tau_max) + 1.0) * M * a_max_overall();
}

double Model::h_upper(double V, std::size_t session) const {
    return V * sessions[session].utility.nu() + sessions[session].a_max;
}

core::ProblemFrame Model::frame() const {
    core::ProblemFrame f;
    f.K = 0;
    f.L = links.size();
    f.M = sessions.size();

    std::vector<core::ScalarTerm> f_terms;
    std::vector<Interval> box;
    for (const Session& s : sessions) {
        f_terms.push_back(s.utility.as_cost_term());
        box.push_back({0.0, s.a_max});
    }
    std::vector<std::vector<core::ScalarTerm>> g_terms(
        f.L, std::vector<core::ScalarTerm>(f.M, core::ScalarTerm::zero()));
    f.cost = core::make_separable_cost(f_terms, g_terms, box);

    f.bounds.x_range = box;
    f.bounds.y_range.assign(f.L + 1, Interval{0.0, 0.0});
    for (std::size_t l = 0; l < f.L; ++l) {
        double inflow_max = 0.0;
        for (std::size_t m = 0; m < f.M; ++m)
            if (link_usable[m][l]) inflow_max += sessions[m].a_max;
        f.bounds.y_range[l + 1] = {-links[l].cap_max, inflow_max};
    }
    return f;
}

double Model::internet_B() const {
    core::ProblemFrame f = frame();
    double b = 0.0;
    for (std::size_t l = 0; l < f.L; ++l) {
        const Interval& yr = f.bounds.y_range[l + 1];
        double z_diff = std::max(std::abs(yr.hi), std::abs(yr.lo));
        b += 0.5 * z_diff * z_diff;
    }
    for (const Session& s : sessions) b += 0.5 * s.a_max * s.a_max;
    return b;
}

double aux_update(double H, double V, const core::UtilitySpec& phi, double a_max) {
    require_finite(H, "H");
    require_finite(V, "V");
    core::ScalarTerm term = phi.as_cost_term();
    return term.argmin(V, H, Interval{0.0, a_max});
}

RouteDecision route_and_admit(const Model& model, std::size_t session, double arrival,
                              double H, std::span<const double> z_weights) {
    const auto& paths = model.path_sets.at(session);
    if (paths.empty()) throw NoPathError(session);
    // Paths are pre-sorted by node sequence, so the first strict improvement
    // is the lexicographically smallest among ties.
    std::size_t best = 0;
    double best_w = kInf;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        double w = 0.0;
        for (std::size_t l : paths[i]) w += z_weights[l];
        if (w < best_w) {
            best_w = w;
            best = i;
        }
    }
    RouteDecision d;
    d.path_weight = best_w;
    if (best_w <= H) {
        d.x = arrival;
        d.path = paths[best];
    }
    return d;
}

std::vector<double> delayed_queue_view(std::span<const std::vector<double>> z_history,
                                       const DelaySpec& delay, std::int64_t t) {
    if (z_history.empty()) throw std::invalid_argument("delayed_queue_view: empty history");
    const std::size_t L = z_history.back().size();
    delay.validate(L);
    if (!delay.active()) return z_history.back();
    std::vector<double> view(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        std::int64_t idx = t - delay.tau[l];
        if (idx >= 0 && idx < static_cast<std::int64_t>(z_history.size()))
            view[l] = z_history[static_cast<std::size_t>(idx)][l];
    }
    return view;
}

std::size_t wireless_capacity_alloc(std::span<const std::vector<double>> options,
                                    std::span<const double> Z) {
    if (options.empty()) throw ConfigError("wireless_capacity_alloc: no capacity options");
    std::size_t best = 0;
    double best_score = -kInf;
    for (std::size_t o = 0; o < options.size(); ++o) {
        double s = 0.0;
        for (std::size_t l = 0; l < Z.size(); ++l) s += options[o][l] * Z[l];
        if (s > best_score) {
            best_score = s;
            best = o;
        }
    }
    return best;
}

std::vector<std::size_t> options_within_theta(std::span<const std::vector<double>> options,
                                              std::span<const double> Z, double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("options_within_theta: theta in (0,1]");
    std::size_t best = wireless_capacity_alloc(options, Z);
    double best_score = 0.0;
    for (std::size_t l = 0; l < Z.size(); ++l) best_score += options[best][l] * Z[l];
    std::vector<std::size_t> ok;
    for (std::size_t o = 0; o < options.size(); ++o) {
        double s = 0.0;
        for (std::size_t l = 0; l < Z.size(); ++l) s += options[o][l] * Z[l];
        if (s >= theta * best_score - kSlack) ok.push_back(o);
    }
    return ok;
}

std::vector<core::AttributeEvaluation> Model::enumerate_actions(
    const InternetEvent& ev) const {
    const std::size_t L = links.size();
    const std::size_t M = sessions.size();
    if (ev.arrivals.size() != M || ev.capacity_options.empty())
        throw std::invalid_argument("internet event dimensions disagree with the model");

    // Per session: choice 0 = drop; choice 1+p = admit on path p.
    std::vector<std::size_t> widths(M);
    for (std::size_t m = 0; m < M; ++m) widths[m] = 1 + path_sets[m].size();

    std::vector<core::AttributeEvaluation> out;
    std::vector<std::size_t> choice(M, 0);
    for (std::size_t option = 0; option < ev.capacity_options.size(); ++option) {
        const auto& caps = ev.capacity_options[option];
        while (true) {
            core::AttributeEvaluation e;
            e.attributes.assign(M, 0.0);
            e.penalties.assign(L + 1, 0.0);
            std::vector<double> inflow(L, 0.0);
            for (std::size_t m = 0; m < M; ++m) {
                if (choice[m] == 0) continue;
                e.attributes[m] = ev.arrivals[m];
                for (std::size_t l : path_sets[m][choice[m] - 1])
                    inflow[l] += ev.arrivals[m];
            }
            for (std::size_t l = 0; l < L; ++l) e.penalties[l + 1] = inflow[l] - caps[l];
            out.push_back(std::move(e));
            // odometer
            std::size_t m = 0;
            for (; m < M; ++m) {
                if (++choice[m] < widths[m]) break;
                choice[m] = 0;
            }
            if (m == M) break;
        }
    }
    return out;
}

core::ActionTable Model::action_table(std::span<const InternetEvent> events) const {
    core::ActionTable table;
    table.reserve(events.size());
    for (const auto& ev : events) table.push_back(enumerate_actions(ev));
    return table;
}

Simulator::Simulator(const Model& model, double V, DelaySpec delay)
    : model_(model), V_(V), delay_(std::move(delay)) {
    delay_.validate(model.links.size());
    state_.Z.assign(model.links.size(), 0.0);
    state_.H.assign(model.sessions.size(), 0.0);
    z_history_.push_back(state_.Z);
}

core::SlotRecord Simulator::step(const InternetEvent& event) {
    const std::size_t L = model_.links.size();
    const std::size_t M = model_.sessions.size();
    if (event.slot != state_.slot)
        throw std::invalid_argument("internet step: event slot disagrees with state");
    if (event.arrivals.size() != M || event.capacity_options.empty())
        throw std::invalid_argument("internet step: event dimensions disagree");
    for (const auto& caps : event.capacity_options) {
        if (caps.size() != L) throw std::invalid_argument("capacity vector width != L");
        for (std::size_t l = 0; l < L; ++l) {
            if (caps[l] < -kSlack || caps[l] > model_.links[l].cap_max + kSlack)
                throw std::domain_error("link capacity outside [0, cap_max]");
        }
    }
    for (std::size_t m = 0; m < M; ++m) {
        if (event.arrivals[m] < -kSlack ||
            event.arrivals[m] > model_.sessions[m].a_max + kSlack)
            throw std::domain_error("session arrival outside [0, A_max]");
    }

    std::vector<double> view = delayed_queue_view(z_history_, delay_, state_.slot);

    std::size_t option = 0;
    if (event.capacity_options.size() > 1)
        option = wireless_capacity_alloc(event.capacity_options, view);
    const std::vector<double>& caps = event.capacity_options[option];

    std::vector<double> gamma(M), admitted(M, 0.0);
    std::vector<double> inflow(L, 0.0);
    std::size_t admit_mask = 0;
    double score_gap = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        const Session& s = model_.sessions[m];
        gamma[m] = aux_update(state_.H[m], V_, s.utility, s.a_max);
        if (model_.path_sets[m].empty()) continue;  // unreachable: idle this slot
        RouteDecision d = route_and_admit(model_, m, event.arrivals[m], state_.H[m], view);
        if (d.path) {
            admitted[m] = d.x;
            admit_mask |= (std::size_t{1} << m);
            for (std::size_t l : *d.path) inflow[l] += d.x;
        }
        if (delay_.active()) {
            // Empirical per-slot gap of the session objective
            // x*(H - path weight) under true vs. stale Z.
            RouteDecision fresh = route_and_admit(model_, m, event.arrivals[m], state_.H[m],
                                                  state_.Z);
            double best = fresh.x * (state_.H[m] - fresh.path_weight);
            double got = 0.0;
            if (d.path) {
                double w = 0.0;
                for (std::size_t l : *d.path) w += state_.Z[l];
                got = d.x * (state_.H[m] - w);
            }
            score_gap += best - got;
        }
    }
    if (delay_.active() && event.capacity_options.size() > 1) {
        std::size_t fresh_opt = wireless_capacity_alloc(event.capacity_options, state_.Z);
        double best = 0.0, got = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            best += event.capacity_options[fresh_opt][l] * state_.Z[l];
            got += caps[l] * state_.Z[l];
        }
        score_gap += best - got;
    }
    max_score_gap_ = std::max(max_score_gap_, score_gap);

    core::SlotRecord rec;
    rec.slot = event.slot;
    rec.event_id = event.event_id;
    rec.action_index = option * (std::size_t{1} << M) + admit_mask;
    rec.gamma = gamma;
    rec.eval.attributes = admitted;
    rec.eval.penalties.assign(L + 1, 0.0);
    for (std::size_t l = 0; l < L; ++l) rec.eval.penalties[l + 1] = inflow[l] - caps[l];

    InternetState next;
    next.slot = state_.slot + 1;
    next.Z.resize(L);
    next.H.resize(M);
    for (std::size_t l = 0; l < L; ++l)
        next.Z[l] = core::update_virtual_z(state_.Z[l], rec.eval.penalties[l + 1], 0.0);
    for (std::size_t m = 0; m < M; ++m)
        next.H[m] = core::update_virtual_h(state_.H[m], gamma[m], admitted[m]);
    state_ = std::move(next);
    z_history_.push_back(state_.Z);

    rec.queues_after.Z = state_.Z;
    rec.queues_after.H = state_.H;
    rec.queues_after.slot = state_.slot;

    double f_val = 0.0;
    for (std::size_t m = 0; m < M; ++m)
        f_val -= model_.sessions[m].utility.value(gamma[m]);
    rec.objective_term = V_ * f_val;
    return rec;
}

core::Trace Simulator::run(std::span<const InternetEvent> events) {
    core::Trace trace;
    trace.reserve(events.size());
    for (const auto& ev : events) trace.push_back(step(ev));
    return trace;
}

}  // namespace dpp::internet
