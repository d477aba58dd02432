#include "dppsim/multihop/multihop.hpp"

#include <algorithm>
#include <cmath>

#include "dppsim/core/queues.hpp"
#include "dppsim/oracle/oracle.hpp"

namespace dpp::multihop {

BiasWeights BiasWeights::zero(std::size_t nodes) {
    BiasWeights b;
    b.nodes = nodes;
    b.theta.assign(nodes * nodes, 0.0);
    return b;
}

double BiasWeights::diff() const {
    double d = 0.0;
    for (std::size_t c = 0; c < nodes; ++c) {
        double lo = kInf, hi = -kInf;
        for (std::size_t n = 0; n < nodes; ++n) {
            lo = std::min(lo, at(n, c));
            hi = std::max(hi, at(n, c));
        }
        d = std::max(d, hi - lo);
    }
    return d;
}

QueueMatrix QueueMatrix::zeros(std::size_t nodes) {
    QueueMatrix m;
    m.nodes = nodes;
    m.q.assign(nodes * nodes, 0.0);
    return m;
}

double QueueMatrix::max_value() const {
    double v = 0.0;
    for (double x : q) v = std::max(v, x);
    return v;
}

MuMatrix MuMatrix::zeros(std::size_t nodes) {
    MuMatrix m;
    m.nodes = nodes;
    m.mu.assign(nodes * nodes * nodes, 0.0);
    return m;
}

std::size_t queue_index(std::size_t n, std::size_t c, std::size_t nodes) {
    if (n == c || n >= nodes || c >= nodes)
        throw std::invalid_argument("queue_index: bad (node, commodity) pair");
    return n * (nodes - 1) + (c < n ? c : c - 1);
}

void Model::build() {
    const std::size_t N = nodes;
    if (N == 0) throw ConfigError("multihop model needs at least one node");
    if (states.empty()) throw ConfigError("multihop model needs a topology-state catalog");
    if (bias.theta.empty()) bias = BiasWeights::zero(N);
    if (bias.nodes != N || bias.theta.size() != N * N)
        throw ConfigError("bias weight dimensions disagree with node count");
    for (double t : bias.theta)
        if (t < 0.0) throw ConfigError("negative bias weight");
    for (const Session& s : sessions) {
        if (s.source >= N || s.dest >= N || s.source == s.dest)
            throw ConfigError("session endpoints out of range");
        if (s.a_max < 0.0) throw ConfigError("negative arrival bound");
    }

    mu_max.assign(N * N, 0.0);
    mu_in_max.assign(N, 0.0);
    mu_out_max.assign(N, 0.0);
    mu_sum_max.assign(N, 0.0);
    c_sum_max = 0.0;
    for (const TopologyState& st : states) {
        if (st.options.empty()) throw ConfigError("topology state with no resource options");
        for (const RateOption& opt : st.options) {
            std::vector<double> in(N, 0.0), out(N, 0.0);
            std::vector<bool> seen(N * N, false);
            double total = 0.0;
            for (const RateEntry& e : opt) {
                if (e.from >= N || e.to >= N || e.from == e.to)
                    throw ConfigError("rate entry endpoints out of range");
                if (e.rate < 0.0) throw ConfigError("negative transmission rate");
                if (seen[e.from * N + e.to])
                    throw ConfigError("duplicate link in one rate option");
                seen[e.from * N + e.to] = true;
                mu_max[e.from * N + e.to] = std::max(mu_max[e.from * N + e.to], e.rate);
                in[e.to] += e.rate;
                out[e.from] += e.rate;
                total += e.rate;
            }
            c_sum_max = std::max(c_sum_max, total);
            for (std::size_t n = 0; n < N; ++n) {
                mu_in_max[n] = std::max(mu_in_max[n], in[n]);
                mu_out_max[n] = std::max(mu_out_max[n], out[n]);
                mu_sum_max[n] = std::max(mu_sum_max[n], in[n] + out[n]);
            }
        }
    }
    beta_node.assign(N, 0.0);
    beta_max = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        double exog_best = 0.0;
        for (std::size_t c = 0; c < N; ++c)
            if (c != n) exog_best = std::max(exog_best, exog_max(n, c));
        beta_node[n] = mu_in_max[n] + exog_best;
        beta_max = std::max(beta_max, beta_node[n]);
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

double Model::qmax(double V) const {
    return compute_qmax(V, nu_max(), a_max_overall(), beta_max);
}

double Model::capprox_C() const {
    return 2.0 * c_sum_max * (beta_max + bias.diff());
}

double Model::exog_max(std::size_t n, std::size_t c) const {
    double v = 0.0;
    for (const Session& s : sessions)
        if (s.source == n && s.dest == c) v += s.a_max;
    return v;
}

core::ProblemFrame Model::frame() const {
    const std::size_t N = nodes;
    core::ProblemFrame f;
    f.K = N * (N - 1);
    f.L = 0;
    f.M = sessions.size();

    std::vector<core::ScalarTerm> f_terms;
    std::vector<Interval> box;
    for (const Session& s : sessions) {
        f_terms.push_back(s.utility.as_cost_term());
        box.push_back({0.0, s.a_max});
    }
    f.cost = core::make_separable_cost(f_terms, {}, box);
    f.bounds.x_range = box;
    f.bounds.y_range = {Interval{0.0, 0.0}};
    f.bounds.a_max.assign(f.K, 0.0);
    f.bounds.b_max.assign(f.K, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t c = 0; c < N; ++c) {
            if (n == c) continue;
            std::size_t k = queue_index(n, c, N);
            f.bounds.a_max[k] = mu_in_max[n] + exog_max(n, c);
            f.bounds.b_max[k] = mu_out_max[n];
        }
    }
    return f;
}

double flow_control(double arrival, double H, double q_source_dest) {
    require_finite(arrival, "arrival");
    require_finite(H, "H");
    require_finite(q_source_dest, "queue");
    return q_source_dest <= H ? arrival : 0.0;
}

namespace {

// Applies full-rate transmissions for the per-link argmax commodity with
// non-negative weight; weight(i, j, c) < 0 blocks the pair entirely.
template <typename WeightFn>
TransmitResult assign_by_weights(const Model& model, std::size_t state_id,
                                 const WeightFn& weight,
                                 std::optional<std::size_t> forced_option) {
    const std::size_t N = model.nodes;
    const auto& options = model.states.at(state_id).options;
    if (options.empty()) throw ConfigError("topology state with no resource options");

    // Argmax commodity per link (ties to the lowest index); a link transmits
    // only with strictly positive weight, so equal backlogs move nothing.
    auto link_weight = [&](std::size_t i, std::size_t j, std::size_t& best_c) {
        double best = -kInf;
        best_c = N;  // none
        for (std::size_t c = 0; c < N; ++c) {
            if (c == i) continue;  // data destined here never leaves
            double w = weight(i, j, c);
            if (w > best) {
                best = w;
                best_c = c;
            }
        }
        return best;
    };

    std::size_t chosen = 0;
    if (forced_option) {
        chosen = *forced_option;
        if (chosen >= options.size())
            throw std::invalid_argument("forced option index out of range");
    } else {
        double best_score = -kInf;
        for (std::size_t o = 0; o < options.size(); ++o) {
            double score = 0.0;
            for (const RateEntry& e : options[o]) {
                std::size_t c;
                score += e.rate * std::max(link_weight(e.from, e.to, c), 0.0);
            }
            if (score > best_score) {
                best_score = score;
                chosen = o;
            }
        }
    }

    TransmitResult out;
    out.option = chosen;
    out.mu = MuMatrix::zeros(N);
    for (const RateEntry& e : options[chosen]) {
        std::size_t c;
        double w = link_weight(e.from, e.to, c);
        if (c < N && w > 0.0) out.mu.at(e.from, e.to, c) = e.rate;
    }
    return out;
}

}  // namespace

TransmitResult maxweight_transmit(const Model& model, const QueueMatrix& queues,
                                  std::size_t state_id) {
    auto weight = [&](std::size_t i, std::size_t j, std::size_t c) {
        return queues.at(i, c) - queues.at(j, c);
    };
    return assign_by_weights(model, state_id, weight, std::nullopt);
}

TransmitResult capprox_transmit(const Model& model, const QueueMatrix& queues,
                                std::size_t state_id, double q_max,
                                std::optional<std::size_t> forced_option) {
    auto weight = [&](std::size_t i, std::size_t j, std::size_t c) {
        if (queues.at(j, c) > q_max - model.beta_node[j]) return -1.0;
        return queues.at(i, c) - queues.at(j, c) + model.bias.at(i, c) - model.bias.at(j, c);
    };
    return assign_by_weights(model, state_id, weight, forced_option);
}

QueueMatrix commodity_queue_update(const Model& model, const QueueMatrix& queues,
                                   const MuMatrix& mu, std::span<const double> admitted) {
    const std::size_t N = model.nodes;
    QueueMatrix next = QueueMatrix::zeros(N);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t c = 0; c < N; ++c) {
            if (n == c) continue;  // removed at the destination
            double out = 0.0, in = 0.0;
            for (std::size_t j = 0; j < N; ++j) out += mu.at(n, j, c);
            for (std::size_t i = 0; i < N; ++i) in += mu.at(i, n, c);
            double exog = 0.0;
            for (std::size_t m = 0; m < model.sessions.size(); ++m) {
                const Session& s = model.sessions[m];
                if (s.source == n && s.dest == c) exog += admitted[m];
            }
            next.at(n, c) = core::update_actual_queue(queues.at(n, c), out, in + exog);
        }
    }
    return next;
}

double compute_qmax(double V, double nu_max, double a_max, double beta_max) {
    return V * nu_max + a_max + beta_max;
}

CApproxCheck verify_capprox(const Model& model, const QueueMatrix& queues,
                            std::size_t state_id, double q_max, double C) {
    const std::size_t N = model.nodes;
    const auto& options = model.states.at(state_id).options;
    auto true_weight = [&](std::size_t i, std::size_t j) {
        double best = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            if (c == i) continue;
            best = std::max(best, queues.at(i, c) - queues.at(j, c));
        }
        return best;  // max_c max(W, 0)
    };
    auto gated_weight = [&](std::size_t i, std::size_t j) {
        double best = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            if (c == i) continue;
            double w = queues.at(j, c) > q_max - model.beta_node[j]
                           ? -1.0
                           : queues.at(i, c) - queues.at(j, c) + model.bias.at(i, c) -
                                 model.bias.at(j, c);
            best = std::max(best, w);
        }
        return std::max(best, 0.0);
    };

    CApproxCheck chk;
    chk.exact_score = -kInf;
    for (const RateOption& opt : options) {
        double s = 0.0;
        for (const RateEntry& e : opt) s += e.rate * true_weight(e.from, e.to);
        chk.exact_score = std::max(chk.exact_score, s);
    }

    TransmitResult gated = capprox_transmit(model, queues, state_id, q_max);
    chk.achieved_score = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t c = 0; c < N; ++c)
                chk.achieved_score += gated.mu.at(i, j, c) * (queues.at(i, c) - queues.at(j, c));

    double diff = 0.0;
    for (const RateEntry& e : options[gated.option])
        diff += e.rate * (true_weight(e.from, e.to) - gated_weight(e.from, e.to));
    chk.half_bound = std::abs(diff);
    chk.half_holds = chk.half_bound <= C / 2.0 + kSlack;

    chk.gap = chk.exact_score - chk.achieved_score;
    chk.holds = chk.gap <= C + kSlack;
    return chk;
}

std::vector<core::AttributeEvaluation> Model::enumerate_actions(
    const MultihopEvent& ev, std::uint64_t budget) const {
    const std::size_t N = nodes;
    const std::size_t M = sessions.size();
    if (ev.arrivals.size() != M) throw std::invalid_argument("arrival vector width != M");
    const auto& options = states.at(ev.state).options;

    const std::size_t K = N * (N - 1);
    // Budget: sum over options of 2^M admission masks times (N+1) commodity
    // choices per positive-rate link (idle plus N commodities; invalid
    // c == from combinations are filtered later).
    double total = 0.0;
    for (const RateOption& opt : options) {
        double combos = static_cast<double>(std::size_t{1} << M);
        for (const RateEntry& e : opt)
            if (e.rate > 0.0) combos *= static_cast<double>(N + 1);
        total += combos;
    }
    if (total > static_cast<double>(budget)) throw oracle::BudgetExceeded(total);

    std::vector<core::AttributeEvaluation> out;
    for (std::size_t o = 0; o < options.size(); ++o) {
        const RateOption& opt = options[o];
        std::vector<const RateEntry*> live;
        for (const RateEntry& e : opt)
            if (e.rate > 0.0) live.push_back(&e);

        std::vector<std::size_t> pick(live.size(), 0);  // 0 = idle, 1+c = commodity c
        while (true) {
            for (std::size_t mask = 0; mask < (std::size_t{1} << M); ++mask) {
                core::AttributeEvaluation e2;
                e2.arrivals.assign(K, 0.0);
                e2.services.assign(K, 0.0);
                e2.attributes.assign(M, 0.0);
                e2.penalties.assign(1, 0.0);
                for (std::size_t m = 0; m < M; ++m) {
                    if (!(mask & (std::size_t{1} << m))) continue;
                    e2.attributes[m] = ev.arrivals[m];
                    e2.arrivals[queue_index(sessions[m].source, sessions[m].dest, N)] +=
                        ev.arrivals[m];
                }
                bool valid = true;
                for (std::size_t t = 0; t < live.size(); ++t) {
                    if (pick[t] == 0) continue;
                    std::size_t c = pick[t] - 1;
                    const RateEntry& re = *live[t];
                    if (c == re.from) {
                        valid = false;
                        break;
                    }
                    e2.services[queue_index(re.from, c, N)] += re.rate;
                    if (re.to != c)
                        e2.arrivals[queue_index(re.to, c, N)] += re.rate;
                }
                if (valid) out.push_back(std::move(e2));
            }
            std::size_t t = 0;
            for (; t < live.size(); ++t) {
                if (++pick[t] <= N) break;
                pick[t] = 0;
            }
            if (t == live.size()) break;
        }
    }
    return out;
}

core::ActionTable Model::action_table(std::span<const MultihopEvent> events,
                                      std::uint64_t budget) const {
    core::ActionTable table;
    table.reserve(events.size());
    for (const auto& ev : events) table.push_back(enumerate_actions(ev, budget));
    return table;
}

Simulator::Simulator(const Model& model, double V, TransmitMode mode,
                     OptionSelector selector)
    : model_(model), V_(V), mode_(mode), selector_(std::move(selector)) {
    queues_ = QueueMatrix::zeros(model.nodes);
    H_.assign(model.sessions.size(), 0.0);
}

core::SlotRecord Simulator::step(const MultihopEvent& event) {
    const std::size_t N = model_.nodes;
    const std::size_t M = model_.sessions.size();
    if (event.slot != slot_)
        throw std::invalid_argument("multihop step: event slot disagrees with state");
    if (event.arrivals.size() != M)
        throw std::invalid_argument("multihop step: arrival vector width != M");
    for (std::size_t m = 0; m < M; ++m) {
        if (event.arrivals[m] < -kSlack ||
            event.arrivals[m] > model_.sessions[m].a_max + kSlack)
            throw std::domain_error("session arrival outside [0, A_max]");
    }

    std::vector<double> gamma(M), admitted(M);
    for (std::size_t m = 0; m < M; ++m) {
        const Session& s = model_.sessions[m];
        core::ScalarTerm term = s.utility.as_cost_term();
        gamma[m] = term.argmin(V_, H_[m], Interval{0.0, s.a_max});
        admitted[m] = flow_control(event.arrivals[m], H_[m],
                                   queues_.at(s.source, s.dest));
    }

    TransmitResult tx;
    if (mode_ == TransmitMode::Exact) {
        tx = maxweight_transmit(model_, queues_, event.state);
    } else {
        std::optional<std::size_t> forced;
        if (selector_) forced = selector_(event, queues_);
        tx = capprox_transmit(model_, queues_, event.state, model_.qmax(V_), forced);
    }

    QueueMatrix next = commodity_queue_update(model_, queues_, tx.mu, admitted);

    core::SlotRecord rec;
    rec.slot = event.slot;
    rec.event_id = event.event_id;
    rec.action_index = tx.option;
    rec.gamma = gamma;
    rec.eval.attributes = admitted;
    rec.eval.penalties.assign(1, 0.0);
    const std::size_t K = N * (N - 1);
    rec.eval.arrivals.assign(K, 0.0);
    rec.eval.services.assign(K, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t c = 0; c < N; ++c) {
            if (n == c) continue;
            std::size_t k = queue_index(n, c, N);
            double out = 0.0, in = 0.0;
            for (std::size_t j = 0; j < N; ++j) out += tx.mu.at(n, j, c);
            for (std::size_t i = 0; i < N; ++i) in += tx.mu.at(i, n, c);
            rec.eval.services[k] = out;
            rec.eval.arrivals[k] = in;
        }
    }
    for (std::size_t m = 0; m < M; ++m) {
        const Session& s = model_.sessions[m];
        rec.eval.arrivals[queue_index(s.source, s.dest, N)] += admitted[m];
    }

    for (std::size_t m = 0; m < M; ++m)
        H_[m] = core::update_virtual_h(H_[m], gamma[m], admitted[m]);
    queues_ = std::move(next);
    ++slot_;

    rec.queues_after.Q.resize(K);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < N; ++c)
            if (n != c) rec.queues_after.Q[queue_index(n, c, N)] = queues_.at(n, c);
    rec.queues_after.H = H_;
    rec.queues_after.slot = slot_;

    double f_val = 0.0;
    for (std::size_t m = 0; m < M; ++m)
        f_val -= model_.sessions[m].utility.value(gamma[m]);
    rec.objective_term = V_ * f_val;
    return rec;
}

core::Trace Simulator::run(std::span<const MultihopEvent> events) {
    core::Trace trace;
    trace.reserve(events.size());
    for (const auto& ev : events) trace.push_back(step(ev));
    return trace;
}

}  // namespace dpp::multihop
