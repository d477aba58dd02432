#include "dppsim/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dppsim/core/averages.hpp"
#include "dppsim/core/queues.hpp"

namespace dpp::oracle {

namespace {

struct FrameSums {
    std::vector<double> a, b, x, y;  // y has size L+1
};

// Depth-first odometer over action sequences; visits sequences in
// lexicographic order so the first strict improvement is the lex-smallest
// argmin.
class FrameEnumerator {
public:
    FrameEnumerator(const ProblemFrame& frame,
                    std::span<const std::vector<AttributeEvaluation>> slots)
        : frame_(frame), slots_(slots), T_(slots.size()) {
        sums_.a.assign(frame.K, 0.0);
        sums_.b.assign(frame.K, 0.0);
        sums_.x.assign(frame.M, 0.0);
        sums_.y.assign(frame.L + 1, 0.0);
        choice_.assign(T_, 0);
        gamma_.assign(frame_.M, 0.0);
    }

    FrameSolution solve(std::size_t frame_index) {
        best_.frame_index = frame_index;
        best_.T = T_;
        best_.feasible = false;
        descend(0);
        if (!best_.feasible) throw FrameInfeasible(frame_index);
        return best_;
    }

private:
    void descend(std::size_t depth) {
        if (depth == T_) {
            evaluate();
            return;
        }
        const auto& actions = slots_[depth];
        for (std::size_t i = 0; i < actions.size(); ++i) {
            choice_[depth] = i;
            add(actions[i], 1.0);
            descend(depth + 1);
            add(actions[i], -1.0);
        }
    }

    void add(const AttributeEvaluation& e, double sign) {
        for (std::size_t k = 0; k < frame_.K; ++k) {
            sums_.a[k] += sign * e.arrivals[k];
            sums_.b[k] += sign * e.services[k];
        }
        for (std::size_t m = 0; m < frame_.M; ++m) sums_.x[m] += sign * e.attributes[m];
        for (std::size_t l = 0; l <= frame_.L; ++l) sums_.y[l] += sign * e.penalties[l];
    }

    void evaluate() {
        const double inv = 1.0 / static_cast<double>(T_);
        for (std::size_t k = 0; k < frame_.K; ++k) {
            if ((sums_.a[k] - sums_.b[k]) * inv > kSlack) return;
        }
        for (std::size_t m = 0; m < frame_.M; ++m) gamma_[m] = sums_.x[m] * inv;
        if (!frame_.cost.in_x_set(gamma_, kSlack)) return;
        for (std::size_t l = 0; l < frame_.L; ++l) {
            if (sums_.y[l + 1] * inv + frame_.cost.g_value(l, gamma_) > kSlack) return;
        }
        double cost = sums_.y[0] * inv + frame_.cost.f_value(gamma_);
        if (!best_.feasible || cost < best_.F_star) {
            best_.feasible = true;
            best_.F_star = cost;
            best_.argmin = choice_;
            best_.gamma_frame = gamma_;
        }
    }

    const ProblemFrame& frame_;
    std::span<const std::vector<AttributeEvaluation>> slots_;
    std::size_t T_;
    FrameSums sums_;
    std::vector<std::size_t> choice_;
    std::vector<double> gamma_;
    FrameSolution best_;
};

void check_budget(std::span<const std::vector<AttributeEvaluation>> slots,
                  std::uint64_t budget) {
    double count = 1.0;
    for (const auto& s : slots) {
        if (s.empty()) throw std::invalid_argument("frame_optimum: empty action set");
        count *= static_cast<double>(s.size());
        if (count > static_cast<double>(budget)) throw BudgetExceeded(count);
    }
}

}  // namespace

FrameSolution frame_optimum(const ProblemFrame& frame,
                            std::span<const std::vector<AttributeEvaluation>> slots,
                            std::size_t frame_index, std::uint64_t budget) {
    if (slots.empty()) throw std::invalid_argument("frame_optimum: T must be >= 1");
    check_budget(slots, budget);
    FrameEnumerator e(frame, slots);
    return e.solve(frame_index);
}

double frame_benchmark(const ProblemFrame& frame, const ActionTable& table,
                       std::size_t T, std::size_t R, std::uint64_t budget) {
    if (T == 0 || R == 0) throw std::invalid_argument("frame_benchmark: T, R >= 1");
    if (table.size() < T * R)
        throw std::invalid_argument("frame_benchmark: event sequence shorter than R*T");
    double sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        std::span<const std::vector<AttributeEvaluation>> slots(table.data() + r * T, T);
        sum += frame_optimum(frame, slots, r, budget).F_star;
    }
    return sum / static_cast<double>(R);
}

FrameSolution full_horizon_optimum(const ProblemFrame& frame, const ActionTable& table,
                                   std::uint64_t budget) {
    return frame_optimum(frame, table, 0, budget);
}

TheoremCheck verify_theorem_1c(const ProblemFrame& frame, const ActionTable& table,
                               const Trace& trace, std::size_t T, std::size_t R,
                               double V, double C, double B, double D,
                               std::uint64_t budget) {
    const std::size_t horizon = T * R;
    if (trace.size() != horizon)
        throw std::invalid_argument("verify_theorem_1c: trace length != R*T");
    if (!(V > 0.0)) throw std::domain_error("verify_theorem_1c: V must be positive");

    TheoremCheck out;
    out.benchmark = frame_benchmark(frame, table, T, R, budget);
    out.lhs = core::prefix_cost(frame, trace, horizon);

    // Zero initial queues by precondition; the L(Theta(0)) term vanishes and
    // H_m(0) = 0.
    const core::QueueState& last = trace.back().queues_after;
    double h_term = 0.0;
    for (std::size_t m = 0; m < frame.M; ++m)
        h_term += frame.cost.nu[m] * std::abs(last.H[m]) / static_cast<double>(horizon);
    out.rhs = out.benchmark + (B + C) / V +
              D * static_cast<double>(T - 1) / V + h_term;
    out.slack = out.rhs - out.lhs;
    out.holds = out.lhs <= out.rhs + kSlack;
    return out;
}

void MarkovChainSpec::validate() const {
    const std::size_t n = P.size();
    if (n == 0) throw ConfigError("markov chain: empty transition matrix");
    for (const auto& row : P) {
        if (row.size() != n) throw ConfigError("markov chain: non-square matrix");
        double s = 0.0;
        for (double p : row) {
            if (p < 0.0) throw ConfigError("markov chain: negative probability");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) throw ConfigError("markov chain: row does not sum to 1");
    }
    if (initial_state >= n) throw ConfigError("markov chain: initial state out of range");
    if (!event_of_state.empty() && event_of_state.size() != n)
        throw ConfigError("markov chain: event map size mismatch");
    // Irreducibility: every state reachable from 0 and 0 reachable from all.
    auto reach = [&](bool forward) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                double p = forward ? P[u][v] : P[v][u];
                if (p > 0.0 && !seen[v]) {
                    seen[v] = true;
                    stack.push_back(v);
                }
            }
        }
        return seen;
    };
    auto fwd = reach(true), bwd = reach(false);
    for (std::size_t s = 0; s < n; ++s) {
        if (!fwd[s] || !bwd[s]) throw ConfigError("markov chain: reducible chain");
    }
}

std::vector<core::EventSample> MarkovChainSpec::sample(std::size_t horizon) const {
    validate();
    CounterRng rng(seed);
    std::vector<core::EventSample> events;
    events.reserve(horizon);
    std::size_t state = initial_state;
    for (std::size_t t = 0; t < horizon; ++t) {
        std::size_t id = event_of_state.empty() ? state : event_of_state[state];
        events.push_back({static_cast<std::int64_t>(t), id});
        double u = rng.next_double();
        double acc = 0.0;
        std::size_t next = P[state].size() - 1;
        for (std::size_t v = 0; v < P[state].size(); ++v) {
            acc += P[state][v];
            if (u < acc) {
                next = v;
                break;
            }
        }
        state = next;
    }
    return events;
}

std::vector<ErgodicRow> ergodic_reference(const SystemModel& model,
                                          const MarkovChainSpec& chain,
                                          std::span<const std::size_t> T_list,
                                          std::size_t horizon, double V,
                                          const core::ApproximationPolicy& approx,
                                          double B, double D, std::uint64_t budget) {
    std::vector<core::EventSample> events = chain.sample(horizon);
    ActionTable table = make_action_table(model, events);
    Trace trace = core::run(model, events, V, approx,
                            core::QueueState::zeros(model.frame.K, model.frame.L,
                                                    model.frame.M));
    const double C = approx.C;
    std::vector<ErgodicRow> rows;
    for (std::size_t T : T_list) {
        if (T == 0) throw std::invalid_argument("ergodic_reference: T must be >= 1");
        std::size_t R = horizon / T;
        if (R == 0) throw std::invalid_argument("ergodic_reference: horizon shorter than T");
        ErgodicRow row;
        row.T = T;
        row.mean_frame_opt = frame_benchmark(model.frame, table, T, R, budget);
        row.achieved = core::prefix_cost(model.frame, trace, R * T);
        row.gap = row.achieved - row.mean_frame_opt - (B + C) / V -
                  D * static_cast<double>(T - 1) / V;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace dpp::oracle
