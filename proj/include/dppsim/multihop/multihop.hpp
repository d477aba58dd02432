#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dppsim/core/cost_terms.hpp"
#include "dppsim/core/types.hpp"

namespace dpp::multihop {

struct RateEntry {
    std::size_t from = 0, to = 0;
    double rate = 0.0;
};
using RateOption = std::vector<RateEntry>;  // C_ij for one resource choice I

struct TopologyState {
    std::vector<RateOption> options;  // finite set I_S
};

struct Session {
    std::size_t source = 0, dest = 0;
    double a_max = 1.0;
    core::UtilitySpec utility;
};

struct MultihopEvent {
    std::int64_t slot = 0;
    std::size_t event_id = 0;
    std::size_t state = 0;          // topology state id
    std::vector<double> arrivals;   // size M
};

// Non-negative per-(node, commodity) routing bias.
struct BiasWeights {
    std::size_t nodes = 0;
    std::vector<double> theta;  // nodes x nodes, theta[n*N + c]

    static BiasWeights zero(std::size_t nodes);
    double at(std::size_t n, std::size_t c) const { return theta[n * nodes + c]; }
    double diff() const;  // max |theta_i^c - theta_j^c| over i, j, c
};

// Commodity queues as a dense N x N matrix, destination diagonal pinned to 0.
struct QueueMatrix {
    std::size_t nodes = 0;
    std::vector<double> q;  // q[n*N + c]

    static QueueMatrix zeros(std::size_t nodes);
    double at(std::size_t n, std::size_t c) const { return q[n * nodes + c]; }
    double& at(std::size_t n, std::size_t c) { return q[n * nodes + c]; }
    double max_value() const;
};

// Offered rates mu_ij^(c), dense N x N x N.
struct MuMatrix {
    std::size_t nodes = 0;
    std::vector<double> mu;  // mu[(i*N + j)*N + c]

    static MuMatrix zeros(std::size_t nodes);
    double at(std::size_t i, std::size_t j, std::size_t c) const {
        return mu[(i * nodes + j) * nodes + c];
    }
    double& at(std::size_t i, std::size_t j, std::size_t c) {
        return mu[(i * nodes + j) * nodes + c];
    }
};

// Flattened (n, c) index with the diagonal removed; matches the general
// framework's queue index k.
std::size_t queue_index(std::size_t n, std::size_t c, std::size_t nodes);

struct Model {
    std::size_t nodes = 0;
    std::vector<Session> sessions;
    std::vector<TopologyState> states;
    BiasWeights bias;  // defaults to zero at build()

    // Derived by build():
    std::vector<double> mu_max;          // per (i,j): max C_ij over states/options
    std::vector<double> mu_in_max;       // per node: max sum inflow over options
    std::vector<double> mu_out_max;      // per node: max sum outflow over options
    std::vector<double> mu_sum_max;      // per node: max in+out over options
    std::vector<double> beta_node;       // per node: max one-slot inflow of one commodity
    double beta_max = 0.0;
    double c_sum_max = 0.0;              // max sum of all rates over states/options

    void build();
    double nu_max() const;
    double a_max_overall() const;
    double qmax(double V) const;         // V*nu_max + A^max + beta^max
    double capprox_C() const;            // 2*C_sum*(beta_max + theta_diff)
    double exog_max(std::size_t n, std::size_t c) const;  // sum A_m over sessions n->c

    core::ProblemFrame frame() const;
    std::vector<core::AttributeEvaluation> enumerate_actions(const MultihopEvent& ev,
                                                             std::uint64_t budget) const;
    core::ActionTable action_table(std::span<const MultihopEvent> events,
                                   std::uint64_t budget = 10'000'000) const;
};

// x_m = arrival if Q_source^(dest) <= H, else 0.
double flow_control(double arrival, double H, double q_source_dest);

struct TransmitResult {
    std::size_t option = 0;
    MuMatrix mu;
};

// Generalized max-weight: differential backlogs W_ij^(c) = Q_i^(c) - Q_j^(c),
// option maximizing sum C_ij * max_c max(W,0), full rate to the argmax
// commodity when its weight is non-negative.  Ties break to lowest index.
TransmitResult maxweight_transmit(const Model& model, const QueueMatrix& queues,
                                  std::size_t state_id);

// Receiver-gated variant: W-hat = W + theta_i - theta_j when the receiver is
// below Q^max - beta_j, and -1 otherwise.  forced_option overrides the
// option selection (the bounded-queue lemma allows any rule) while keeping
// the transmission assignment.
TransmitResult capprox_transmit(const Model& model, const QueueMatrix& queues,
                                std::size_t state_id, double q_max,
                                std::optional<std::size_t> forced_option = {});

// Q'(n,c) = max(Q - sum_j mu_nj^(c), 0) + sum_i mu_in^(c) + exogenous;
// destination diagonal forced to zero.
QueueMatrix commodity_queue_update(const Model& model, const QueueMatrix& queues,
                                   const MuMatrix& mu, std::span<const double> admitted);

double compute_qmax(double V, double nu_max, double a_max, double beta_max);

struct CApproxCheck {
    double exact_score = 0.0;     // max_I sum C_ij W_ij
    double achieved_score = 0.0;  // true-weight value of the gated decision
    double gap = 0.0;
    bool holds = false;           // gap <= C
    double half_bound = 0.0;      // |sum C_ij (W_ij - W-hat_ij)| on the chosen option
    bool half_holds = false;      // half_bound <= C/2
};

CApproxCheck verify_capprox(const Model& model, const QueueMatrix& queues,
                            std::size_t state_id, double q_max, double C);

enum class TransmitMode { Exact, CApprox };

class Simulator {
public:
    using OptionSelector =
        std::function<std::size_t(const MultihopEvent&, const QueueMatrix&)>;

    Simulator(const Model& model, double V, TransmitMode mode,
              OptionSelector selector = nullptr);

    core::SlotRecord step(const MultihopEvent& event);
    core::Trace run(std::span<const MultihopEvent> events);

    const QueueMatrix& queues() const { return queues_; }
    const std::vector<double>& H() const { return H_; }

private:
    const Model& model_;
    double V_;
    TransmitMode mode_;
    OptionSelector selector_;
    QueueMatrix queues_;
    std::vector<double> H_;
    std::int64_t slot_ = 0;
};

}  // namespace dpp::multihop
