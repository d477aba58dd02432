#pragma once

#include <string>

#include "dppsim/core/types.hpp"

namespace dpp::core {

struct Averages {
    std::vector<double> x, y, a, b, gamma;  // y has size L+1
};

// Arithmetic means of each attribute over slots 0..t-1.
Averages time_averages(const Trace& trace, std::size_t t);

// Cost metric ybar_0 + f(xbar) over the first t slots.
double prefix_cost(const ProblemFrame& frame, const Trace& trace, std::size_t t);

// Per-constraint residuals vs. their queue-derived bounds at one prefix:
//   queues:  abar_k - bbar_k            <=  (Q_k(t) - Q_k(0)) / t
//   Z:       ybar_l + g_l(xbar)         <=  (Z_l(t) - Z_l(0)) / t
//                                          + sum_m beta_{l,m} |H_m(t) - H_m(0)| / t
//   X:       gammabar in X  and  |gammabar_m - xbar_m| = |H_m(t) - H_m(0)| / t
struct ResidualReport {
    std::size_t t_end = 0;
    std::vector<double> queue_residual, queue_bound;  // size K
    std::vector<double> z_residual, z_bound;          // size L
    std::vector<double> x_displacement;               // |H_m(t)-H_m(0)|/t, size M
    std::vector<double> gamma_mean;                   // gammabar, size M
    bool x_set_ok = true;          // gammabar in X
    bool displacement_match = true;  // |gammabar - xbar| equals |dH|/t
    std::vector<std::string> flags;  // residuals exceeding their bounds

    bool all_within() const { return flags.empty() && x_set_ok && displacement_match; }
};

ResidualReport constraint_residuals(const Trace& trace, const ProblemFrame& frame,
                                    std::size_t t_end, const QueueState& initial);

// Streaming checker used to assert the Lemma-1 bounds at every prefix of a
// trace in O(t_end * (K+L+M)) total work.
class PrefixResidualChecker {
public:
    PrefixResidualChecker(const ProblemFrame& frame, const QueueState& initial);

    // Feeds slot records in order; returns false (and records a message) on
    // the first prefix whose residuals exceed their bounds by more than
    // kSlack.
    bool feed(const SlotRecord& rec);
    bool ok() const { return failures_.empty(); }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    const ProblemFrame& frame_;
    QueueState initial_;
    std::vector<double> sum_a_, sum_b_, sum_x_, sum_y_, sum_gamma_;
    std::vector<double> xbar_, gbar_, disp_;  // scratch
    std::size_t count_ = 0;
    std::vector<std::string> failures_;
};

}  // namespace dpp::core
