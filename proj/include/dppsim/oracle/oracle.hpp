#pragma once

#include <string>
#include <vector>

#include "dppsim/core/algorithm.hpp"
#include "dppsim/core/types.hpp"

namespace dpp::oracle {

using core::ActionTable;
using core::AttributeEvaluation;
using core::ProblemFrame;
using core::SystemModel;
using core::Trace;

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

struct FrameInfeasible : std::runtime_error {
    std::size_t frame_index;
    explicit FrameInfeasible(std::size_t r)
        : std::runtime_error("no feasible action sequence in frame " + std::to_string(r)),
          frame_index(r) {}
};

struct BudgetExceeded : std::runtime_error {
    double required;
    explicit BudgetExceeded(double n)
        : std::runtime_error("enumeration budget exceeded: " + std::to_string(n) +
                             " sequences required"),
          required(n) {}
};

struct FrameSolution {
    std::size_t frame_index = 0;
    std::size_t T = 0;
    double F_star = 0.0;
    std::vector<std::size_t> argmin;     // action index per slot of the frame
    std::vector<double> gamma_frame;     // frame average of x under argmin
    bool feasible = false;
};

// Exhaustive T-slot lookahead optimum over one frame: minimize the frame
// cost h0 + f(gamma) subject to h_l + g_l(gamma) <= 0, gamma in X, and
// frame-average a_k <= b_k.  Ties break to the lexicographically smallest
// action sequence.  Throws BudgetExceeded when the sequence count passes the
// cap and FrameInfeasible when no sequence satisfies the constraints (which
// cannot happen under Assumption A2).
FrameSolution frame_optimum(const ProblemFrame& frame,
                            std::span<const std::vector<AttributeEvaluation>> slots,
                            std::size_t frame_index = 0,
                            std::uint64_t budget = kDefaultBudget);

// (1/R) sum_r F_r* over R consecutive frames of T slots.
double frame_benchmark(const ProblemFrame& frame, const ActionTable& table,
                       std::size_t T, std::size_t R,
                       std::uint64_t budget = kDefaultBudget);

// Full-horizon optimum: a single frame spanning the whole table.
FrameSolution full_horizon_optimum(const ProblemFrame& frame, const ActionTable& table,
                                   std::uint64_t budget = kDefaultBudget);

struct TheoremCheck {
    bool holds = false;
    double slack = 0.0;  // rhs - lhs
    double lhs = 0.0, rhs = 0.0;
    double benchmark = 0.0;
};

// Theorem-1c inequality over RT slots against the frame benchmark:
//   ybar_0 + f(xbar) <= benchmark + (B+C)/V + D(T-1)/V + L(Theta(0))/(VRT)
//                       + sum_m nu_m |H_m(RT) - H_m(0)| / (RT)
TheoremCheck verify_theorem_1c(const ProblemFrame& frame, const ActionTable& table,
                               const Trace& trace, std::size_t T, std::size_t R,
                               double V, double C, double B, double D,
                               std::uint64_t budget = kDefaultBudget);

// Finite irreducible Markov chain over event ids with seeded sampling.
struct MarkovChainSpec {
    std::vector<std::vector<double>> P;  // row-stochastic transition matrix
    std::size_t initial_state = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> event_of_state;  // empty means identity

    void validate() const;  // throws ConfigError on a reducible chain
    std::vector<core::EventSample> sample(std::size_t horizon) const;
};

struct ErgodicRow {
    std::size_t T = 0;
    double mean_frame_opt = 0.0;  // mean F_r* across frames of size T
    double achieved = 0.0;        // algorithm's cost over the same horizon
    double gap = 0.0;             // achieved - mean F_r* - (B+C)/V - D(T-1)/V
};

// Simulates the chain over the horizon, runs the algorithm once, and compares
// the achieved long-run cost against the frame benchmark for each T.
std::vector<ErgodicRow> ergodic_reference(const SystemModel& model,
                                          const MarkovChainSpec& chain,
                                          std::span<const std::size_t> T_list,
                                          std::size_t horizon, double V,
                                          const core::ApproximationPolicy& approx,
                                          double B, double D,
                                          std::uint64_t budget = kDefaultBudget);

}  // namespace dpp::oracle
