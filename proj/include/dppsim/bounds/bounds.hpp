#pragma once

#include <string>
#include <vector>

#include "dppsim/core/types.hpp"

namespace dpp::bounds {

using core::ProblemFrame;

// Maximum one-slot change of each queue:
//   z_l^diff = max(|y_l^max + g_l^max|, |y_l^min + g_l^min|)
//   q_k^diff = max(b_k^max, a_k^max)
//   h_m^diff = x_m^max - x_m^min
struct DiffConstants {
    std::vector<double> z_diff, q_diff, h_diff;
    double z_max = 0.0;  // max over all entries of the three vectors
};

DiffConstants diff_constants(const ProblemFrame& frame);

// Always-valid constants from the A1 bounds:
//   B = 1/2 sum (z_l^diff)^2 + 1/2 sum (h_m^diff)^2
//       + 1/2 sum [(b_k^max)^2 + (a_k^max)^2]
//   D = 1/2 sum (z_l^diff)^2 + 1/2 sum (h_m^diff)^2 + 1/2 sum (q_k^diff)^2
double constant_B(const ProblemFrame& frame);
double constant_D(const ProblemFrame& frame);

// C0 = sqrt(2[(B+C)/V + (y0^max - y0^min) + (f^max - f^min)]); needs V > 0.
double constant_C0(double B, double C, double V, double y0_range, double f_range);

// Queue bound at slot t: sqrt(t*V*C0^2 + 2*L0).
double queue_bound_at(double t, double V, double C0, double L0);

// Reporting constants from the tradeoff discussion.
double constant_C1(double B, double C, double D, double T);
double constant_C2(double C0, const ProblemFrame& frame);

// Per-slot quantities that B and D must dominate on every trace:
//   quadratic: 1/2 sum (y_l + g_l(gamma))^2 + 1/2 sum [b_k^2 + a_k^2]
//              + 1/2 sum (gamma_m - x_m)^2
//   weighted:  1/2 sum z_l^diff |y_l + g_l(gamma)| + 1/2 sum h_m^diff |x_m - gamma_m|
//              + 1/2 sum q_k^diff max(b_k, a_k)
double slot_quadratic_sum(const ProblemFrame& frame, const core::AttributeEvaluation& eval,
                          std::span<const double> gamma);
double slot_weighted_sum(const ProblemFrame& frame, const DiffConstants& diff,
                         const core::AttributeEvaluation& eval,
                         std::span<const double> gamma);

// Per-node inputs for the dynamic-network forms of B and D.
struct NetworkBoundsInput {
    std::vector<double> mu_max_sum;         // per node: max rate in + out
    std::vector<double> mu_max_in;          // per node: max rate in
    std::vector<std::vector<double>> x_max; // per node, per commodity: exogenous max
    std::vector<double> e;                  // per node: max_c max(b^max, a^max)
    std::vector<double> session_a_max;      // A_m^max per session
};

// Network-specific B and D:
//   B = 1/2 sum_n [(mu_n^max,sum)^2 + sum_c (x_n^(c),max)^2]
//       + sum_n mu_n^max,in * max_c x_n^(c),max + 1/2 sum_m (A_m^max)^2
//   D = 1/2 sum_m (A_m^max)^2 + 1/2 sum_n e_n [mu_n^max,sum + sum_c x_n^(c),max]
std::pair<double, double> network_B_D(const NetworkBoundsInput& input);

// Unit-packet wireless special case: per-node rate budget one packet, at most
// one unit session per source node; network_B_D returns (N + 4M)/2 for both.
NetworkBoundsInput wireless_unit_network(std::size_t nodes, std::size_t sources);

// C = 2 * C_sum * (beta_max + theta_diff) for the receiver-gated weights.
double multihop_C(double C_sum, double beta_max, double theta_diff);

struct SlaterInput {
    double delta = 0.0;
    double eps_V = 0.0, eps_Z = 0.0, eps_Q = 0.0, eps_H = 0.0;
    double V = 1.0;
    double B = 0.0, C = 0.0, D = 0.0;
};

struct SlaterConstants {
    double theta = 0.0, p = 0.0;
    double D1 = 0.0, D2 = 0.0, D3 = 0.0, C3 = 0.0;
    double D_tilde = 0.0;
    double queue_bound = 0.0;  // V*C3/theta
};

// Constants of the Slater-condition theorem; throws std::domain_error naming
// the violated hypothesis when eps_Q >= delta, eps_H >= delta, or
// eps_Z + eps_H * beta_row_sum(l) >= delta for some l, or V <= 0.
SlaterConstants slater_constants(const ProblemFrame& frame, const SlaterInput& in);

// One analytic bound paired with the trace maximum it must dominate.
struct BoundCheck {
    std::string name;
    double analytic = 0.0;
    double observed = 0.0;
    bool holds() const;
};

struct BoundReport {
    double B = 0.0, D = 0.0, C = 0.0;
    double C0 = 0.0, C1 = 0.0, C2 = 0.0;
    std::optional<SlaterConstants> slater;
    std::vector<BoundCheck> checks;
    bool all_hold() const;
};

}  // namespace dpp::bounds
