#include "dppsim/bounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dpp::bounds {

DiffConstants diff_constants(const ProblemFrame& frame) {
    DiffConstants d;
    d.z_diff.resize(frame.L);
    for (std::size_t l = 0; l < frame.L; ++l) {
        const Interval& yr = frame.bounds.y_range[l + 1];
        d.z_diff[l] = std::max(std::abs(yr.hi + frame.cost.g_max[l]),
                               std::abs(yr.lo + frame.cost.g_min[l]));
    }
    d.q_diff.resize(frame.K);
    for (std::size_t k = 0; k < frame.K; ++k)
        d.q_diff[k] = std::max(frame.bounds.b_max[k], frame.bounds.a_max[k]);
    d.h_diff.resize(frame.M);
    for (std::size_t m = 0; m < frame.M; ++m)
        d.h_diff[m] = std::abs(frame.bounds.x_range[m].width());
    d.z_max = 0.0;
    for (double v : d.z_diff) d.z_max = std::max(d.z_max, v);
    for (double v : d.q_diff) d.z_max = std::max(d.z_max, v);
    for (double v : d.h_diff) d.z_max = std::max(d.z_max, v);
    return d;
}

double constant_B(const ProblemFrame& frame) {
    DiffConstants d = diff_constants(frame);
    double b = 0.0;
    for (double z : d.z_diff) b += 0.5 * z * z;
    for (double h : d.h_diff) b += 0.5 * h * h;
    for (std::size_t k = 0; k < frame.K; ++k) {
        b += 0.5 * (frame.bounds.b_max[k] * frame.bounds.b_max[k] +
                    frame.bounds.a_max[k] * frame.bounds.a_max[k]);
    }
    return b;
}

double constant_D(const ProblemFrame& frame) {
    DiffConstants d = diff_constants(frame);
    double v = 0.0;
    for (double z : d.z_diff) v += 0.5 * z * z;
    for (double h : d.h_diff) v += 0.5 * h * h;
    for (double q : d.q_diff) v += 0.5 * q * q;
    return v;
}

double constant_C0(double B, double C, double V, double y0_range, double f_range) {
    if (!(V > 0.0)) throw std::domain_error("constant_C0: V must be positive");
    return std::sqrt(2.0 * ((B + C) / V + y0_range + f_range));
}

double queue_bound_at(double t, double V, double C0, double L0) {
    return std::sqrt(t * V * C0 * C0 + 2.0 * L0);
}

double constant_C1(double B, double C, double D, double T) {
    if (!(T > 0.0)) throw std::domain_error("constant_C1: T must be positive");
    return (B + C - D) / T + D;
}

double constant_C2(double C0, const ProblemFrame& frame) {
    double s = 0.0;
    for (double nu : frame.cost.nu) s += nu;
    return C0 * s;
}

double slot_quadratic_sum(const ProblemFrame& frame, const core::AttributeEvaluation& eval,
                          std::span<const double> gamma) {
    double s = 0.0;
    for (std::size_t l = 0; l < frame.L; ++l) {
        double v = eval.penalties[l + 1] + frame.cost.g_value(l, gamma);
        s += 0.5 * v * v;
    }
    for (std::size_t k = 0; k < frame.K; ++k) {
        s += 0.5 * (eval.services[k] * eval.services[k] +
                    eval.arrivals[k] * eval.arrivals[k]);
    }
    for (std::size_t m = 0; m < frame.M; ++m) {
        double v = gamma[m] - eval.attributes[m];
        s += 0.5 * v * v;
    }
    return s;
}

double slot_weighted_sum(const ProblemFrame& frame, const DiffConstants& diff,
                         const core::AttributeEvaluation& eval,
                         std::span<const double> gamma) {
    double s = 0.0;
    for (std::size_t l = 0; l < frame.L; ++l)
        s += 0.5 * diff.z_diff[l] *
             std::abs(eval.penalties[l + 1] + frame.cost.g_value(l, gamma));
    for (std::size_t m = 0; m < frame.M; ++m)
        s += 0.5 * diff.h_diff[m] * std::abs(eval.attributes[m] - gamma[m]);
    for (std::size_t k = 0; k < frame.K; ++k)
        s += 0.5 * diff.q_diff[k] * std::max(eval.services[k], eval.arrivals[k]);
    return s;
}

std::pair<double, double> network_B_D(const NetworkBoundsInput& in) {
    const std::size_t N = in.mu_max_sum.size();
    if (in.mu_max_in.size() != N || in.x_max.size() != N || in.e.size() != N)
        throw std::invalid_argument("network_B_D: per-node vectors disagree in size");
    double half_a2 = 0.0;
    for (double a : in.session_a_max) half_a2 += 0.5 * a * a;
    double B = half_a2, D = half_a2;
    for (std::size_t n = 0; n < N; ++n) {
        double x_sq = 0.0, x_sum = 0.0, x_best = 0.0;
        for (double x : in.x_max[n]) {
            x_sq += x * x;
            x_sum += x;
            x_best = std::max(x_best, x);
        }
        B += 0.5 * (in.mu_max_sum[n] * in.mu_max_sum[n] + x_sq);
        B += in.mu_max_in[n] * x_best;
        D += 0.5 * in.e[n] * (in.mu_max_sum[n] + x_sum);
    }
    return {B, D};
}

NetworkBoundsInput wireless_unit_network(std::size_t nodes, std::size_t sources) {
    if (sources > nodes)
        throw std::invalid_argument("wireless_unit_network: more sources than nodes");
    NetworkBoundsInput in;
    in.mu_max_sum.assign(nodes, 1.0);
    in.mu_max_in.assign(nodes, 1.0);
    in.x_max.assign(nodes, {});
    in.e.assign(nodes, 1.0);
    for (std::size_t n = 0; n < sources; ++n) {
        in.x_max[n] = {1.0};  // one unit-rate session per source node
        in.e[n] = 2.0;
    }
    in.session_a_max.assign(sources, 1.0);
    return in;
}

double multihop_C(double C_sum, double beta_max, double theta_diff) {
    return 2.0 * C_sum * (beta_max + theta_diff);
}

SlaterConstants slater_constants(const ProblemFrame& frame, const SlaterInput& in) {
    auto violated = [](const std::string& what) {
        throw std::domain_error("Slater hypothesis violated: " + what);
    };
    if (!(in.V > 0.0)) violated("V > 0");
    if (!(in.delta > 0.0)) violated("delta > 0");
    if (!(in.eps_Q < in.delta)) violated("eps_Q < delta");
    if (!(in.eps_H < in.delta)) violated("eps_H < delta");
    for (std::size_t l = 0; l < frame.L; ++l) {
        if (!(in.eps_Z + in.eps_H * frame.cost.beta_row_sum(l) < in.delta)) {
            std::ostringstream os;
            os << "eps_Z + eps_H*beta_sum < delta for l=" << l;
            violated(os.str());
        }
    }
    const double beta_sum = frame.cost.beta_sum_max();
    SlaterConstants out;
    out.theta = std::min({in.delta - in.eps_Q, in.delta - in.eps_H,
                          (in.delta - in.eps_Z - in.eps_H * beta_sum) / (1.0 + beta_sum)});
    double p1 = in.eps_Z == 0.0
                    ? 0.0
                    : in.eps_Z / (in.delta - (in.eps_H + out.theta) * beta_sum);
    double p3 = in.eps_H == 0.0 ? 0.0 : in.eps_H / (in.eps_H + out.theta);
    out.p = std::max({p1, in.eps_Q / in.delta, p3});

    double base = (in.B + in.C) / in.V + frame.y0_range() + frame.f_range() + in.eps_V;
    DiffConstants diff = diff_constants(frame);
    out.D1 = base * base;
    out.D2 = 2.0 * in.D * out.theta * out.theta / (in.V * in.V);
    out.D3 = 2.0 * diff.z_max * out.theta * std::sqrt(out.D1) / in.V;
    out.C3 = std::sqrt(out.D1 + out.D2 + out.D3);

    out.D_tilde = in.D;
    for (double z : diff.z_diff) out.D_tilde += 0.5 * z * in.eps_Z;
    for (double q : diff.q_diff) out.D_tilde += 0.5 * q * in.eps_Q;
    for (double h : diff.h_diff) out.D_tilde += 0.5 * h * in.eps_H;

    out.queue_bound = in.V * out.C3 / out.theta;
    return out;
}

bool BoundCheck::holds() const { return observed <= analytic + kSlack; }

bool BoundReport::all_hold() const {
    for (const auto& c : checks)
        if (!c.holds()) return false;
    return true;
}

}  // namespace dpp::bounds
