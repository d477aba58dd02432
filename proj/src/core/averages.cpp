#include "dppsim/core/averages.hpp"

#include <cmath>
#include <sstream>

namespace dpp::core {

namespace {

std::vector<double> scaled(const std::vector<double>& sums, double inv) {
    std::vector<double> out(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) out[i] = sums[i] * inv;
    return out;
}

}  // namespace

Averages time_averages(const Trace& trace, std::size_t t) {
    if (t == 0 || t > trace.size())
        throw std::invalid_argument("time_averages: t out of range");
    const auto& first = trace.front();
    std::vector<double> sa(first.eval.arrivals.size(), 0.0);
    std::vector<double> sb(first.eval.services.size(), 0.0);
    std::vector<double> sx(first.eval.attributes.size(), 0.0);
    std::vector<double> sy(first.eval.penalties.size(), 0.0);
    std::vector<double> sg(first.gamma.size(), 0.0);
    for (std::size_t tau = 0; tau < t; ++tau) {
        const SlotRecord& r = trace[tau];
        for (std::size_t i = 0; i < sa.size(); ++i) sa[i] += r.eval.arrivals[i];
        for (std::size_t i = 0; i < sb.size(); ++i) sb[i] += r.eval.services[i];
        for (std::size_t i = 0; i < sx.size(); ++i) sx[i] += r.eval.attributes[i];
        for (std::size_t i = 0; i < sy.size(); ++i) sy[i] += r.eval.penalties[i];
        for (std::size_t i = 0; i < sg.size(); ++i) sg[i] += r.gamma[i];
    }
    const double inv = 1.0 / static_cast<double>(t);
    return {scaled(sx, inv), scaled(sy, inv), scaled(sa, inv), scaled(sb, inv),
            scaled(sg, inv)};
}

double prefix_cost(const ProblemFrame& frame, const Trace& trace, std::size_t t) {
    Averages av = time_averages(trace, t);
    return av.y[0] + frame.cost.f_value(av.x);
}

PrefixResidualChecker::PrefixResidualChecker(const ProblemFrame& frame,
                                             const QueueState& initial)
    : frame_(frame), initial_(initial) {
    sum_a_.assign(frame.K, 0.0);
    sum_b_.assign(frame.K, 0.0);
    sum_x_.assign(frame.M, 0.0);
    sum_y_.assign(frame.L + 1, 0.0);
    sum_gamma_.assign(frame.M, 0.0);
    xbar_.assign(frame.M, 0.0);
    gbar_.assign(frame.M, 0.0);
    disp_.assign(frame.M, 0.0);
}

bool PrefixResidualChecker::feed(const SlotRecord& rec) {
    for (std::size_t k = 0; k < frame_.K; ++k) {
        sum_a_[k] += rec.eval.arrivals[k];
        sum_b_[k] += rec.eval.services[k];
    }
    for (std::size_t l = 0; l <= frame_.L; ++l) sum_y_[l] += rec.eval.penalties[l];
    for (std::size_t m = 0; m < frame_.M; ++m) {
        sum_x_[m] += rec.eval.attributes[m];
        sum_gamma_[m] += rec.gamma[m];
    }
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    const QueueState& q = rec.queues_after;
    auto fail = [&](const char* kind, std::size_t idx, double residual, double bound) {
        std::ostringstream os;
        os << kind << "[" << idx << "] residual " << residual << " > bound " << bound
           << " at prefix " << count_;
        failures_.push_back(os.str());
    };
    for (std::size_t k = 0; k < frame_.K; ++k) {
        double residual = (sum_a_[k] - sum_b_[k]) * inv;
        double bound = (q.Q[k] - initial_.Q[k]) * inv;
        if (residual > bound + kSlack) fail("queue", k, residual, bound);
    }
    for (std::size_t m = 0; m < frame_.M; ++m) {
        xbar_[m] = sum_x_[m] * inv;
        gbar_[m] = sum_gamma_[m] * inv;
        disp_[m] = std::abs(q.H[m] - initial_.H[m]) * inv;
    }
    for (std::size_t l = 0; l < frame_.L; ++l) {
        double residual = sum_y_[l + 1] * inv + frame_.cost.g_value(l, xbar_);
        double bound = (q.Z[l] - initial_.Z[l]) * inv;
        for (std::size_t m = 0; m < frame_.M; ++m)
            bound += frame_.cost.beta[l][m] * disp_[m];
        if (residual > bound + kSlack) fail("z", l, residual, bound);
    }
    if (!frame_.cost.in_x_set(gbar_, kSlack)) {
        std::ostringstream os;
        os << "gamma average outside X at prefix " << count_;
        failures_.push_back(os.str());
    }
    for (std::size_t m = 0; m < frame_.M; ++m) {
        if (std::abs(std::abs(gbar_[m] - xbar_[m]) - disp_[m]) > kSlack) {
            std::ostringstream os;
            os << "|gammabar - xbar| != |dH|/t for m=" << m << " at prefix " << count_;
            failures_.push_back(os.str());
        }
    }
    return failures_.empty();
}

ResidualReport constraint_residuals(const Trace& trace, const ProblemFrame& frame,
                                    std::size_t t_end, const QueueState& initial) {
    if (t_end == 0 || t_end > trace.size())
        throw std::invalid_argument("constraint_residuals: t_end out of range");
    Averages av = time_averages(trace, t_end);
    const QueueState& q = trace[t_end - 1].queues_after;
    const double inv = 1.0 / static_cast<double>(t_end);

    ResidualReport rep;
    rep.t_end = t_end;
    rep.gamma_mean = av.gamma;
    auto flag = [&](const char* kind, std::size_t idx) {
        std::ostringstream os;
        os << kind << "[" << idx << "] exceeds its bound";
        rep.flags.push_back(os.str());
    };
    rep.x_displacement.resize(frame.M);
    for (std::size_t m = 0; m < frame.M; ++m)
        rep.x_displacement[m] = std::abs(q.H[m] - initial.H[m]) * inv;

    rep.queue_residual.resize(frame.K);
    rep.queue_bound.resize(frame.K);
    for (std::size_t k = 0; k < frame.K; ++k) {
        rep.queue_residual[k] = av.a[k] - av.b[k];
        rep.queue_bound[k] = (q.Q[k] - initial.Q[k]) * inv;
        if (rep.queue_residual[k] > rep.queue_bound[k] + kSlack) flag("queue", k);
    }
    rep.z_residual.resize(frame.L);
    rep.z_bound.resize(frame.L);
    for (std::size_t l = 0; l < frame.L; ++l) {
        rep.z_residual[l] = av.y[l + 1] + frame.cost.g_value(l, av.x);
        double bound = (q.Z[l] - initial.Z[l]) * inv;
        for (std::size_t m = 0; m < frame.M; ++m)
            bound += frame.cost.beta[l][m] * rep.x_displacement[m];
        rep.z_bound[l] = bound;
        if (rep.z_residual[l] > rep.z_bound[l] + kSlack) flag("z", l);
    }
    rep.x_set_ok = frame.cost.in_x_set(av.gamma, kSlack);
    for (std::size_t m = 0; m < frame.M; ++m) {
        if (std::abs(std::abs(av.gamma[m] - av.x[m]) - rep.x_displacement[m]) > kSlack)
            rep.displacement_match = false;
    }
    return rep;
}

}  // namespace dpp::core
