#pragma once

#include "dppsim/core/types.hpp"

namespace dpp::core {

// Q(t+1) = max(Q(t) - b(t), 0) + a(t)
double update_actual_queue(double q, double b, double a);

// Z(t+1) = max(Z(t) + y(t) + g(gamma(t)), 0)
double update_virtual_z(double z, double y, double g_val);

// H(t+1) = H(t) + gamma(t) - x(t)
double update_virtual_h(double h, double gamma, double x);

// L(Theta) = 1/2 sum Z^2 + 1/2 sum Q^2 + 1/2 sum H^2
double lyapunov(const QueueState& state);

}  // namespace dpp::core
