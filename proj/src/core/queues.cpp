#include "dppsim/core/queues.hpp"

#include <algorithm>

namespace dpp::core {

double update_actual_queue(double q, double b, double a) {
    require_finite(q, "queue");
    require_finite(b, "service");
    require_finite(a, "arrival");
    if (q < 0.0 || b < 0.0 || a < 0.0)
        throw std::domain_error("update_actual_queue: negative input");
    return std::max(q - b, 0.0) + a;
}

double update_virtual_z(double z, double y, double g_val) {
    require_finite(z, "queue");
    require_finite(y, "penalty");
    require_finite(g_val, "g value");
    if (z < 0.0) throw std::domain_error("update_virtual_z: negative queue");
    return std::max(z + y + g_val, 0.0);
}

double update_virtual_h(double h, double gamma, double x) {
    require_finite(h, "queue");
    require_finite(gamma, "gamma");
    require_finite(x, "attribute");
    return h + gamma - x;
}

double lyapunov(const QueueState& state) {
    double s = 0.0;
    for (double z : state.Z) s += z * z;
    for (double q : state.Q) s += q * q;
    for (double h : state.H) s += h * h;
    return 0.5 * s;
}

}  // namespace dpp::core
