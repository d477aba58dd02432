#pragma once

#include <cmath>
#include <functional>

#include "dppsim/common.hpp"

namespace dpp::core {

// Golden-section minimization of a convex scalar function over [lo, hi].
// Converges to the minimizer within arg_tol in argument.
inline double golden_section_min(const std::function<double(double)>& fn,
                                 double lo, double hi, double arg_tol = 1e-10) {
    if (!(lo <= hi)) throw std::invalid_argument("golden_section_min: empty interval");
    if (hi - lo <= arg_tol) return 0.5 * (lo + hi);
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - (b - a) * invphi;
    double d = a + (b - a) * invphi;
    double fc = fn(c), fd = fn(d);
    while (b - a > arg_tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * invphi;
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * invphi;
            fd = fn(d);
        }
    }
    double mid = 0.5 * (a + b);
    // Convexity makes interior search exact; still compare the endpoints so
    // boundary minimizers of flat-ish objectives land on the bound itself.
    double fm = fn(mid), flo = fn(lo), fhi = fn(hi);
    if (flo <= fm && flo <= fhi) return lo;
    if (fhi <= fm && fhi < flo) return hi;
    return mid;
}

}  // namespace dpp::core
