#pragma once

#include <string>
#include <vector>

#include "dppsim/core/types.hpp"

namespace dpp::core {

// Convex scalar building blocks for separable costs.  Each term knows its
// analytic derivative bound and value range over an interval, so A1 / cost
// assumption constants never have to be sampled.
struct ScalarTerm {
    enum class Kind { Zero, Linear, Quadratic, AbsDev, NegLog1p };

    Kind kind = Kind::Zero;
    // Linear:    p0*x + p1
    // Quadratic: p0*x^2 + p1*x + p2  (p0 >= 0)
    // AbsDev:    p0*|x - p1|         (p0 >= 0)
    // NegLog1p:  -p0*log(1+x)        (p0 >= 0, interval.lo > -1)
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;

    static ScalarTerm zero() { return {}; }
    static ScalarTerm linear(double slope, double offset = 0.0) {
        return {Kind::Linear, slope, offset, 0.0};
    }
    static ScalarTerm quadratic(double a, double b = 0.0, double c = 0.0);
    static ScalarTerm abs_dev(double weight, double center = 0.0);
    static ScalarTerm neg_log1p(double weight);

    double value(double x) const;
    double deriv_bound(Interval iv) const;  // max |value'| over iv
    double min_over(Interval iv) const;
    double max_over(Interval iv) const;

    // Minimizer of scale*value(x) + linear*x over iv (scale >= 0), lowest
    // point on ties.
    double argmin(double scale, double linear, Interval iv) const;

    ScalarConvex to_convex() const;
};

// Assembles a separable CostSpec from per-coordinate terms, deriving nu,
// beta, and the value ranges analytically.
CostSpec make_separable_cost(std::vector<ScalarTerm> f_terms,
                             std::vector<std::vector<ScalarTerm>> g_terms,
                             std::vector<Interval> box,
                             std::optional<std::vector<Interval>> x_set = {});

// Concave non-decreasing utility phi with phi(0) = 0; embedded into the
// framework as the convex cost f_m = -phi_m.
struct UtilitySpec {
    enum class Kind { Log1p, Linear };
    Kind kind = Kind::Log1p;
    double weight = 1.0;

    double value(double x) const;
    double nu() const { return weight; }  // max right derivative on x >= 0
    ScalarTerm as_cost_term() const;      // -phi
    std::string name() const { return kind == Kind::Log1p ? "log1p" : "linear"; }
};

}  // namespace dpp::core
