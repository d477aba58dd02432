#include "dppsim/core/cost_terms.hpp"

#include <algorithm>
#include <cmath>

namespace dpp::core {

ScalarTerm ScalarTerm::quadratic(double a, double b, double c) {
    if (a < 0.0) throw std::invalid_argument("quadratic term needs a >= 0");
    return {Kind::Quadratic, a, b, c};
}

ScalarTerm ScalarTerm::abs_dev(double weight, double center) {
    if (weight < 0.0) throw std::invalid_argument("abs_dev term needs weight >= 0");
    return {Kind::AbsDev, weight, center, 0.0};
}

ScalarTerm ScalarTerm::neg_log1p(double weight) {
    if (weight < 0.0) throw std::invalid_argument("neg_log1p term needs weight >= 0");
    return {Kind::NegLog1p, weight, 0.0, 0.0};
}

double ScalarTerm::value(double x) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return p0 * x + p1;
        case Kind::Quadratic: return p0 * x * x + p1 * x + p2;
        case Kind::AbsDev: return p0 * std::abs(x - p1);
        case Kind::NegLog1p: return -p0 * std::log1p(x);
    }
    return 0.0;
}

double ScalarTerm::deriv_bound(Interval iv) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return std::abs(p0);
        case Kind::Quadratic:
            return std::max(std::abs(2.0 * p0 * iv.lo + p1), std::abs(2.0 * p0 * iv.hi + p1));
        case Kind::AbsDev: return p0;
        case Kind::NegLog1p:
            if (!(iv.lo > -1.0)) throw std::invalid_argument("neg_log1p needs box.lo > -1");
            return p0 / (1.0 + iv.lo);
    }
    return 0.0;
}

double ScalarTerm::min_over(Interval iv) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return std::min(value(iv.lo), value(iv.hi));
        case Kind::Quadratic: {
            double at = (p0 > 0.0) ? iv.clamp(-p1 / (2.0 * p0)) : (p1 >= 0.0 ? iv.lo : iv.hi);
            return value(at);
        }
        case Kind::AbsDev: return value(iv.clamp(p1));
        case Kind::NegLog1p: return value(iv.hi);
    }
    return 0.0;
}

double ScalarTerm::max_over(Interval iv) const {
    // Convex terms attain their maximum at an endpoint.
    return std::max(value(iv.lo), value(iv.hi));
}

double ScalarTerm::argmin(double scale, double linear, Interval iv) const {
    if (scale < 0.0) throw std::invalid_argument("argmin: negative scale");
    auto linear_rule = [&](double slope) { return slope > 0.0 ? iv.lo : (slope < 0.0 ? iv.hi : iv.lo); };
    switch (kind) {
        case Kind::Zero: return linear_rule(linear);
        case Kind::Linear: return linear_rule(scale * p0 + linear);
        case Kind::Quadratic: {
            double a = scale * p0, b = scale * p1 + linear;
            if (a > 0.0) return iv.clamp(-b / (2.0 * a));
            return linear_rule(b);
        }
        case Kind::AbsDev: {
            // Piecewise linear; candidates in increasing order, ties keep the
            // lowest point.
            double best_x = iv.lo;
            double best_v = scale * value(iv.lo) + linear * iv.lo;
            for (double cand : {iv.clamp(p1), iv.hi}) {
                double v = scale * value(cand) + linear * cand;
                if (v < best_v) {
                    best_v = v;
                    best_x = cand;
                }
            }
            return best_x;
        }
        case Kind::NegLog1p: {
            double w = scale * p0;
            if (linear <= 0.0 || w == 0.0) {
                if (w == 0.0) return linear_rule(linear);
                return iv.hi;  // both pieces pull right
            }
            return iv.clamp(w / linear - 1.0);
        }
    }
    return iv.lo;
}

ScalarConvex ScalarTerm::to_convex() const {
    ScalarConvex c;
    ScalarTerm t = *this;
    c.value = [t](double x) { return t.value(x); };
    c.argmin = [t](double scale, double linear, Interval iv) {
        return t.argmin(scale, linear, iv);
    };
    return c;
}

CostSpec make_separable_cost(std::vector<ScalarTerm> f_terms,
                             std::vector<std::vector<ScalarTerm>> g_terms,
                             std::vector<Interval> box,
                             std::optional<std::vector<Interval>> x_set) {
    const std::size_t M = box.size();
    const std::size_t L = g_terms.size();
    if (f_terms.size() != M) throw std::invalid_argument("f term count != M");
    for (const auto& row : g_terms)
        if (row.size() != M) throw std::invalid_argument("g term row width != M");
    if (x_set && x_set->size() != M) throw std::invalid_argument("x_set size != M");

    CostSpec cs;
    cs.dims = M;
    cs.num_g = L;
    cs.box = std::move(box);
    cs.x_set = std::move(x_set);
    cs.separable = true;
    cs.nu.resize(M);
    cs.beta.assign(L, std::vector<double>(M, 0.0));
    cs.g_min.assign(L, 0.0);
    cs.g_max.assign(L, 0.0);
    cs.f_min = cs.f_max = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        const Interval iv = cs.box[m];
        if (!iv.bounded()) throw std::invalid_argument("attribute box must be bounded");
        cs.f_parts.push_back(f_terms[m].to_convex());
        cs.nu[m] = f_terms[m].deriv_bound(iv);
        cs.f_min += f_terms[m].min_over(iv);
        cs.f_max += f_terms[m].max_over(iv);
    }
    for (std::size_t l = 0; l < L; ++l) {
        cs.g_parts.emplace_back();
        for (std::size_t m = 0; m < M; ++m) {
            const Interval iv = cs.box[m];
            cs.g_parts[l].push_back(g_terms[l][m].to_convex());
            cs.beta[l][m] = g_terms[l][m].deriv_bound(iv);
            cs.g_min[l] += g_terms[l][m].min_over(iv);
            cs.g_max[l] += g_terms[l][m].max_over(iv);
        }
    }
    return cs;
}

double UtilitySpec::value(double x) const {
    switch (kind) {
        case Kind::Log1p: return weight * std::log1p(x);
        case Kind::Linear: return weight * x;
    }
    return 0.0;
}

ScalarTerm UtilitySpec::as_cost_term() const {
    switch (kind) {
        case Kind::Log1p: return ScalarTerm::neg_log1p(weight);
        case Kind::Linear: return ScalarTerm::linear(-weight);
    }
    return ScalarTerm::zero();
}

}  // namespace dpp::core
