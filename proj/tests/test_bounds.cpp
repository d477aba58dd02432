#include <doctest.h>

#include <cmath>

#include "dppsim/bounds/bounds.hpp"
#include "dppsim/core/algorithm.hpp"
#include "dppsim/core/cost_terms.hpp"
#include "generators.hpp"

using namespace dpp;
using namespace dpp::core;
using namespace dpp::bounds;

namespace {

ProblemFrame frame_with(std::size_t K, std::vector<double> ab_max,
                        std::vector<Interval> y_range, std::vector<Interval> box) {
    ProblemFrame f;
    f.K = K;
    f.L = y_range.empty() ? 0 : y_range.size() - 1;
    f.M = box.size();
    std::vector<ScalarTerm> ft(f.M, ScalarTerm::zero());
    std::vector<std::vector<ScalarTerm>> gt(f.L, std::vector<ScalarTerm>(f.M, ScalarTerm::zero()));
    f.cost = make_separable_cost(ft, gt, box);
    f.bounds.a_max = ab_max;
    f.bounds.b_max = ab_max;
    f.bounds.x_range = box;
    f.bounds.y_range = y_range.empty() ? std::vector<Interval>{Interval{0, 0}} : y_range;
    return f;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("constant B from the A1 bounds") {
    ProblemFrame f1 = frame_with(1, {1.0}, {}, {});
    CHECK(constant_B(f1) == doctest::Approx(1.0));

    ProblemFrame f0 = frame_with(0, {}, {}, {});
    CHECK(constant_B(f0) == doctest::Approx(0.0));

    // L=1 with z_diff=2 (y in [-2,2], g=0), M=1 with h_diff=1, K=0.
    ProblemFrame f2 = frame_with(0, {}, {Interval{0, 0}, Interval{-2, 2}},
                                 {Interval{0, 1}});
    DiffConstants d = diff_constants(f2);
    CHECK(d.z_diff[0] == doctest::Approx(2.0));
    CHECK(d.h_diff[0] == doctest::Approx(1.0));
    CHECK(d.z_max == doctest::Approx(2.0));
    CHECK(constant_B(f2) == doctest::Approx(2.5));
}

TEST_CASE("constant D from the A1 bounds") {
    CHECK(constant_D(frame_with(0, {}, {}, {})) == doctest::Approx(0.0));
    CHECK(constant_D(frame_with(1, {2.0}, {}, {})) == doctest::Approx(2.0));
}

TEST_CASE("C0 and the queue bound") {
    CHECK(constant_C0(2, 0, 1, 1, 1) == doctest::Approx(std::sqrt(8.0)));
    CHECK(constant_C0(0, 0, 1, 0, 0) == doctest::Approx(0.0));
    CHECK(constant_C0(2, 2, 4, 0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(constant_C0(1, 0, 0, 0, 0), std::domain_error);
    CHECK_THROWS_AS(constant_C0(1, 0, -1, 0, 0), std::domain_error);

    CHECK(queue_bound_at(100, 1, std::sqrt(8.0), 0) == doctest::Approx(std::sqrt(800.0)));
    CHECK(queue_bound_at(0, 7, 3, 0) == doctest::Approx(0.0));
    CHECK(queue_bound_at(1, 1, 1, 0.5) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("monotonicity of the reported constants") {
    double prev = kInf;
    for (double V : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        double c0 = constant_C0(3.0, 1.0, V, 0.5, 0.5);
        CHECK(c0 <= prev + kSlack);
        prev = c0;
    }
    CHECK(queue_bound_at(10, 1, 1, 0) <= queue_bound_at(11, 1, 1, 0));
    CHECK(queue_bound_at(10, 1, 1, 0) <= queue_bound_at(10, 2, 1, 0));
    CHECK(queue_bound_at(10, 1, 1, 0) <= queue_bound_at(10, 1, 1, 1));
}

TEST_CASE("network B and D, wireless special case") {
    auto [b10, d10] = network_B_D(wireless_unit_network(10, 3));
    CHECK(b10 == doctest::Approx(11.0));
    CHECK(d10 == doctest::Approx(11.0));
    auto [b4, d4] = network_B_D(wireless_unit_network(4, 0));
    CHECK(b4 == doctest::Approx(2.0));
    CHECK(d4 == doctest::Approx(2.0));
}

TEST_CASE("multihop C value") {
    CHECK(multihop_C(5, 1, 0) == doctest::Approx(10.0));
    CHECK(multihop_C(0, 3, 7) == doctest::Approx(0.0));
    CHECK(multihop_C(3, 1, 2) == doctest::Approx(18.0));
}

TEST_CASE("slater constants") {
    // L=1 with beta_sum = 1 via g linear in one coordinate.
    ProblemFrame f;
    f.K = 1;
    f.L = 1;
    f.M = 1;
    f.cost = make_separable_cost({ScalarTerm::zero()},
                                 {{ScalarTerm::linear(1.0)}}, {Interval{0, 1}});
    f.bounds.a_max = {1.0};
    f.bounds.b_max = {1.0};
    f.bounds.x_range = {Interval{0, 1}};
    f.bounds.y_range = {Interval{0, 0}, Interval{-1, 1}};

    SlaterInput in;
    in.delta = 0.5;
    in.V = 1.0;
    SlaterConstants sc = slater_constants(f, in);
    CHECK(sc.theta == doctest::Approx(0.25));
    CHECK(sc.p == doctest::Approx(0.0));

    // eps_Q = 0.1, beta_sum = 0.
    ProblemFrame f2 = frame_with(1, {1.0}, {}, {});
    SlaterInput in2;
    in2.delta = 0.5;
    in2.eps_Q = 0.1;
    in2.V = 1.0;
    SlaterConstants sc2 = slater_constants(f2, in2);
    CHECK(sc2.theta == doctest::Approx(0.4));
    CHECK(sc2.p == doctest::Approx(0.2));  // eps_Q/delta

    SlaterInput bad = in2;
    bad.eps_H = 0.5;
    CHECK_THROWS_WITH_AS(slater_constants(f2, bad), doctest::Contains("eps_H < delta"),
                         std::domain_error);
}

TEST_CASE("per-slot dominance of B and D on random traces") {
    for (std::uint64_t seed : {31ull, 32ull, 33ull, 34ull}) {
        CounterRng rng(seed);
        SystemModel model = testgen::random_general_model(rng);
        auto events = testgen::random_events(rng, model, 150);
        QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
        Trace trace = run(model, events, 2.0, ApproximationPolicy::exact(), init);
        double B = constant_B(model.frame);
        double D = constant_D(model.frame);
        DiffConstants diff = diff_constants(model.frame);
        for (const auto& rec : trace) {
            CHECK(slot_quadratic_sum(model.frame, rec.eval, rec.gamma) <= B + kSlack);
            CHECK(slot_weighted_sum(model.frame, diff, rec.eval, rec.gamma) <= D + kSlack);
        }
        // Every feasible (event, action, gamma) pair is dominated too, not
        // just the chosen ones.
        for (const auto& entry : model.catalog) {
            for (const auto& ev : entry.actions) {
                CHECK(slot_quadratic_sum(model.frame, ev, ev.attributes) <= B + kSlack);
                CHECK(slot_weighted_sum(model.frame, diff, ev, ev.attributes) <= D + kSlack);
            }
        }
    }
}

TEST_CASE("queue bound theorem holds on zero-start exact runs") {
    for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
        for (double V : {1.0, 4.0, 16.0}) {
            CounterRng rng(seed);
            SystemModel model = testgen::random_general_model(rng);
            auto events = testgen::random_events(rng, model, 200);
            QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
            Trace trace = run(model, events, V, ApproximationPolicy::exact(), init);
            double C0 = constant_C0(constant_B(model.frame), 0.0, V,
                                    model.frame.y0_range(), model.frame.f_range());
            for (std::size_t t = 1; t <= trace.size(); ++t) {
                double cap = C0 * std::sqrt(static_cast<double>(t) * V);
                const QueueState& q = trace[t - 1].queues_after;
                for (double z : q.Z) CHECK(z <= cap + kSlack);
                for (double qq : q.Q) CHECK(qq <= cap + kSlack);
                for (double h : q.H) CHECK(std::abs(h) <= cap + kSlack);
            }
        }
    }
}

}  // TEST_SUITE
