#include <doctest.h>

#include <cmath>
#include <cstring>

#include "dppsim/bounds/bounds.hpp"
#include "dppsim/core/algorithm.hpp"
#include "dppsim/core/averages.hpp"
#include "dppsim/core/cost_terms.hpp"
#include "dppsim/core/queues.hpp"
#include "generators.hpp"

using namespace dpp;
using namespace dpp::core;

namespace {

// K=1, L=0, M=0, two actions: (y0=1, a=1, b=0) and (y0=3, a=0, b=1).
SystemModel two_action_model() {
    SystemModel model;
    model.frame.K = 1;
    model.frame.cost = make_separable_cost({}, {}, {});
    model.frame.bounds.a_max = {1.0};
    model.frame.bounds.b_max = {1.0};
    model.frame.bounds.y_range = {Interval{1.0, 3.0}};
    CatalogEntry entry;
    entry.actions.push_back({{1.0}, {0.0}, {}, {1.0}});
    entry.actions.push_back({{0.0}, {1.0}, {}, {3.0}});
    model.catalog.push_back(entry);
    model.validate();
    return model;
}

SystemModel idle_model(std::size_t K, std::size_t L, std::size_t M) {
    SystemModel model;
    model.frame.K = K;
    model.frame.L = L;
    model.frame.M = M;
    std::vector<ScalarTerm> f(M, ScalarTerm::zero());
    std::vector<std::vector<ScalarTerm>> g(L, std::vector<ScalarTerm>(M, ScalarTerm::zero()));
    std::vector<Interval> box(M, Interval{0.0, 1.0});
    model.frame.cost = make_separable_cost(f, g, box);
    model.frame.bounds.a_max.assign(K, 0.0);
    model.frame.bounds.b_max.assign(K, 0.0);
    model.frame.bounds.x_range.assign(M, Interval{0.0, 1.0});
    model.frame.bounds.y_range.assign(L + 1, Interval{0.0, 0.0});
    AttributeEvaluation ev;
    ev.arrivals.assign(K, 0.0);
    ev.services.assign(K, 0.0);
    ev.attributes.assign(M, 0.0);
    ev.penalties.assign(L + 1, 0.0);
    model.catalog.push_back({{ev}});
    model.validate();
    return model;
}

std::vector<EventSample> fixed_events(std::size_t t_end, std::size_t id = 0) {
    std::vector<EventSample> ev;
    for (std::size_t t = 0; t < t_end; ++t)
        ev.push_back({static_cast<std::int64_t>(t), id});
    return ev;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("queue update follows max(q-b,0)+a") {
    CHECK(update_actual_queue(5, 7, 2) == doctest::Approx(2.0));
    CHECK(update_actual_queue(0, 0, 0) == doctest::Approx(0.0));
    CHECK(update_actual_queue(5, 3, 1) == doctest::Approx(3.0));
    CHECK_THROWS_AS(update_actual_queue(std::nan(""), 0, 0), std::domain_error);
    CHECK_THROWS_AS(update_actual_queue(1, kInf, 0), std::domain_error);
}

TEST_CASE("virtual queue updates") {
    CHECK(update_virtual_z(2, -3, 0) == doctest::Approx(0.0));
    CHECK(update_virtual_z(1, 0.5, 0.25) == doctest::Approx(1.75));
    CHECK(update_virtual_z(0, 0, 0) == doctest::Approx(0.0));
    CHECK(update_virtual_h(1, 0.5, 2) == doctest::Approx(-0.5));
    CHECK(update_virtual_h(0, 0, 0) == doctest::Approx(0.0));
    CHECK(update_virtual_h(-1, 2, 0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(update_virtual_z(1, std::nan(""), 0), std::domain_error);
    CHECK_THROWS_AS(update_virtual_h(1, kInf, 0), std::domain_error);
}

TEST_CASE("lyapunov value") {
    QueueState empty;
    CHECK(lyapunov(empty) == doctest::Approx(0.0));
    QueueState s;
    s.Z = {3.0};
    s.Q = {4.0};
    s.H = {-2.0};
    CHECK(lyapunov(s) == doctest::Approx(14.5));
    QueueState zeros = QueueState::zeros(2, 2, 2);
    CHECK(lyapunov(zeros) == doctest::Approx(0.0));
}

TEST_CASE("drift penalty score on the two-action instance") {
    SystemModel model = two_action_model();
    QueueState state = QueueState::zeros(1, 0, 0);
    state.Q[0] = 4.0;
    CHECK(drift_penalty_score(model, 0, 0, {}, state, 2.0) == doctest::Approx(6.0));
    CHECK(drift_penalty_score(model, 0, 1, {}, state, 2.0) == doctest::Approx(2.0));

    QueueState zero = QueueState::zeros(1, 0, 0);
    CHECK(drift_penalty_score(model, 0, 0, {}, zero, 0.0) == doctest::Approx(0.0));
    CHECK(drift_penalty_score(model, 0, 1, {}, zero, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("choose_aux solves the scalar subproblems") {
    std::vector<Interval> box{Interval{0.0, 1.0}};
    CostSpec cost = make_separable_cost({ScalarTerm::quadratic(1.0)}, {}, box);
    double Z_none[1] = {};
    auto aux = [&](double h, double V) {
        std::vector<double> H{h};
        return choose_aux(cost, std::span<const double>(Z_none, 0), H, V)[0];
    };
    CHECK(aux(-4.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(aux(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(aux(-1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));

    SUBCASE("golden section matches the analytic minimizer") {
        CostSpec plain = cost;
        plain.f_parts[0].argmin = nullptr;  // force the search path
        std::vector<double> H{-1.0};
        double got = choose_aux(plain, std::span<const double>(Z_none, 0), H, 1.0)[0];
        CHECK(got == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("non-separable cost without hook is rejected") {
        CostSpec bad = cost;
        bad.separable = false;
        std::vector<double> H{0.0};
        CHECK_THROWS_AS(choose_aux(bad, std::span<const double>(Z_none, 0), H, 1.0),
                        ConfigError);
    }
}

TEST_CASE("choose_action minimizes with lowest-index ties") {
    SystemModel model = two_action_model();
    QueueState state = QueueState::zeros(1, 0, 0);
    state.Q[0] = 4.0;
    CHECK(choose_action(model, 0, {}, state, 2.0, ApproximationPolicy::exact()) == 1);

    SystemModel twin = two_action_model();
    twin.catalog[0].actions[1] = twin.catalog[0].actions[0];
    CHECK(choose_action(twin, 0, {}, state, 2.0, ApproximationPolicy::exact()) == 0);

    QueueState zero = QueueState::zeros(1, 0, 0);
    CHECK(choose_action(model, 0, {}, zero, 0.0, ApproximationPolicy::exact()) == 0);
}

TEST_CASE("step applies the chosen action to every queue") {
    SystemModel model = two_action_model();
    QueueState state = QueueState::zeros(1, 0, 0);
    state.Q[0] = 4.0;
    auto [next, rec] = step(model, state, {0, 0}, 2.0, ApproximationPolicy::exact());
    CHECK(rec.action_index == 1);
    CHECK(next.Q[0] == doctest::Approx(3.0));
    CHECK(next.slot == 1);
    CHECK(rec.objective_term == doctest::Approx(6.0));  // V*y0 = 2*3

    SystemModel idle = idle_model(1, 1, 1);
    QueueState zeros = QueueState::zeros(1, 1, 1);
    auto [n2, r2] = step(idle, zeros, {0, 0}, 1.0, ApproximationPolicy::exact());
    CHECK(n2.Q[0] == 0.0);
    CHECK(n2.Z[0] == 0.0);
    CHECK(n2.H[0] == 0.0);

    CHECK_THROWS_AS(step(model, state, {3, 0}, 2.0, ApproximationPolicy::exact()),
                    std::invalid_argument);
}

TEST_CASE("run folds step and is replay identical") {
    SystemModel idle = idle_model(2, 1, 1);
    CHECK(run(idle, {}, 1.0, ApproximationPolicy::exact(),
              QueueState::zeros(2, 1, 1)).empty());
    auto events = fixed_events(50);
    Trace t1 = run(idle, events, 1.0, ApproximationPolicy::exact(),
                   QueueState::zeros(2, 1, 1));
    REQUIRE(t1.size() == 50);
    for (const auto& rec : t1) {
        CHECK(rec.queues_after.Q[0] == 0.0);
        CHECK(rec.queues_after.Z[0] == 0.0);
    }

    CounterRng rng(99);
    SystemModel model = testgen::random_general_model(rng);
    auto ev = testgen::random_events(rng, model, 120);
    QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
    Trace a = run(model, ev, 2.0, ApproximationPolicy::exact(), init);
    Trace b = run(model, ev, 2.0, ApproximationPolicy::exact(), init);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::memcmp(a[i].queues_after.Q.data(), b[i].queues_after.Q.data(),
                          a[i].queues_after.Q.size() * sizeof(double)) == 0);
        CHECK(a[i].action_index == b[i].action_index);
        CHECK(a[i].gamma == b[i].gamma);
    }
}

TEST_CASE("time averages") {
    SystemModel model = two_action_model();
    QueueState init = QueueState::zeros(1, 0, 0);
    Trace trace = run(model, fixed_events(4), 0.0, ApproximationPolicy::exact(), init);
    // V=0, zero queues at first: action 0 until Q builds up.
    Averages av1 = time_averages(trace, 1);
    CHECK(av1.y[0] == doctest::Approx(trace[0].eval.penalties[0]));
    CHECK_THROWS_AS(time_averages(trace, 0), std::invalid_argument);
    CHECK_THROWS_AS(time_averages(trace, 9), std::invalid_argument);

    SystemModel idle = idle_model(0, 0, 1);
    Trace it = run(idle, fixed_events(6), 1.0, ApproximationPolicy::exact(),
                   QueueState::zeros(0, 0, 1));
    for (std::size_t t = 1; t <= 6; ++t) {
        Averages av = time_averages(it, t);
        CHECK(av.x[0] == doctest::Approx(0.0));  // constant trace -> its value
    }
}

TEST_CASE("per-prefix residuals and invariants on random traces") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        CounterRng rng(seed);
        SystemModel model = testgen::random_general_model(rng);
        auto events = testgen::random_events(rng, model, 200);
        QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
        Trace trace = run(model, events, 4.0, ApproximationPolicy::exact(), init);

        PrefixResidualChecker checker(model.frame, init);
        for (const auto& rec : trace) checker.feed(rec);
        CHECK_MESSAGE(checker.ok(),
                      (checker.failures().empty() ? "" : checker.failures().front()));

        for (const auto& rec : trace) {
            for (double z : rec.queues_after.Z) CHECK(z >= 0.0);
            for (double q : rec.queues_after.Q) CHECK(q >= 0.0);
        }

        // Jensen consistency: f(average gamma) <= average of f(gamma).
        Averages av = time_averages(trace, trace.size());
        double mean_f = 0.0;
        for (const auto& rec : trace) mean_f += model.frame.cost.f_value(rec.gamma);
        mean_f /= static_cast<double>(trace.size());
        CHECK(model.frame.cost.f_value(av.gamma) <= mean_f + kSlack);
    }
}

TEST_CASE("residual report fields at a single-slot prefix") {
    SystemModel model = two_action_model();
    QueueState init = QueueState::zeros(1, 0, 0);
    Trace trace = run(model, fixed_events(1), 2.0, ApproximationPolicy::exact(), init);
    ResidualReport rep = constraint_residuals(trace, model.frame, 1, init);
    CHECK(rep.queue_residual[0] ==
          doctest::Approx(trace[0].eval.arrivals[0] - trace[0].eval.services[0]));
    CHECK(rep.queue_bound[0] == doctest::Approx(trace[0].queues_after.Q[0] - 0.0));
    CHECK(rep.all_within());
}

TEST_CASE("idle run has zero residuals and zero bounds") {
    SystemModel idle = idle_model(1, 1, 1);
    QueueState init = QueueState::zeros(1, 1, 1);
    Trace trace = run(idle, fixed_events(10), 1.0, ApproximationPolicy::exact(), init);
    ResidualReport rep = constraint_residuals(trace, idle.frame, 10, init);
    CHECK(rep.queue_bound[0] == doctest::Approx(0.0));
    CHECK(rep.z_bound[0] == doctest::Approx(0.0));
    CHECK(rep.queue_residual[0] <= kSlack);
    CHECK(rep.z_residual[0] <= kSlack);
    CHECK(rep.all_within());
}

TEST_CASE("per-slot drift bound from the queue-bound theorem proof") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        CounterRng rng(seed);
        SystemModel model = testgen::random_general_model(rng);
        auto events = testgen::random_events(rng, model, 150);
        QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
        const double V = 2.0;
        Trace trace = run(model, events, V, ApproximationPolicy::exact(), init);
        double B = bounds::constant_B(model.frame);
        double cap = B + V * model.frame.y0_range() + V * model.frame.f_range();
        double prev = lyapunov(init);
        for (const auto& rec : trace) {
            double cur = lyapunov(rec.queues_after);
            CHECK(cur - prev <= cap + kSlack);
            prev = cur;
        }
    }
}

TEST_CASE("additive approximation stays within its budget") {
    CounterRng rng(21);
    SystemModel model = testgen::random_general_model(rng);
    auto events = testgen::random_events(rng, model, 100);
    QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
    const double V = 2.0, C = 0.7;
    for (auto mode : {ApproximationPolicy::Mode::WorstWithinBudget,
                      ApproximationPolicy::Mode::RandomWithinBudget}) {
        auto approx = ApproximationPolicy::additive(C, 5, mode);
        QueueState state = init;
        CounterRng arng(approx.seed);
        for (const auto& ev : events) {
            auto gamma = choose_aux(model, state, V);
            std::size_t got = choose_action(model, ev.event_id, gamma, state, V, approx, &arng);
            std::size_t best = choose_action(model, ev.event_id, gamma, state, V,
                                             ApproximationPolicy::exact());
            double got_score = drift_penalty_score(model, ev.event_id, got, gamma, state, V);
            double best_score = drift_penalty_score(model, ev.event_id, best, gamma, state, V);
            CHECK(got_score <= best_score + C + kSlack);
            auto [next, rec] = step(model, state, ev, V, approx, &arng);
            state = next;
        }
    }
}

TEST_CASE("A2 violation is detected at construction") {
    SystemModel model = two_action_model();
    // Make every action violate abar <= bbar.
    model.catalog[0].actions[1].arrivals[0] = 1.0;
    model.catalog[0].actions[1].services[0] = 0.0;
    CHECK_THROWS_WITH_AS(model.validate(),
                         doctest::Contains("Assumption A2 violated: event 0"),
                         std::invalid_argument);
}

TEST_CASE("gamma outside the box is rejected") {
    SystemModel idle = idle_model(0, 0, 1);
    QueueState state = QueueState::zeros(0, 0, 1);
    std::vector<double> gamma{2.0};
    CHECK_THROWS_AS(drift_penalty_score(idle, 0, 0, gamma, state, 1.0),
                    std::invalid_argument);
}

}  // TEST_SUITE
