#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dppsim/bounds/bounds.hpp"
#include "dppsim/core/algorithm.hpp"
#include "dppsim/core/cost_terms.hpp"
#include "dppsim/oracle/oracle.hpp"
#include "generators.hpp"

using namespace dpp;
using namespace dpp::core;
using namespace dpp::oracle;

namespace {

// K=1, two actions: (y0=1, a=1, b=0) violates abar<=bbar alone;
// (y0=3, a=0, b=1) is feasible.
SystemModel benchmark_model() {
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

std::vector<EventSample> fixed_events(std::size_t t_end, std::size_t id = 0) {
    std::vector<EventSample> ev;
    for (std::size_t t = 0; t < t_end; ++t)
        ev.push_back({static_cast<std::int64_t>(t), id});
    return ev;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("single-slot frame optimum filters infeasible actions") {
    SystemModel model = benchmark_model();
    ActionTable table = make_action_table(model, fixed_events(1));
    FrameSolution sol = frame_optimum(model.frame, table);
    CHECK(sol.feasible);
    CHECK(sol.F_star == doctest::Approx(3.0));
    CHECK(sol.argmin == std::vector<std::size_t>{1});
}

TEST_CASE("idle action gives zero frame cost") {
    SystemModel model;
    model.frame.cost = make_separable_cost({}, {}, {});
    model.frame.bounds.y_range = {Interval{0, 0}};
    model.catalog.push_back({{AttributeEvaluation{{}, {}, {}, {0.0}}}});
    model.validate();
    ActionTable table = make_action_table(model, fixed_events(1));
    CHECK(frame_optimum(model.frame, table).F_star == doctest::Approx(0.0));
}

TEST_CASE("two-slot frame against hand enumeration") {
    // Slot-varying y0 via two catalog entries; a-b = +1 for action 0 and -1
    // for action 1, so the frame-average constraint admits {01, 10, 11}.
    SystemModel model = benchmark_model();
    CatalogEntry second = model.catalog[0];
    second.actions[0].penalties[0] = 2.0;   // y0 of action 0 on event 1
    second.actions[1].penalties[0] = 1.5;   // y0 of action 1 on event 1
    model.frame.bounds.y_range = {Interval{1.0, 3.0}};
    model.catalog.push_back(second);
    model.validate();

    std::vector<EventSample> events{{0, 0}, {1, 1}};
    ActionTable table = make_action_table(model, events);
    // Feasible means: (0,1): (1+1.5)/2 = 1.25; (1,0): (3+2)/2 = 2.5;
    // (1,1): (3+1.5)/2 = 2.25. Min = 1.25 via sequence 0,1.
    FrameSolution sol = frame_optimum(model.frame, table);
    CHECK(sol.F_star == doctest::Approx(1.25));
    CHECK(sol.argmin == std::vector<std::size_t>{0, 1});
}

TEST_CASE("frame benchmark averages per-frame optima") {
    SystemModel model = benchmark_model();
    ActionTable table = make_action_table(model, fixed_events(4));
    CHECK(frame_benchmark(model.frame, table, 1, 1) == doctest::Approx(3.0));
    CHECK(frame_benchmark(model.frame, table, 2, 2) ==
          doctest::Approx(frame_optimum(model.frame, {table.data(), 2}).F_star));

    // Mixed frames: change the second half to cheaper actions.
    SystemModel model2 = benchmark_model();
    CatalogEntry cheap = model2.catalog[0];
    cheap.actions[1].penalties[0] = 2.0;
    model2.catalog.push_back(cheap);
    model2.validate();
    std::vector<EventSample> ev{{0, 0}, {1, 1}};
    ActionTable t2 = make_action_table(model2, ev);
    CHECK(frame_benchmark(model2.frame, t2, 1, 2) == doctest::Approx((3.0 + 2.0) / 2.0));
}

TEST_CASE("argmin value is invariant to catalog action order") {
    CounterRng rng(7);
    SystemModel model = testgen::random_general_model(rng);
    auto events = testgen::random_events(rng, model, 3);
    ActionTable table = make_action_table(model, events);
    double f1 = frame_optimum(model.frame, table).F_star;

    SystemModel shuffled = model;
    for (auto& entry : shuffled.catalog)
        std::reverse(entry.actions.begin(), entry.actions.end());
    ActionTable table2 = make_action_table(shuffled, events);
    CHECK(frame_optimum(shuffled.frame, table2).F_star == doctest::Approx(f1));
}

TEST_CASE("assumption A2 keeps every frame feasible") {
    for (std::uint64_t seed = 60; seed < 80; ++seed) {
        CounterRng rng(seed);
        SystemModel model = testgen::random_general_model(rng);
        auto events = testgen::random_events(rng, model, 4);
        ActionTable table = make_action_table(model, events);
        CHECK_NOTHROW(frame_optimum(model.frame, table));
    }
}

TEST_CASE("budget guard") {
    SystemModel model = benchmark_model();
    ActionTable table = make_action_table(model, fixed_events(10));
    CHECK_THROWS_AS(frame_optimum(model.frame, table, 0, 512), BudgetExceeded);
    try {
        frame_optimum(model.frame, table, 0, 512);
    } catch (const BudgetExceeded& e) {
        CHECK(e.required == doctest::Approx(1024.0));
    }
}

TEST_CASE("frame benchmark dominates the full-horizon optimum") {
    for (std::uint64_t seed = 90; seed < 98; ++seed) {
        CounterRng rng(seed);
        testgen::GeneralOpts opts;
        opts.max_actions = 3;
        SystemModel model = testgen::random_general_model(rng, opts);
        const std::size_t t_end = 8;
        auto events = testgen::random_events(rng, model, t_end);
        ActionTable table = make_action_table(model, events);
        double full = full_horizon_optimum(model.frame, table).F_star;
        for (std::size_t T : {1u, 2u, 4u, 8u}) {
            double bench = frame_benchmark(model.frame, table, T, t_end / T);
            CHECK(bench >= full - kSlack);
        }
    }
}

TEST_CASE("theorem 1c verification") {
    SUBCASE("idle model holds with slack (B+C)/V at T=1") {
        SystemModel model;
        model.frame.cost = make_separable_cost({}, {}, {});
        model.frame.bounds.y_range = {Interval{0, 0}};
        model.catalog.push_back({{AttributeEvaluation{{}, {}, {}, {0.0}}}});
        model.validate();
        auto events = fixed_events(6);
        ActionTable table = make_action_table(model, events);
        Trace trace = run(model, events, 2.0, ApproximationPolicy::exact(),
                          QueueState::zeros(0, 0, 0));
        double B = bounds::constant_B(model.frame);
        double D = bounds::constant_D(model.frame);
        TheoremCheck chk = verify_theorem_1c(model.frame, table, trace, 1, 6, 2.0, 0.0, B, D);
        CHECK(chk.holds);
        CHECK(chk.slack == doctest::Approx(B / 2.0));
    }
    SUBCASE("random instances hold, exact and C-approximate") {
        for (std::uint64_t seed = 100; seed < 112; ++seed) {
            CounterRng rng(seed);
            testgen::GeneralOpts opts;
            opts.max_actions = 4;
            SystemModel model = testgen::random_general_model(rng, opts);
            const std::size_t T = 1 + rng.next_index(4), R = 1 + rng.next_index(8);
            auto events = testgen::random_events(rng, model, T * R);
            ActionTable table = make_action_table(model, events);
            QueueState init = QueueState::zeros(model.frame.K, model.frame.L, model.frame.M);
            double B = bounds::constant_B(model.frame);
            double D = bounds::constant_D(model.frame);
            const double V = 2.0;

            Trace exact = run(model, events, V, ApproximationPolicy::exact(), init);
            TheoremCheck c1 = verify_theorem_1c(model.frame, table, exact, T, R, V, 0.0, B, D);
            CHECK_MESSAGE(c1.holds, "slack=", c1.slack, " seed=", seed);

            const double C = 0.5;
            Trace approx = run(model, events, V, ApproximationPolicy::additive(C, seed), init);
            TheoremCheck c2 = verify_theorem_1c(model.frame, table, approx, T, R, V, C, B, D);
            CHECK_MESSAGE(c2.holds, "slack=", c2.slack, " seed=", seed);
        }
    }
}

TEST_CASE("markov chain validation and sampling") {
    MarkovChainSpec chain;
    chain.P = {{0.5, 0.5}, {0.5, 0.5}};
    chain.seed = 3;
    CHECK_NOTHROW(chain.validate());
    auto ev = chain.sample(100);
    CHECK(ev.size() == 100);
    auto ev2 = chain.sample(100);
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i].event_id == ev2[i].event_id);

    MarkovChainSpec reducible;
    reducible.P = {{1.0, 0.0}, {0.5, 0.5}};
    CHECK_THROWS_AS(reducible.validate(), ConfigError);

    MarkovChainSpec bad_rows;
    bad_rows.P = {{0.7, 0.7}, {0.5, 0.5}};
    CHECK_THROWS_AS(bad_rows.validate(), ConfigError);
}

TEST_CASE("ergodic reference table") {
    SUBCASE("single-state chain repeats the same frame optimum") {
        SystemModel model = benchmark_model();
        MarkovChainSpec chain;
        chain.P = {{1.0}};
        std::size_t horizon = 32;
        auto events = chain.sample(horizon);
        ActionTable table = make_action_table(model, events);
        double f0 = frame_optimum(model.frame, {table.data(), 4}).F_star;
        double bench = frame_benchmark(model.frame, table, 4, horizon / 4);
        CHECK(bench == doctest::Approx(f0));
    }
    SUBCASE("ON/OFF single-queue chain: mean optimum non-increasing in T") {
        // Single queue; ON event allows serving, OFF does not; arrivals are
        // constant. The cost rewards admitting (y0 = -admitted).
        SystemModel model;
        model.frame.K = 1;
        model.frame.cost = make_separable_cost({}, {}, {});
        model.frame.bounds.a_max = {1.0};
        model.frame.bounds.b_max = {1.0};
        model.frame.bounds.y_range = {Interval{-1.0, 0.0}};
        CatalogEntry off;
        off.actions.push_back({{0.0}, {0.0}, {}, {0.0}});   // idle
        off.actions.push_back({{1.0}, {0.0}, {}, {-1.0}});  // admit, no service
        CatalogEntry on;
        on.actions.push_back({{0.0}, {1.0}, {}, {0.0}});    // serve only
        on.actions.push_back({{1.0}, {1.0}, {}, {-1.0}});   // admit + serve
        model.catalog = {off, on};
        model.validate();

        MarkovChainSpec chain;
        chain.P = {{0.5, 0.5}, {0.5, 0.5}};
        chain.seed = 11;
        const std::size_t horizon = 64;
        const double V = 8.0;
        double B = bounds::constant_B(model.frame);
        double D = bounds::constant_D(model.frame);
        std::vector<std::size_t> Ts{1, 2, 4};
        auto rows = ergodic_reference(model, chain, Ts, horizon, V,
                                      ApproximationPolicy::exact(), B, D);
        REQUIRE(rows.size() == 3);
        CHECK(rows[1].mean_frame_opt <= rows[0].mean_frame_opt + kSlack);
        CHECK(rows[2].mean_frame_opt <= rows[1].mean_frame_opt + kSlack);
        for (const auto& row : rows) CHECK(row.gap <= kSlack);
    }
}

}  // TEST_SUITE
