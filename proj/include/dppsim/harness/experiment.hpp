#pragma once

#include <string>
#include <vector>

#include "dppsim/bounds/bounds.hpp"
#include "dppsim/core/averages.hpp"
#include "dppsim/harness/scenario.hpp"

namespace dpp::harness {

struct Verdict {
    std::string name;
    bool holds = true;
    bool skipped = false;
    double slack = 0.0;
    std::string detail;
};

struct ExperimentReport {
    std::string kind;
    double V = 0.0;
    std::size_t horizon = 0;
    core::Averages averages;
    double cost = 0.0;                   // ybar_0 + f(xbar)
    std::optional<double> utility;       // -cost for the utility models
    std::optional<double> benchmark;     // frame benchmark, min form
    bounds::BoundReport bound_report;
    std::vector<Verdict> verdicts;
    double max_queue = 0.0;
    double internet_max_score_gap = 0.0;  // delayed-feedback runs only
    std::optional<double> theta_benchmark;  // reduced-capacity reference

    bool all_hold() const;
    std::string to_json() const;  // lossless (shortest round-trip doubles)
};

struct ExperimentResult {
    ExperimentReport report;
    core::Trace trace;
    core::ProblemFrame frame;
};

ExperimentResult run_experiment(const Scenario& scenario);

struct SweepRow {
    double V = 0.0;
    std::string status = "ok";  // or the error message
    double cost = 0.0;
    std::optional<double> utility;
    double max_queue = 0.0;
    double analytic_queue_bound = 0.0;
    bool verdicts_hold = false;
};

// Runs the experiment once per V (rows run concurrently; outputs are
// deterministic); failures are captured per row.
std::vector<SweepRow> sweep_v(const Scenario& scenario, std::span<const double> V_list);

// trace.csv, report.json, series_queues.csv, series_cost.csv.
void emit_outputs(const ExperimentResult& result, const std::string& out_dir);

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace dpp::harness
