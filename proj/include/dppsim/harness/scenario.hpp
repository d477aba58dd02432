#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dppsim/core/algorithm.hpp"
#include "dppsim/core/types.hpp"
#include "dppsim/internet/internet.hpp"
#include "dppsim/multihop/multihop.hpp"
#include "dppsim/oracle/oracle.hpp"

namespace dpp::harness {

// Event-id stream: explicit list, seeded iid draw, or a finite Markov chain.
struct EventSource {
    enum class Type { Explicit, Iid, Markov };
    Type type = Type::Explicit;
    std::vector<std::size_t> ids;       // Explicit
    std::vector<double> weights;        // Iid (unnormalized)
    oracle::MarkovChainSpec chain;      // Markov
    std::uint64_t seed = 0;

    std::vector<std::size_t> generate(std::size_t horizon, std::size_t catalog_size) const;
};

struct InternetProfile {
    std::vector<std::vector<double>> capacity_options;
    std::vector<double> arrivals;
};

struct MultihopProfile {
    std::size_t state = 0;
    std::vector<double> arrivals;
};

struct FrameParams {
    std::size_t T = 1, R = 1;
};

struct ApproxSpec {
    double C = 0.0, eps_V = 0.0, eps_Z = 0.0, eps_Q = 0.0, eps_H = 0.0;
    std::string mode = "worst";  // "worst" | "random"
    std::uint64_t seed = 0;

    bool active() const {
        return C != 0.0 || eps_V != 0.0 || eps_Z != 0.0 || eps_Q != 0.0 || eps_H != 0.0;
    }
    core::ApproximationPolicy policy() const;
};

struct Scenario {
    int schema_version = 1;
    std::string kind;  // "general" | "internet" | "multihop"
    double V = 1.0;
    std::size_t horizon = 0;
    std::optional<FrameParams> frames;
    std::uint64_t budget = oracle::kDefaultBudget;
    std::string mode = "exact";  // multihop transmit mode
    ApproxSpec approx;
    std::optional<double> slater_delta;
    std::optional<double> theta_mult;
    EventSource source;

    std::optional<core::SystemModel> general;
    std::optional<internet::Model> inet;
    std::vector<InternetProfile> inet_profiles;
    internet::DelaySpec delay;
    std::optional<multihop::Model> mh;
    std::vector<MultihopProfile> mh_profiles;

    std::size_t catalog_size() const;
    const core::ProblemFrame& frame() const;

    std::vector<std::size_t> event_ids() const;
    std::vector<core::EventSample> general_events() const;
    std::vector<internet::InternetEvent> internet_events() const;
    std::vector<multihop::MultihopEvent> multihop_events() const;

    // Per-event-id candidate action lists (used for Slater enumeration and
    // the oracle); indexed like the catalog / profile list.
    std::vector<std::vector<core::AttributeEvaluation>> per_event_actions() const;

private:
    mutable std::optional<core::ProblemFrame> frame_cache_;
};

// True iff the action meets the feasibility margin delta (Assumption A2 at
// delta = 0, the Slater form for delta > 0).
bool action_feasible(const core::ProblemFrame& frame, const core::AttributeEvaluation& ev,
                     double delta);

// Parses and fully validates a scenario (dimension checks, A1/A2 by
// enumeration, A3 when slater_delta is present).  Throws ConfigError /
// std::invalid_argument naming the violated assumption or field, and
// nlohmann's parse_error (with byte position) on malformed JSON.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

}  // namespace dpp::harness
