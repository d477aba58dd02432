#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dppsim/core/cost_terms.hpp"
#include "dppsim/core/types.hpp"

namespace dpp::internet {

struct NoPathError : std::runtime_error {
    explicit NoPathError(std::size_t session)
        : std::runtime_error("session " + std::to_string(session) +
                             " has no path to its destination") {}
};

struct DirectedLink {
    std::size_t from = 0, to = 0;
    double cap_max = 0.0;
};

// A path is a sequence of link indices from source to destination.
using Path = std::vector<std::size_t>;

struct Session {
    std::size_t source = 0, dest = 0;
    double a_max = 1.0;
    core::UtilitySpec utility;
    std::optional<std::vector<Path>> explicit_paths;  // default: all simple paths
};

// Per-slot random event: link capacities (one or more resource options) plus
// session arrivals.  A single option is the plain wireline model; multiple
// options enable the wireless capacity-allocation step.
struct InternetEvent {
    std::int64_t slot = 0;
    std::size_t event_id = 0;
    std::vector<std::vector<double>> capacity_options;  // each of size L
    std::vector<double> arrivals;                       // size M

    const std::vector<double>& capacities(std::size_t option) const {
        return capacity_options.at(option);
    }
};

// Per-link feedback delays for the Z values used by routing; empty = none.
struct DelaySpec {
    std::vector<std::int64_t> tau;

    static DelaySpec none() { return {}; }
    static DelaySpec constant(std::int64_t t, std::size_t links);
    static DelaySpec per_link(std::vector<std::int64_t> t);

    bool active() const { return !tau.empty(); }
    std::int64_t max() const;
    void validate(std::size_t links) const;  // throws ConfigError on negative delay
};

// Z (link) and H (session) virtual queues; there are no physical queues.
struct InternetState {
    std::vector<double> Z;  // size L
    std::vector<double> H;  // size M
    std::int64_t slot = 0;
};

struct Model {
    std::size_t nodes = 0;
    std::vector<DirectedLink> links;
    std::vector<Session> sessions;

    // Derived by build():
    std::vector<std::vector<Path>> path_sets;        // per session, sorted by node sequence
    std::vector<std::vector<bool>> link_usable;      // [session][link): 1_{l,m}
    std::vector<std::vector<std::size_t>> path_nodes_cache;  // flattened per session

    void build();
    std::vector<std::size_t> path_node_sequence(std::size_t session, const Path& path) const;

    double nu_max() const;
    double a_max_overall() const;
    // Deterministic Z ceiling: V*nu_max + A^max + (tau_max+1)*M*A^max, which
    // for tau_max = 0 is the undelayed V*nu_max + (M+1)*A^max bound.
    double z_bound(double V, std::int64_t tau_max = 0) const;
    double h_upper(double V, std::size_t session) const;  // V*nu_m + A_m^max

    // Embedding into the general framework (y_l = link inflow - capacity,
    // g = 0, f = -phi) for residual accounting, bounds, and the oracle.
    core::ProblemFrame frame() const;

    // Appendix-style internet constants; B = D here.
    double internet_B() const;

    // Candidate evaluations for one slot: capacity options x per-session
    // {drop} ∪ {admit on one path}.
    std::vector<core::AttributeEvaluation> enumerate_actions(const InternetEvent& ev) const;
    core::ActionTable action_table(std::span<const InternetEvent> events) const;
};

// gamma_m maximizing V*phi(gamma) - H*gamma over [0, a_max].
double aux_update(double H, double V, const core::UtilitySpec& phi, double a_max);

struct RouteDecision {
    double x = 0.0;                  // admitted amount (arrival or 0)
    std::optional<Path> path;        // set iff admitted
    double path_weight = 0.0;        // weight of the best path
};

// Minimum-total-Z path (ties to the lexicographically smallest node
// sequence); admits everything when the weight is <= H, drops otherwise.
// Throws NoPathError when the session has no path.
RouteDecision route_and_admit(const Model& model, std::size_t session, double arrival,
                              double H, std::span<const double> z_weights);

// Z_l(t - tau_l) with zero pre-history; history[i] is Z at slot i.
std::vector<double> delayed_queue_view(std::span<const std::vector<double>> z_history,
                                       const DelaySpec& delay, std::int64_t t);

// Option maximizing sum_l C_l * Z_l; ties to the lowest index.
std::size_t wireless_capacity_alloc(std::span<const std::vector<double>> options,
                                    std::span<const double> Z);
// Indices of options whose score is within factor theta of the maximum.
std::vector<std::size_t> options_within_theta(std::span<const std::vector<double>> options,
                                              std::span<const double> Z, double theta);

class Simulator {
public:
    Simulator(const Model& model, double V, DelaySpec delay = DelaySpec::none());

    core::SlotRecord step(const InternetEvent& event);
    core::Trace run(std::span<const InternetEvent> events);

    const InternetState& state() const { return state_; }
    // Largest per-slot drift-penalty score gap caused by stale Z values; 0
    // on undelayed runs.  Reported, not bounded analytically.
    double max_score_gap() const { return max_score_gap_; }

private:
    const Model& model_;
    double V_;
    DelaySpec delay_;
    InternetState state_;
    std::vector<std::vector<double>> z_history_;
    double max_score_gap_ = 0.0;
};

}  // namespace dpp::internet
