#include "dppsim/harness/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dppsim/core/cost_terms.hpp"

namespace dpp::harness {

using json = nlohmann::json;
using core::Interval;
using core::ScalarTerm;
using core::UtilitySpec;

core::ApproximationPolicy ApproxSpec::policy() const {
    if (!active()) return core::ApproximationPolicy::exact();
    auto m = mode == "random" ? core::ApproximationPolicy::Mode::RandomWithinBudget
                              : core::ApproximationPolicy::Mode::WorstWithinBudget;
    return core::ApproximationPolicy::state_scaled(C, eps_V, eps_Z, eps_Q, eps_H, seed, m);
}

std::vector<std::size_t> EventSource::generate(std::size_t horizon,
                                               std::size_t catalog_size) const {
    std::vector<std::size_t> out;
    out.reserve(horizon);
    switch (type) {
        case Type::Explicit: {
            if (ids.size() < horizon)
                throw ConfigError("explicit event list shorter than the horizon");
            for (std::size_t t = 0; t < horizon; ++t) {
                if (ids[t] >= catalog_size)
                    throw ConfigError("explicit event id out of range");
                out.push_back(ids[t]);
            }
            return out;
        }
        case Type::Iid: {
            if (weights.size() != catalog_size)
                throw ConfigError("iid weight count disagrees with the event catalog");
            double total = 0.0;
            for (double w : weights) {
                if (w < 0.0) throw ConfigError("negative iid weight");
                total += w;
            }
            if (!(total > 0.0)) throw ConfigError("iid weights sum to zero");
            CounterRng rng(seed);
            for (std::size_t t = 0; t < horizon; ++t) {
                double u = rng.next_double() * total;
                double acc = 0.0;
                std::size_t pick = catalog_size - 1;
                for (std::size_t i = 0; i < weights.size(); ++i) {
                    acc += weights[i];
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
                out.push_back(pick);
            }
            return out;
        }
        case Type::Markov: {
            oracle::MarkovChainSpec spec = chain;
            spec.seed = seed;
            auto events = spec.sample(horizon);
            for (const auto& ev : events) {
                if (ev.event_id >= catalog_size)
                    throw ConfigError("markov event id out of range");
                out.push_back(ev.event_id);
            }
            return out;
        }
    }
    throw ConfigError("unknown event source type");
}

std::size_t Scenario::catalog_size() const {
    if (kind == "general") return general->catalog.size();
    if (kind == "internet") return inet_profiles.size();
    return mh_profiles.size();
}

const core::ProblemFrame& Scenario::frame() const {
    if (kind == "general") return general->frame;
    if (!frame_cache_) {
        frame_cache_ = kind == "internet" ? inet->frame() : mh->frame();
    }
    return *frame_cache_;
}

std::vector<std::size_t> Scenario::event_ids() const {
    return source.generate(horizon, catalog_size());
}

std::vector<core::EventSample> Scenario::general_events() const {
    std::vector<core::EventSample> out;
    auto ids = event_ids();
    out.reserve(ids.size());
    for (std::size_t t = 0; t < ids.size(); ++t)
        out.push_back({static_cast<std::int64_t>(t), ids[t]});
    return out;
}

std::vector<internet::InternetEvent> Scenario::internet_events() const {
    std::vector<internet::InternetEvent> out;
    auto ids = event_ids();
    out.reserve(ids.size());
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const InternetProfile& p = inet_profiles[ids[t]];
        internet::InternetEvent ev;
        ev.slot = static_cast<std::int64_t>(t);
        ev.event_id = ids[t];
        ev.capacity_options = p.capacity_options;
        ev.arrivals = p.arrivals;
        out.push_back(std::move(ev));
    }
    return out;
}

std::vector<multihop::MultihopEvent> Scenario::multihop_events() const {
    std::vector<multihop::MultihopEvent> out;
    auto ids = event_ids();
    out.reserve(ids.size());
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const MultihopProfile& p = mh_profiles[ids[t]];
        out.push_back({static_cast<std::int64_t>(t), ids[t], p.state, p.arrivals});
    }
    return out;
}

std::vector<std::vector<core::AttributeEvaluation>> Scenario::per_event_actions() const {
    std::vector<std::vector<core::AttributeEvaluation>> out;
    if (kind == "general") {
        for (const auto& entry : general->catalog) out.push_back(entry.actions);
    } else if (kind == "internet") {
        for (std::size_t i = 0; i < inet_profiles.size(); ++i) {
            internet::InternetEvent ev;
            ev.capacity_options = inet_profiles[i].capacity_options;
            ev.arrivals = inet_profiles[i].arrivals;
            out.push_back(inet->enumerate_actions(ev));
        }
    } else {
        for (const auto& p : mh_profiles) {
            multihop::MultihopEvent ev;
            ev.state = p.state;
            ev.arrivals = p.arrivals;
            out.push_back(mh->enumerate_actions(ev, budget));
        }
    }
    return out;
}

bool action_feasible(const core::ProblemFrame& frame, const core::AttributeEvaluation& ev,
                     double delta) {
    return core::satisfies_feasibility(frame, ev, delta);
}

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
    throw ConfigError("scenario field '" + where + "': " + what);
}

double get_num(const json& j, const std::string& key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        field_error(key, "missing");
    }
    if (!j[key].is_number()) field_error(key, "not a number");
    return j[key].get<double>();
}

std::size_t get_index(const json& j, const std::string& key,
                      std::optional<std::size_t> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        field_error(key, "missing");
    }
    if (!j[key].is_number_unsigned()) field_error(key, "not a non-negative integer");
    return j[key].get<std::size_t>();
}

std::vector<double> get_vec(const json& j, const std::string& key, std::size_t want) {
    if (!j.contains(key) || !j[key].is_array()) field_error(key, "missing array");
    auto v = j[key].get<std::vector<double>>();
    if (v.size() != want) {
        std::ostringstream os;
        os << "expected " << want << " entries, got " << v.size();
        field_error(key, os.str());
    }
    return v;
}

ScalarTerm parse_term(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) field_error(where, "cost term needs a type");
    std::string type = j["type"].get<std::string>();
    if (type == "zero") return ScalarTerm::zero();
    if (type == "linear")
        return ScalarTerm::linear(get_num(j, "slope"), get_num(j, "offset", 0.0));
    if (type == "quadratic")
        return ScalarTerm::quadratic(get_num(j, "a"), get_num(j, "b", 0.0),
                                     get_num(j, "c", 0.0));
    if (type == "abs")
        return ScalarTerm::abs_dev(get_num(j, "weight"), get_num(j, "center", 0.0));
    if (type == "neg_log1p") return ScalarTerm::neg_log1p(get_num(j, "weight"));
    field_error(where, "unknown cost term type '" + type + "'");
}

UtilitySpec parse_utility(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) field_error(where, "utility needs a type");
    std::string type = j["type"].get<std::string>();
    UtilitySpec u;
    u.weight = get_num(j, "weight", 1.0);
    if (u.weight < 0.0) field_error(where, "negative utility weight");
    if (type == "log1p") {
        u.kind = UtilitySpec::Kind::Log1p;
    } else if (type == "linear") {
        u.kind = UtilitySpec::Kind::Linear;
    } else {
        field_error(where, "unknown utility type '" + type + "'");
    }
    return u;
}

std::vector<Interval> parse_intervals(const json& j, const std::string& where) {
    if (!j.is_array()) field_error(where, "expected an array of [lo, hi] pairs");
    std::vector<Interval> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) field_error(where, "entry is not [lo, hi]");
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
}

EventSource parse_source(const json& j, std::uint64_t default_seed) {
    if (!j.is_object() || !j.contains("type")) field_error("source", "missing type");
    EventSource src;
    src.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : default_seed;
    std::string type = j["type"].get<std::string>();
    if (type == "explicit") {
        src.type = EventSource::Type::Explicit;
        if (!j.contains("ids")) field_error("source.ids", "missing");
        src.ids = j["ids"].get<std::vector<std::size_t>>();
    } else if (type == "iid") {
        src.type = EventSource::Type::Iid;
        if (!j.contains("weights")) field_error("source.weights", "missing");
        src.weights = j["weights"].get<std::vector<double>>();
    } else if (type == "markov") {
        src.type = EventSource::Type::Markov;
        if (!j.contains("P")) field_error("source.P", "missing");
        src.chain.P = j["P"].get<std::vector<std::vector<double>>>();
        src.chain.initial_state = get_index(j, "initial", std::size_t{0});
        if (j.contains("event_of_state"))
            src.chain.event_of_state = j["event_of_state"].get<std::vector<std::size_t>>();
        src.chain.seed = src.seed;
        src.chain.validate();
    } else {
        field_error("source.type", "unknown type '" + type + "'");
    }
    return src;
}

core::SystemModel parse_general(const json& j) {
    core::SystemModel model;
    model.frame.K = get_index(j, "K");
    model.frame.L = get_index(j, "L");
    model.frame.M = get_index(j, "M");
    const std::size_t K = model.frame.K, L = model.frame.L, M = model.frame.M;

    std::vector<Interval> box =
        M == 0 ? std::vector<Interval>{} : parse_intervals(j.at("box"), "general.box");
    if (box.size() != M) field_error("general.box", "needs one [lo, hi] per m");
    std::optional<std::vector<Interval>> x_set;
    if (j.contains("x_set") && !j["x_set"].is_null()) {
        x_set = parse_intervals(j["x_set"], "general.x_set");
        if (x_set->size() != M) field_error("general.x_set", "needs one interval per m");
    }
    std::vector<ScalarTerm> f_terms;
    for (std::size_t m = 0; m < M; ++m)
        f_terms.push_back(parse_term(j.at("f").at(m), "general.f"));
    std::vector<std::vector<ScalarTerm>> g_terms;
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<ScalarTerm> row;
        for (std::size_t m = 0; m < M; ++m)
            row.push_back(parse_term(j.at("g").at(l).at(m), "general.g"));
        g_terms.push_back(std::move(row));
    }
    model.frame.cost = core::make_separable_cost(f_terms, g_terms, box, x_set);

    if (!j.contains("catalog") || !j["catalog"].is_array() || j["catalog"].empty())
        field_error("general.catalog", "missing or empty");
    for (const auto& je : j["catalog"]) {
        core::CatalogEntry entry;
        if (!je.contains("actions") || je["actions"].empty())
            field_error("general.catalog.actions", "missing or empty");
        for (const auto& ja : je["actions"]) {
            core::AttributeEvaluation ev;
            ev.arrivals = get_vec(ja, "a", K);
            ev.services = get_vec(ja, "b", K);
            ev.attributes = get_vec(ja, "x", M);
            ev.penalties = get_vec(ja, "y", L + 1);
            entry.actions.push_back(std::move(ev));
        }
        model.catalog.push_back(std::move(entry));
    }

    core::Bounds& bounds = model.frame.bounds;
    if (j.contains("bounds")) {
        const json& jb = j["bounds"];
        bounds.a_max = get_vec(jb, "a_max", K);
        bounds.b_max = get_vec(jb, "b_max", K);
        bounds.x_range = parse_intervals(jb.at("x_range"), "general.bounds.x_range");
        bounds.y_range = parse_intervals(jb.at("y_range"), "general.bounds.y_range");
    } else {
        // Tight A1 constants derived from the catalog.
        bounds.a_max.assign(K, 0.0);
        bounds.b_max.assign(K, 0.0);
        bounds.x_range = box;
        bounds.y_range.assign(L + 1, Interval{kInf, -kInf});
        for (const auto& entry : model.catalog) {
            for (const auto& ev : entry.actions) {
                for (std::size_t k = 0; k < K; ++k) {
                    bounds.a_max[k] = std::max(bounds.a_max[k], ev.arrivals[k]);
                    bounds.b_max[k] = std::max(bounds.b_max[k], ev.services[k]);
                }
                for (std::size_t l = 0; l <= L; ++l) {
                    bounds.y_range[l].lo = std::min(bounds.y_range[l].lo, ev.penalties[l]);
                    bounds.y_range[l].hi = std::max(bounds.y_range[l].hi, ev.penalties[l]);
                }
            }
        }
    }
    model.validate();
    return model;
}

internet::Model parse_internet(const json& j, std::vector<InternetProfile>& profiles,
                               internet::DelaySpec& delay) {
    internet::Model model;
    model.nodes = get_index(j, "nodes");
    if (!j.contains("links")) field_error("internet.links", "missing");
    for (const auto& jl : j["links"]) {
        model.links.push_back({get_index(jl, "from"), get_index(jl, "to"),
                               get_num(jl, "cap_max")});
    }
    if (!j.contains("sessions")) field_error("internet.sessions", "missing");
    for (const auto& js : j["sessions"]) {
        internet::Session s;
        s.source = get_index(js, "source");
        s.dest = get_index(js, "dest");
        s.a_max = get_num(js, "A_max");
        s.utility = parse_utility(js.at("utility"), "internet.sessions.utility");
        if (js.contains("paths") && !js["paths"].is_null())
            s.explicit_paths = js["paths"].get<std::vector<internet::Path>>();
        model.sessions.push_back(std::move(s));
    }
    model.build();

    if (!j.contains("profiles") || j["profiles"].empty())
        field_error("internet.profiles", "missing or empty");
    for (const auto& jp : j["profiles"]) {
        InternetProfile p;
        if (jp.contains("capacity_options")) {
            p.capacity_options =
                jp["capacity_options"].get<std::vector<std::vector<double>>>();
        } else {
            p.capacity_options = {get_vec(jp, "capacities", model.links.size())};
        }
        for (const auto& caps : p.capacity_options) {
            if (caps.size() != model.links.size())
                field_error("internet.profiles.capacities", "width disagrees with links");
            for (std::size_t l = 0; l < caps.size(); ++l) {
                if (caps[l] < 0.0 || caps[l] > model.links[l].cap_max + kSlack)
                    field_error("internet.profiles.capacities",
                                "capacity outside [0, cap_max]");
            }
        }
        p.arrivals = get_vec(jp, "arrivals", model.sessions.size());
        for (std::size_t m = 0; m < p.arrivals.size(); ++m) {
            if (p.arrivals[m] < 0.0 || p.arrivals[m] > model.sessions[m].a_max + kSlack)
                field_error("internet.profiles.arrivals", "arrival outside [0, A_max]");
        }
        profiles.push_back(std::move(p));
    }

    delay = internet::DelaySpec::none();
    if (j.contains("delay") && !j["delay"].is_null()) {
        const json& jd = j["delay"];
        std::string type = jd.at("type").get<std::string>();
        if (type == "none") {
            delay = internet::DelaySpec::none();
        } else if (type == "constant") {
            auto tau = jd.at("tau").get<std::int64_t>();
            if (tau < 0) throw ConfigError("negative feedback delay");
            delay = internet::DelaySpec::constant(tau, model.links.size());
        } else if (type == "per_link") {
            auto tau = jd.at("tau").get<std::vector<std::int64_t>>();
            delay = internet::DelaySpec::per_link(std::move(tau));
            delay.validate(model.links.size());
        } else {
            field_error("internet.delay.type", "unknown type '" + type + "'");
        }
    }
    return model;
}

multihop::Model parse_multihop(const json& j, std::vector<MultihopProfile>& profiles) {
    multihop::Model model;
    model.nodes = get_index(j, "nodes");
    if (!j.contains("sessions")) field_error("multihop.sessions", "missing");
    for (const auto& js : j["sessions"]) {
        multihop::Session s;
        s.source = get_index(js, "source");
        s.dest = get_index(js, "dest");
        s.a_max = get_num(js, "A_max");
        s.utility = parse_utility(js.at("utility"), "multihop.sessions.utility");
        model.sessions.push_back(std::move(s));
    }
    if (!j.contains("states") || j["states"].empty())
        field_error("multihop.states", "missing or empty");
    for (const auto& jst : j["states"]) {
        multihop::TopologyState st;
        for (const auto& jopt : jst.at("options")) {
            multihop::RateOption opt;
            for (const auto& je : jopt) {
                opt.push_back({get_index(je, "from"), get_index(je, "to"),
                               get_num(je, "rate")});
            }
            st.options.push_back(std::move(opt));
        }
        model.states.push_back(std::move(st));
    }
    if (j.contains("bias") && !j["bias"].is_null()) {
        const json& jb = j["bias"];
        model.bias.nodes = model.nodes;
        auto rows = jb.at("theta").get<std::vector<std::vector<double>>>();
        if (rows.size() != model.nodes) field_error("multihop.bias.theta", "needs N rows");
        for (const auto& row : rows) {
            if (row.size() != model.nodes)
                field_error("multihop.bias.theta", "needs N columns");
            model.bias.theta.insert(model.bias.theta.end(), row.begin(), row.end());
        }
    }
    model.build();

    if (!j.contains("profiles") || j["profiles"].empty())
        field_error("multihop.profiles", "missing or empty");
    for (const auto& jp : j["profiles"]) {
        MultihopProfile p;
        p.state = get_index(jp, "state");
        if (p.state >= model.states.size())
            field_error("multihop.profiles.state", "state id out of range");
        p.arrivals = get_vec(jp, "arrivals", model.sessions.size());
        for (std::size_t m = 0; m < p.arrivals.size(); ++m) {
            if (p.arrivals[m] < 0.0 || p.arrivals[m] > model.sessions[m].a_max + kSlack)
                field_error("multihop.profiles.arrivals", "arrival outside [0, A_max]");
        }
        profiles.push_back(std::move(p));
    }
    return model;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j = json::parse(json_text);
    Scenario sc;
    sc.schema_version = static_cast<int>(get_num(j, "schema_version"));
    if (sc.schema_version != 1) field_error("schema_version", "unsupported version");
    if (!j.contains("kind")) field_error("kind", "missing");
    sc.kind = j["kind"].get<std::string>();
    sc.V = get_num(j, "V", 1.0);
    if (!(sc.V >= 0.0)) field_error("V", "must be non-negative");
    sc.horizon = get_index(j, "horizon");
    std::uint64_t default_seed =
        j.contains("seed") ? j["seed"].get<std::uint64_t>() : 0;
    if (j.contains("frames") && !j["frames"].is_null()) {
        FrameParams fp;
        fp.T = get_index(j["frames"], "T");
        fp.R = get_index(j["frames"], "R");
        if (fp.T == 0 || fp.R == 0) field_error("frames", "T and R must be >= 1");
        if (fp.T * fp.R != sc.horizon)
            field_error("frames", "horizon must equal R*T when frames are requested");
        sc.frames = fp;
    }
    if (j.contains("budget")) sc.budget = j["budget"].get<std::uint64_t>();
    if (j.contains("mode")) {
        sc.mode = j["mode"].get<std::string>();
        if (sc.mode != "exact" && sc.mode != "capprox")
            field_error("mode", "must be 'exact' or 'capprox'");
    }
    if (j.contains("approximation") && !j["approximation"].is_null()) {
        const json& ja = j["approximation"];
        sc.approx.C = get_num(ja, "C", 0.0);
        sc.approx.eps_V = get_num(ja, "eps_V", 0.0);
        sc.approx.eps_Z = get_num(ja, "eps_Z", 0.0);
        sc.approx.eps_Q = get_num(ja, "eps_Q", 0.0);
        sc.approx.eps_H = get_num(ja, "eps_H", 0.0);
        if (ja.contains("mode")) sc.approx.mode = ja["mode"].get<std::string>();
        sc.approx.seed = ja.contains("seed") ? ja["seed"].get<std::uint64_t>() : default_seed;
    }
    if (j.contains("slater_delta") && !j["slater_delta"].is_null())
        sc.slater_delta = get_num(j, "slater_delta");
    if (j.contains("theta_mult") && !j["theta_mult"].is_null()) {
        sc.theta_mult = get_num(j, "theta_mult");
        if (!(*sc.theta_mult > 0.0 && *sc.theta_mult <= 1.0))
            field_error("theta_mult", "must be in (0, 1]");
    }

    if (sc.kind == "general") {
        if (!j.contains("general")) field_error("general", "missing model section");
        sc.general = parse_general(j["general"]);
        sc.source = parse_source(j["general"].at("source"), default_seed);
    } else if (sc.kind == "internet") {
        if (!j.contains("internet")) field_error("internet", "missing model section");
        sc.inet = parse_internet(j["internet"], sc.inet_profiles, sc.delay);
        sc.source = parse_source(j["internet"].at("source"), default_seed);
    } else if (sc.kind == "multihop") {
        if (!j.contains("multihop")) field_error("multihop", "missing model section");
        sc.mh = parse_multihop(j["multihop"], sc.mh_profiles);
        sc.source = parse_source(j["multihop"].at("source"), default_seed);
    } else {
        field_error("kind", "unknown kind '" + sc.kind + "'");
    }

    // Feasibility enumeration: A2 always, A3 when a Slater margin is given.
    auto actions_by_event = sc.per_event_actions();
    const core::ProblemFrame& frame = sc.frame();
    for (std::size_t e = 0; e < actions_by_event.size(); ++e) {
        bool a2 = false, a3 = !sc.slater_delta.has_value();
        for (const auto& ev : actions_by_event[e]) {
            if (!a2) a2 = action_feasible(frame, ev, 0.0);
            if (!a3) a3 = action_feasible(frame, ev, *sc.slater_delta);
            if (a2 && a3) break;
        }
        if (!a2) {
            std::ostringstream os;
            os << "Assumption A2 violated: event " << e << " has no feasible action";
            throw std::invalid_argument(os.str());
        }
        if (!a3) {
            std::ostringstream os;
            os << "Assumption A3 violated: event " << e
               << " has no action with margin delta=" << *sc.slater_delta;
            throw std::invalid_argument(os.str());
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace dpp::harness
