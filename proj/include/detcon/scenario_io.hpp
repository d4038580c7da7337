#pragma once

// JSON scenario files and result artifacts. Graph generator shorthands
// use 1-based agent labels; everything internal is 0-based. Loading a
// scenario, serializing it and loading it again yields an identical
// internal model (generators lower to explicit adjacency on load).

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "detcon/engine.hpp"
#include "detcon/metrics.hpp"

namespace detcon {

using json = nlohmann::json;

// --- signals ---

inline json signal_to_json(const SignalExpr& s) {
    struct Visit {
        json operator()(const SignalExpr::Constant& c) const {
            return {{"kind", "const"}, {"value", c.value}};
        }
        json operator()(const SignalExpr::Sinusoid& s) const {
            json j{{"kind", s.cosine ? "cos" : "sin"}, {"amplitude", s.amplitude},
                   {"omega", s.omega}};
            if (s.phase != 0.0) j["phase"] = s.phase;
            return j;
        }
        json operator()(const SignalExpr::Arctan& a) const {
            return {{"kind", "atan"}, {"rate", a.rate}};
        }
        json operator()(const SignalExpr::Exponential& e) const {
            return {{"kind", "exp"}, {"rate", e.rate}};
        }
        json operator()(const SignalExpr::Reciprocal& r) const {
            return {{"kind", "rational"}, {"offset", r.offset}, {"power", r.power}};
        }
        json operator()(const SignalExpr::Polynomial& p) const {
            return {{"kind", "poly"}, {"coeffs", p.coeffs}};
        }
        json operator()(const SignalExpr::Scale& s) const {
            return {{"kind", "scale"}, {"factor", s.factor}, {"term", signal_to_json(s.term)}};
        }
        json operator()(const SignalExpr::Sum& s) const {
            json terms = json::array();
            for (const auto& t : s.terms) terms.push_back(signal_to_json(t));
            return {{"kind", "sum"}, {"terms", terms}};
        }
    };
    return std::visit(Visit{}, s.node().payload);
}

inline SignalExpr signal_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") return SignalExpr::constant(j.at("value").get<double>());
    if (kind == "sin" || kind == "cos") {
        const double amp = j.value("amplitude", 1.0);
        const double omega = j.at("omega").get<double>();
        const double phase = j.value("phase", 0.0);
        return kind == "sin" ? SignalExpr::sine(amp, omega, phase)
                             : SignalExpr::cosine(amp, omega, phase);
    }
    if (kind == "atan") return SignalExpr::arctan(j.at("rate").get<double>());
    if (kind == "exp") return SignalExpr::exponential(j.at("rate").get<double>());
    if (kind == "rational") {
        return SignalExpr::reciprocal(j.at("offset").get<double>(), j.value("power", 1.0));
    }
    if (kind == "poly") return SignalExpr::polynomial(j.at("coeffs").get<std::vector<double>>());
    if (kind == "scale") {
        return signal_from_json(j.at("term")).scaled(j.at("factor").get<double>());
    }
    if (kind == "sum") {
        const auto& terms = j.at("terms");
        if (!terms.is_array() || terms.empty()) {
            throw std::invalid_argument("signal sum needs a nonempty term array");
        }
        SignalExpr acc = signal_from_json(terms[0]);
        for (std::size_t k = 1; k < terms.size(); ++k) acc = acc + signal_from_json(terms[k]);
        return acc;
    }
    throw std::invalid_argument("unknown signal kind: " + kind);
}

// --- graphs and schedules ---

inline json graph_to_json(const WeightedDigraph& g) {
    json rows = json::array();
    for (int i = 0; i < g.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < g.size(); ++j) row.push_back(g.adjacency()(i, j));
        rows.push_back(row);
    }
    return {{"adjacency", rows}};
}

inline WeightedDigraph graph_from_json(const json& j, int n_hint = 0) {
    if (j.contains("adjacency")) {
        const auto& rows = j.at("adjacency");
        const auto n = static_cast<Eigen::Index>(rows.size());
        Matrix a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != n) {
                throw std::invalid_argument("adjacency matrix must be square");
            }
            for (Eigen::Index k = 0; k < n; ++k) a(i, k) = row[static_cast<std::size_t>(k)];
        }
        std::optional<WeightBounds> wb;
        if (j.contains("weight_bounds")) {
            wb = WeightBounds{j["weight_bounds"].at(0).get<double>(),
                              j["weight_bounds"].at(1).get<double>()};
        }
        return WeightedDigraph(std::move(a), wb);
    }
    const std::string kind = j.at("kind").get<std::string>();
    const int n = j.value("n", n_hint);
    if (n <= 0) throw std::invalid_argument("graph generator needs an agent count");
    const double w = j.value("weight", 1.0);
    if (kind == "ring") return WeightedDigraph::ring(n, w, j.value("directed", false));
    if (kind == "complete") return WeightedDigraph::complete(n, w);
    if (kind == "edgeless") return WeightedDigraph::edgeless(n);
    const auto index = [&](const char* key) {
        const int v = j.at(key).get<int>();  // 1-based in scenario files
        if (v < 1 || v > n) throw std::invalid_argument("agent label out of range");
        return v - 1;
    };
    if (kind == "pair") return WeightedDigraph::pair_link(n, index("i"), index("j"), w);
    if (kind == "ring_minus_edge") {
        return WeightedDigraph::ring_minus_edge(n, index("i"), index("j"), w);
    }
    throw std::invalid_argument("unknown graph kind: " + kind);
}

inline json schedule_to_json(const GraphSchedule& s) {
    json segs = json::array();
    for (const auto& seg : s.segments()) {
        segs.push_back({{"t", seg.start}, {"graph", graph_to_json(seg.graph)}});
    }
    json j{{"segments", segs}, {"horizon", s.horizon()}};
    if (std::isfinite(s.min_switch_gap())) j["min_gap"] = s.min_switch_gap();
    return j;
}

inline GraphSchedule schedule_from_json(const json& j, double default_horizon, int n_hint = 0) {
    std::vector<GraphSchedule::Segment> segs;
    for (const auto& sj : j.at("segments")) {
        segs.push_back({sj.at("t").get<double>(), graph_from_json(sj.at("graph"), n_hint)});
    }
    const double horizon = j.value("horizon", default_horizon);
    std::optional<double> min_gap;
    if (j.contains("min_gap") && j["min_gap"].is_number()) {
        min_gap = j["min_gap"].get<double>();
    }
    return GraphSchedule(std::move(segs), horizon, min_gap);
}

// --- triggers ---

inline Vector eps_from_json(const json& j, int n) {
    if (j.is_number()) return Vector::Constant(n, j.get<double>());
    const auto vals = j.get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != n) {
        throw std::invalid_argument("eps array must have one entry per agent");
    }
    return Eigen::Map<const Vector>(vals.data(), n);
}

inline json trigger_to_json(const TriggerLaw& law) {
    struct Visit {
        json operator()(const DirectedThreshold& d) const {
            return {{"law", "directed"}, {"eps", std::vector<double>(d.eps.begin(), d.eps.end())}};
        }
        json operator()(const UndirectedRelative& u) const {
            return {{"law", "undirected"},
                    {"eps", std::vector<double>(u.eps.begin(), u.eps.end())}};
        }
        json operator()(const ContinuousLaw&) const { return {{"law", "continuous"}}; }
        json operator()(const PeriodicLaw& p) const {
            return {{"law", "periodic"}, {"delta", p.delta}};
        }
    };
    return std::visit(Visit{}, law);
}

inline TriggerLaw trigger_from_json(const json& j, int n) {
    const std::string law = j.at("law").get<std::string>();
    if (law == "directed") return DirectedThreshold{eps_from_json(j.at("eps"), n)};
    if (law == "undirected") return UndirectedRelative{eps_from_json(j.at("eps"), n)};
    if (law == "continuous") return ContinuousLaw{};
    if (law == "periodic") return PeriodicLaw{j.at("delta").get<double>()};
    throw std::invalid_argument("unknown trigger law: " + law);
}

// --- scenarios ---

inline json vector_to_json(const Vector& v) {
    return std::vector<double>(v.begin(), v.end());
}

inline Vector vector_from_json(const json& j, int n, const char* what) {
    const auto vals = j.get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != n) {
        throw std::invalid_argument(std::string(what) + " must have one entry per agent");
    }
    return Eigen::Map<const Vector>(vals.data(), n);
}

inline json scenario_to_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["alpha"] = sc.alpha;
    j["beta"] = sc.beta;
    j["horizon"] = sc.horizon;
    j["h"] = sc.h;
    j["integrator"] = sc.integrator == IntegratorKind::RK4 ? "rk4" : "euler";
    if (sc.formulation == Formulation::InputShifted) j["formulation"] = "shifted";
    j["trigger"] = trigger_to_json(sc.trigger);
    json sigs = json::array();
    for (const auto& s : sc.signals) sigs.push_back(signal_to_json(s));
    j["signals"] = sigs;
    j["schedule"] = schedule_to_json(sc.schedule);
    j["x0"] = vector_to_json(sc.x0);
    j["v0"] = vector_to_json(sc.v0);
    j["tail_fraction"] = sc.tail_fraction;
    j["bounds_grid_step"] = sc.bounds_grid_step;
    if (sc.require_certified) j["require_certified"] = true;
    if (sc.manual_cert) {
        j["rho"] = sc.manual_cert->rho;
        j["lambda_sigma"] = sc.manual_cert->lambda_sigma;
    }
    return j;
}

inline Scenario scenario_from_json(const json& j) {
    Scenario sc;
    sc.name = j.value("name", "scenario");
    sc.horizon = j.at("horizon").get<double>();
    sc.h = j.value("h", 1e-3);
    sc.alpha = j.value("alpha", 1.0);
    sc.beta = j.value("beta", 1.0);
    const std::string integ = j.value("integrator", "rk4");
    if (integ == "rk4") {
        sc.integrator = IntegratorKind::RK4;
    } else if (integ == "euler") {
        sc.integrator = IntegratorKind::Euler;
    } else {
        throw std::invalid_argument("unknown integrator: " + integ);
    }
    const std::string form = j.value("formulation", "direct");
    if (form == "direct") {
        sc.formulation = Formulation::Direct;
    } else if (form == "shifted") {
        sc.formulation = Formulation::InputShifted;
    } else {
        throw std::invalid_argument("unknown formulation: " + form);
    }
    const auto& sigs = j.at("signals");
    if (!sigs.is_array() || sigs.empty()) {
        throw std::invalid_argument("scenario needs a signal array");
    }
    for (const auto& sj : sigs) sc.signals.push_back(signal_from_json(sj));
    const int n = static_cast<int>(sc.signals.size());
    sc.schedule = schedule_from_json(j.at("schedule"), sc.horizon, n);
    sc.trigger = trigger_from_json(j.at("trigger"), n);
    sc.x0 = j.contains("x0") ? vector_from_json(j["x0"], n, "x0") : Vector::Zero(n);
    sc.v0 = j.contains("v0") ? vector_from_json(j["v0"], n, "v0") : Vector::Zero(n);
    sc.tail_fraction = j.value("tail_fraction", 0.2);
    sc.bounds_grid_step = j.value("bounds_grid_step", 1e-3);
    sc.require_certified = j.value("require_certified", false);
    if (j.contains("rho") || j.contains("lambda_sigma")) {
        sc.manual_cert =
            ManualCertification{j.value("rho", 1.0), j.at("lambda_sigma").get<double>()};
    }
    sc.validate();
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    json j;
    in >> j;
    return scenario_from_json(j);
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << scenario_to_json(sc).dump(2) << '\n';
}

// --- run artifacts ---

inline json bounds_to_json(const GuaranteeReport& rep) {
    json j;
    j["certified"] = rep.certified;
    j["law"] = rep.law;
    j["rho"] = rep.rho;
    j["lambda_sigma"] = rep.lambda_sigma;
    j["lambda2_lower"] = rep.lambda2_lower;
    j["laplacian_sup"] = rep.laplacian_sup;
    j["gamma"] = rep.gamma;
    j["kappa"] = vector_to_json(rep.kappa);
    j["eps"] = vector_to_json(rep.eps);
    j["dout_bar"] = vector_to_json(rep.dout_bar);
    j["eta_printed"] = rep.eta_printed;
    j["eta_normed"] = rep.eta_normed;
    j["zeta"] = rep.zeta_value;
    j["eta_or_zeta"] = rep.eta_or_zeta;
    j["c"] = vector_to_json(rep.c);
    j["tau"] = vector_to_json(rep.tau);
    j["ultimate_bound"] = vector_to_json(rep.ultimate_bound);
    j["rate"] = rep.rate;
    if (rep.euler_stepsize_interval) {
        j["euler_stepsize_interval"] = {rep.euler_stepsize_interval->first,
                                        rep.euler_stepsize_interval->second};
    }
    return j;
}

inline json verdict_to_json(const GuaranteeVerdict& v) {
    return {{"inter_event", outcome_name(v.inter_event)},
            {"tail_error", outcome_name(v.tail_error)},
            {"conservation", outcome_name(v.conservation)},
            {"zeno", outcome_name(v.zeno)},
            {"passed", v.passed()},
            {"details", v.details}};
}

inline json record_to_json(const RunRecord& rec) {
    json j;
    j["scenario"] = rec.scenario_name;
    j["h"] = rec.h;
    j["horizon"] = rec.horizon;
    j["warnings"] = rec.warnings;
    j["sum_v_drift"] = rec.sum_v_drift;
    json stats = json::array();
    for (const auto& st : rec.stats) {
        stats.push_back({{"sample_count", st.sample_count},
                         {"rebroadcast_count", st.rebroadcast_count},
                         {"min_gap", st.min_gap},
                         {"mean_gap", st.mean_gap},
                         {"max_mismatch", st.max_mismatch}});
    }
    j["stats"] = stats;
    json events = json::array();
    for (const auto& ev : rec.events) {
        events.push_back({{"agent", ev.agent + 1},
                          {"time", ev.time},
                          {"kind", ev.kind == EventKind::Sample ? "sample" : "rebroadcast"},
                          {"value", ev.value}});
    }
    j["events"] = events;
    j["bounds"] = bounds_to_json(rec.bounds);
    j["verdict"] = verdict_to_json(rec.verdict);
    j["tail_error"] = vector_to_json(rec.tail_error_per_agent());
    return j;
}

/// State and error series, one row per grid sample (decimated).
inline void write_series_csv(const RunRecord& rec, const std::filesystem::path& path,
                             int decimate = 1) {
    if (decimate < 1) throw std::invalid_argument("decimation must be >= 1");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const int n = rec.agents();
    out << 't';
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= n; ++i) out << ",v" << i;
    for (int i = 1; i <= n; ++i) out << ",err" << i;
    out << ",mean_input\n";
    out.precision(17);
    for (int k = 0; k <= rec.steps(); k += decimate) {
        out << rec.times[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i) out << ',' << rec.x(k, i);
        for (int i = 0; i < n; ++i) out << ',' << rec.v(k, i);
        for (int i = 0; i < n; ++i) out << ',' << rec.error(k, i);
        out << ',' << rec.mean_input(k) << '\n';
    }
}

inline json comparison_to_json(const ComparisonReport& rep) {
    json j;
    if (!rep.note.empty()) j["note"] = rep.note;
    json entries = json::array();
    for (const auto& e : rep.entries) {
        entries.push_back({{"name", e.name},
                           {"law", e.law},
                           {"sample_counts", e.sample_counts},
                           {"rebroadcast_counts", e.rebroadcast_counts},
                           {"total_samples", e.total_samples},
                           {"tail_error", vector_to_json(e.tail_error)},
                           {"ultimate_bound", e.ultimate_bound},
                           {"verdict_passed", e.verdict_passed}});
    }
    j["runs"] = entries;
    return j;
}

inline void write_comparison_csv(const ComparisonReport& rep,
                                 const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "scenario,law,total_samples";
    if (!rep.entries.empty()) {
        for (std::size_t i = 1; i <= rep.entries.front().sample_counts.size(); ++i) {
            out << ",agent" << i;
        }
    }
    out << ",max_tail_error,ultimate_bound\n";
    for (const auto& e : rep.entries) {
        out << e.name << ',' << e.law << ',' << e.total_samples;
        for (int c : e.sample_counts) out << ',' << c;
        out << ',' << e.tail_error.maxCoeff() << ',' << e.ultimate_bound << '\n';
    }
}

}  // namespace detcon
