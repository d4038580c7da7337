#pragma once

// Deterministic fixed-step simulation of the sampled-communication
// dynamics over a switching schedule: trigger evaluation on the grid,
// switch-time rebroadcasts, guarantee assembly and the post-run verdict.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "detcon/bounds.hpp"
#include "detcon/dynamics.hpp"
#include "detcon/graph.hpp"
#include "detcon/signals.hpp"
#include "detcon/triggers.hpp"

namespace detcon {

enum class IntegratorKind { Euler, RK4 };

/// Direct integration propagates (x, v) and consumes the input
/// derivatives; the shifted mode propagates (x - r, v) without them and
/// reconstructs x. Both discretize the same flow and are used to
/// cross-validate each other.
enum class Formulation { Direct, InputShifted };

struct ManualCertification {
    double rho = 1.0;
    double lambda_sigma = 0.0;
};

struct Scenario {
    std::string name = "scenario";
    GraphSchedule schedule = GraphSchedule::constant(WeightedDigraph::ring(2), 1.0);
    std::vector<SignalExpr> signals;
    double alpha = 1.0;
    double beta = 1.0;
    TriggerLaw trigger = ContinuousLaw{};
    Vector x0;
    Vector v0;
    double horizon = 1.0;
    double h = 1e-3;
    IntegratorKind integrator = IntegratorKind::RK4;
    Formulation formulation = Formulation::Direct;
    double tail_fraction = 0.2;
    double bounds_grid_step = 1e-3;
    bool require_certified = false;
    std::optional<ManualCertification> manual_cert;

    int size() const { return schedule.size(); }

    void validate() const {
        const int n = size();
        if (static_cast<int>(signals.size()) != n) {
            throw std::invalid_argument("one reference signal per agent is required");
        }
        if (x0.size() != n || v0.size() != n) {
            throw std::invalid_argument("initial conditions must match the agent count");
        }
        if (std::abs(v0.sum()) > 1e-9 * std::max(1.0, v0.cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("integral states must sum to zero initially");
        }
        if (!(h > 0.0) || !(horizon > 0.0) || h > horizon) {
            throw std::invalid_argument("need 0 < h <= horizon");
        }
        if (schedule.horizon() < horizon) {
            throw std::invalid_argument("schedule must cover the simulation horizon");
        }
        if (!(tail_fraction > 0.0) || !(tail_fraction < 1.0)) {
            throw std::invalid_argument("tail fraction must lie in (0, 1)");
        }
        if (!(alpha > 0.0) || !(beta > 0.0)) {
            throw std::invalid_argument("design parameters must be positive");
        }
        validate_law(trigger, n);
        if (std::holds_alternative<UndirectedRelative>(trigger)) {
            for (const auto& seg : schedule.segments()) {
                if (seg.graph.out_degrees().minCoeff() <= 0.0) {
                    throw std::domain_error(
                        "relative trigger undefined: schedule contains an isolated node");
                }
            }
        }
    }
};

struct AgentStats {
    int sample_count = 0;
    int rebroadcast_count = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double mean_gap = std::numeric_limits<double>::infinity();
    double max_mismatch = 0.0;
};

struct GuaranteeVerdict {
    enum class Outcome { Pass, Fail, Vacuous };
    Outcome inter_event = Outcome::Vacuous;   ///< min sample gap >= tau_i
    Outcome tail_error = Outcome::Vacuous;    ///< tail tracking error <= ultimate bound
    Outcome conservation = Outcome::Pass;     ///< sum of integral states drifts below tol
    Outcome zeno = Outcome::Pass;             ///< finite events, gaps >= one grid step
    std::string details;

    bool passed() const {
        const auto ok = [](Outcome o) { return o != Outcome::Fail; };
        return ok(inter_event) && ok(tail_error) && ok(conservation) && ok(zeno);
    }
};

inline const char* outcome_name(GuaranteeVerdict::Outcome o) {
    switch (o) {
        case GuaranteeVerdict::Outcome::Pass: return "pass";
        case GuaranteeVerdict::Outcome::Fail: return "fail";
        default: return "vacuous";
    }
}

/// Global snapshot at one grid point.
struct NetworkState {
    double t = 0.0;
    std::vector<AgentState> agents;
    int active_segment = 0;
};

struct RunRecord {
    std::string scenario_name;
    double h = 0.0;
    double horizon = 0.0;
    double tail_fraction = 0.2;
    std::vector<double> times;
    Matrix x;      ///< (steps + 1) x n
    Matrix v;      ///< (steps + 1) x n
    Vector mean_input;
    Matrix error;  ///< per-agent |x_i - mean r|
    std::vector<int> active_segment;  ///< schedule segment per grid point
    std::vector<TriggerEvent> events;
    std::vector<AgentStats> stats;
    double sum_v_drift = 0.0;
    GuaranteeReport bounds;
    GuaranteeVerdict verdict;
    std::vector<std::string> warnings;

    int steps() const { return static_cast<int>(times.size()) - 1; }
    int agents() const { return static_cast<int>(x.cols()); }

    /// Snapshot of one agent, with the broadcast value and its sampling
    /// time reconstructed from the event log.
    AgentState agent_state(int step, int agent) const {
        AgentState st;
        st.x = x(step, agent);
        st.v = v(step, agent);
        st.x_hat = x(0, agent);
        st.last_sample_time = 0.0;
        const double t = times[static_cast<std::size_t>(step)];
        for (const auto& ev : events) {
            if (ev.time > t) break;
            if (ev.agent == agent && ev.kind == EventKind::Sample) {
                st.x_hat = ev.value;
                st.last_sample_time = ev.time;
            }
        }
        return st;
    }

    NetworkState network_state(int step) const {
        NetworkState ns;
        ns.t = times[static_cast<std::size_t>(step)];
        ns.active_segment = active_segment[static_cast<std::size_t>(step)];
        for (int i = 0; i < agents(); ++i) ns.agents.push_back(agent_state(step, i));
        return ns;
    }

    /// Per-agent sup of the tracking error over the trailing window.
    Vector tail_error_per_agent(double fraction) const {
        const auto rows = static_cast<Eigen::Index>(times.size());
        const auto first = static_cast<Eigen::Index>(
            std::ceil((1.0 - fraction) * static_cast<double>(rows - 1)));
        return error.bottomRows(rows - first).colwise().maxCoeff();
    }
    Vector tail_error_per_agent() const { return tail_error_per_agent(tail_fraction); }
};

/// Assembles the guarantee bundle for a scenario: input bounds from the
/// signal grid, schedule extrema, the certificate when available and the
/// law-specific constants.
inline GuaranteeReport guarantee_report(const Scenario& sc) {
    sc.validate();
    const int n = sc.size();
    const InputBounds ib = estimate_bounds(sc.signals, sc.horizon, sc.bounds_grid_step);
    const ScheduleExtrema ex = schedule_extrema(sc.schedule);
    const auto cert = certify_lambda_sigma(sc.schedule);

    GuaranteeReport rep;
    rep.law = law_name(sc.trigger);
    rep.gamma = ib.gamma;
    rep.kappa = ib.kappa;
    rep.dout_bar = ex.dout_bar;
    rep.laplacian_sup = ex.laplacian_sup;
    rep.eps = Vector::Zero(n);
    if (const auto* d = std::get_if<DirectedThreshold>(&sc.trigger)) rep.eps = d->eps;
    if (const auto* u = std::get_if<UndirectedRelative>(&sc.trigger)) rep.eps = u->eps;

    GuaranteeInputs in;
    in.alpha = sc.alpha;
    in.beta = sc.beta;
    in.eps = rep.eps;
    in.kappa = ib.kappa;
    in.gamma = ib.gamma;
    in.laplacian_sup = ex.laplacian_sup;
    in.dout_bar = ex.dout_bar;
    in.init = initial_terms(sc.x0, sc.v0, values_at(sc.signals, 0.0), sc.alpha);

    rep.certified = cert.has_value();
    if (cert) {
        in.rho = cert->rho;
        in.lambda_sigma = cert->lambda_sigma;
    } else if (sc.manual_cert) {
        in.rho = sc.manual_cert->rho;
        in.lambda_sigma = sc.manual_cert->lambda_sigma;
    } else {
        in.lambda_sigma = 0.0;
    }
    const bool exponential_pair = in.lambda_sigma > 0.0;
    if (exponential_pair) {
        rep.rho = in.rho;
        rep.lambda_sigma = in.lambda_sigma;
        rep.rate = convergence_rate(in);
    }

    const bool undirected_schedule = std::all_of(
        sc.schedule.segments().begin(), sc.schedule.segments().end(), [](const auto& seg) {
            return seg.graph.adjacency().isApprox(seg.graph.adjacency().transpose(), 1e-12);
        });
    const bool connected_undirected = undirected_schedule && cert.has_value();
    if (connected_undirected) {
        in.lambda2_lower = *ex.lambda2_inf;
        rep.lambda2_lower = in.lambda2_lower;
    }

    struct Assemble {
        GuaranteeReport& rep;
        GuaranteeInputs& in;
        bool exponential_pair;
        bool connected_undirected;
        int n;

        void operator()(const DirectedThreshold&) const {
            if (!exponential_pair) return;
            rep.eta_printed = eta(in, EpsTerm::SquaredNorm);
            rep.eta_normed = eta(in, EpsTerm::Norm);
            rep.eta_or_zeta = rep.eta_printed;
            fill_tau(rep.eta_or_zeta, false);
            rep.ultimate_bound = Vector::Constant(n, ultimate_bound_directed(in));
        }
        void operator()(const UndirectedRelative&) const {
            rep.certified = connected_undirected;
            if (!connected_undirected) return;
            rep.zeta_value = zeta(in);
            rep.eta_or_zeta = rep.zeta_value;
            fill_tau(rep.eta_or_zeta, true);
            rep.ultimate_bound = Vector::Constant(n, ultimate_bound_undirected(in));
        }
        void operator()(const ContinuousLaw&) const {
            if (!exponential_pair) return;
            rep.ultimate_bound = Vector::Constant(n, ultimate_bound_directed(in));
        }
        void operator()(const PeriodicLaw&) const {
            const double dmax = in.dout_bar.maxCoeff();
            rep.euler_stepsize_interval = {
                0.0, std::min(1.0 / in.alpha, dmax > 0.0 ? 1.0 / (in.beta * dmax)
                                                         : std::numeric_limits<double>::infinity())};
        }

        void fill_tau(double level, bool conservative_radius) const {
            rep.c = Vector(n);
            rep.tau = Vector(n);
            for (int i = 0; i < n; ++i) {
                rep.c(i) = c_i(in, level, i);
                const double radius =
                    conservative_radius
                        ? in.eps(i) / (2.0 * std::sqrt(in.dout_bar(i)))
                        : in.eps(i);
                rep.tau(i) = tau_from_radius(in.alpha, radius, rep.c(i));
            }
        }
    };
    std::visit(Assemble{rep, in, exponential_pair, connected_undirected, n}, sc.trigger);
    return rep;
}

/// Four-way verdict for a completed run against its guarantee bundle.
inline GuaranteeVerdict check_guarantees(const RunRecord& rec, const GuaranteeReport& rep,
                                         double conservation_tol = 1e-6) {
    using Outcome = GuaranteeVerdict::Outcome;
    GuaranteeVerdict v;
    std::ostringstream notes;
    const int n = rec.agents();

    if (rep.has_tau()) {
        v.inter_event = Outcome::Pass;
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(rep.tau(i))) continue;
            if (rec.stats[static_cast<std::size_t>(i)].min_gap < rep.tau(i)) {
                v.inter_event = Outcome::Fail;
                notes << "agent " << i << " gap " << rec.stats[static_cast<std::size_t>(i)].min_gap
                      << " < tau " << rep.tau(i) << "; ";
            }
        }
    }

    if (rep.has_ultimate_bound()) {
        v.tail_error = Outcome::Pass;
        const Vector tail = rec.tail_error_per_agent();
        for (int i = 0; i < n; ++i) {
            if (tail(i) > rep.ultimate_bound(i)) {
                v.tail_error = Outcome::Fail;
                notes << "agent " << i << " tail error " << tail(i) << " > bound "
                      << rep.ultimate_bound(i) << "; ";
            }
        }
    }

    v.conservation = rec.sum_v_drift <= conservation_tol ? Outcome::Pass : Outcome::Fail;
    if (v.conservation == Outcome::Fail) {
        notes << "sum-v drift " << rec.sum_v_drift << " > " << conservation_tol << "; ";
    }

    v.zeno = Outcome::Pass;
    const double gap_floor = rec.h * (1.0 - 1e-9);
    for (const auto& st : rec.stats) {
        if (st.sample_count > 1 && st.min_gap < gap_floor) v.zeno = Outcome::Fail;
    }
    if (v.zeno == Outcome::Fail) notes << "sample gap below one grid step; ";

    v.details = notes.str();
    return v;
}

namespace detail {

struct PairVec {
    Vector a;  // x or x_bar
    Vector b;  // v
};

template <typename Rhs>
inline void advance(PairVec& s, double t, double h, IntegratorKind kind, const Rhs& rhs) {
    if (kind == IntegratorKind::Euler) {
        const Derivatives d = rhs(t, s.a, s.b);
        s.a += h * d.dx;
        s.b += h * d.dv;
        return;
    }
    const Derivatives k1 = rhs(t, s.a, s.b);
    const Derivatives k2 = rhs(t + 0.5 * h, Vector(s.a + 0.5 * h * k1.dx), Vector(s.b + 0.5 * h * k1.dv));
    const Derivatives k3 = rhs(t + 0.5 * h, Vector(s.a + 0.5 * h * k2.dx), Vector(s.b + 0.5 * h * k2.dv));
    const Derivatives k4 = rhs(t + h, Vector(s.a + h * k3.dx), Vector(s.b + h * k3.dv));
    s.a += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    s.b += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
}

}  // namespace detail

/// Runs a scenario. Identical scenarios produce bit-identical records:
/// the loop is single-threaded, iterates in fixed order and contains no
/// randomness.
inline RunRecord run(const Scenario& sc) {
    sc.validate();
    const int n = sc.size();
    const double h = sc.h;
    const int steps = static_cast<int>(std::floor(sc.horizon / h + 1e-9));

    RunRecord rec;
    rec.scenario_name = sc.name;
    rec.h = h;
    rec.horizon = static_cast<double>(steps) * h;
    rec.tail_fraction = sc.tail_fraction;
    rec.bounds = guarantee_report(sc);
    if (std::abs(rec.horizon - sc.horizon) > 1e-9 * sc.horizon) {
        std::ostringstream w;
        w << "horizon trimmed to " << rec.horizon << " (not a multiple of h)";
        rec.warnings.push_back(w.str());
    }
    if (sc.require_certified && !rec.bounds.certified) {
        throw std::domain_error("scenario requires a certified schedule but " + rec.bounds.law +
                                "-law certification failed (check weight balance/connectivity)");
    }
    if (!rec.bounds.certified &&
        (std::holds_alternative<DirectedThreshold>(sc.trigger) ||
         std::holds_alternative<UndirectedRelative>(sc.trigger))) {
        rec.warnings.push_back("schedule not certifiable: guarantee fields are partial");
    }
    for (const auto& seg : sc.schedule.segments()) {
        if (seg.graph.has_isolated_node()) {
            rec.warnings.push_back("schedule contains nodes with zero out-degree");
            break;
        }
    }
    if (rec.bounds.has_tau()) {
        const double tau_min = rec.bounds.tau.minCoeff();
        if (h > tau_min / 10.0) {
            std::ostringstream w;
            w << "grid step " << h << " exceeds tau_min/10 = " << tau_min / 10.0
              << "; triggered events are quantized coarsely";
            rec.warnings.push_back(w.str());
        }
    }

    // Switch times snapped to grid indices.
    std::vector<std::pair<int, int>> switch_steps;  // (grid step, segment index)
    {
        const auto& segs = sc.schedule.segments();
        for (std::size_t k = 1; k < segs.size(); ++k) {
            const double s = segs[k].start;
            if (s > rec.horizon) break;
            const int idx = static_cast<int>(std::llround(s / h));
            if (std::abs(idx * h - s) > 1e-9 * std::max(1.0, s)) {
                std::ostringstream w;
                w << "switch time " << s << " snapped to grid point " << idx * h;
                rec.warnings.push_back(w.str());
            }
            switch_steps.emplace_back(idx, static_cast<int>(k));
        }
    }
    const auto acquisitions = [&] {
        std::vector<std::vector<int>> per_switch(sc.schedule.segments().size());
        const auto& segs = sc.schedule.segments();
        for (std::size_t k = 1; k < segs.size(); ++k) {
            const Matrix& before = segs[k - 1].graph.adjacency();
            const Matrix& after = segs[k].graph.adjacency();
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (before(j, i) == 0.0 && after(j, i) > 0.0) {
                        per_switch[k].push_back(i);
                        break;
                    }
                }
            }
        }
        return per_switch;
    }();

    rec.times.resize(static_cast<std::size_t>(steps) + 1);
    rec.x.resize(steps + 1, n);
    rec.v.resize(steps + 1, n);
    rec.error.resize(steps + 1, n);
    rec.mean_input.resize(steps + 1);
    rec.active_segment.resize(static_cast<std::size_t>(steps) + 1);
    rec.stats.assign(static_cast<std::size_t>(n), AgentStats{});

    const bool shifted = sc.formulation == Formulation::InputShifted;
    detail::PairVec state;
    state.a = shifted ? Vector(sc.x0 - values_at(sc.signals, 0.0)) : sc.x0;
    state.b = sc.v0;
    Vector x_hat = sc.x0;
    std::vector<double> last_sample(static_cast<std::size_t>(n), 0.0);
    const double sum_v0 = sc.v0.sum();

    const PeriodicLaw* periodic = std::get_if<PeriodicLaw>(&sc.trigger);
    long periodic_k = 0;
    int next_periodic_step = 0;

    std::size_t next_switch = 0;
    int current_segment = 0;
    const Matrix* adjacency = &sc.schedule.segments().front().graph.adjacency();
    Vector coupling = Vector::Zero(n);
    std::vector<char> fire(static_cast<std::size_t>(n), 0);

    for (int step = 0; step <= steps; ++step) {
        const double t = static_cast<double>(step) * h;

        // (a) graph switches and rebroadcasts to newly acquired listeners
        while (next_switch < switch_steps.size() && switch_steps[next_switch].first == step) {
            const int seg = switch_steps[next_switch].second;
            current_segment = seg;
            adjacency = &sc.schedule.segments()[static_cast<std::size_t>(seg)].graph.adjacency();
            for (int i : acquisitions[static_cast<std::size_t>(seg)]) {
                rec.events.push_back({i, t, EventKind::SwitchRebroadcast, x_hat(i)});
                ++rec.stats[static_cast<std::size_t>(i)].rebroadcast_count;
            }
            ++next_switch;
        }

        const Vector r_now = values_at(sc.signals, t);
        const Vector x_now = shifted ? Vector(state.a + r_now) : state.a;

        // (b) trigger evaluation against pre-step broadcast values
        for (int i = 0; i < n; ++i) {
            auto& st = rec.stats[static_cast<std::size_t>(i)];
            st.max_mismatch = std::max(st.max_mismatch, std::abs(x_hat(i) - x_now(i)));
        }
        if (step == 0) {
            std::fill(fire.begin(), fire.end(), 1);  // everyone samples at t = 0
            if (periodic) {
                while (next_periodic_step <= 0) {
                    ++periodic_k;
                    next_periodic_step = static_cast<int>(std::llround(
                        static_cast<double>(periodic_k) * periodic->delta / h));
                }
            }
        } else {
            std::visit(
                [&](const auto& law) {
                    using L = std::decay_t<decltype(law)>;
                    if constexpr (std::is_same_v<L, DirectedThreshold>) {
                        for (int i = 0; i < n; ++i) {
                            fire[static_cast<std::size_t>(i)] =
                                should_fire_directed(x_hat(i), x_now(i), law.eps(i));
                        }
                    } else if constexpr (std::is_same_v<L, UndirectedRelative>) {
                        const Vector dout = adjacency->rowwise().sum();
                        for (int i = 0; i < n; ++i) {
                            fire[static_cast<std::size_t>(i)] = should_fire_undirected(
                                x_hat(i), x_now(i), adjacency->row(i), x_hat, dout(i), law.eps(i));
                        }
                    } else if constexpr (std::is_same_v<L, ContinuousLaw>) {
                        std::fill(fire.begin(), fire.end(), 1);
                    } else {
                        const bool due = step == next_periodic_step;
                        std::fill(fire.begin(), fire.end(), due ? 1 : 0);
                        if (due) {
                            while (next_periodic_step <= step) {
                                ++periodic_k;
                                next_periodic_step = static_cast<int>(std::llround(
                                    static_cast<double>(periodic_k) * periodic->delta / h));
                            }
                        }
                    }
                },
                sc.trigger);
        }
        for (int i = 0; i < n; ++i) {
            if (!fire[static_cast<std::size_t>(i)]) continue;
            auto& st = rec.stats[static_cast<std::size_t>(i)];
            if (st.sample_count > 0) {
                st.min_gap = std::min(st.min_gap, t - last_sample[static_cast<std::size_t>(i)]);
            }
            x_hat(i) = x_now(i);
            last_sample[static_cast<std::size_t>(i)] = t;
            ++st.sample_count;
            rec.events.push_back({i, t, EventKind::Sample, x_hat(i)});
        }

        // (c) record the grid point
        rec.times[static_cast<std::size_t>(step)] = t;
        rec.active_segment[static_cast<std::size_t>(step)] = current_segment;
        rec.x.row(step) = x_now.transpose();
        rec.v.row(step) = state.b.transpose();
        const double r_mean = r_now.mean();
        rec.mean_input(step) = r_mean;
        rec.error.row(step) = tracking_error(x_now, r_mean).transpose();
        rec.sum_v_drift = std::max(rec.sum_v_drift, std::abs(state.b.sum() - sum_v0));

        if (step == steps) break;

        // (d) advance one step with the broadcast values frozen
        coupling = laplacian_coupling(*adjacency, x_hat);
        if (shifted) {
            detail::advance(state, t, h, sc.integrator,
                            [&](double, const Vector& xb, const Vector& vv) {
                                Derivatives d;
                                d.dv = sc.alpha * sc.beta * coupling;
                                d.dx = -sc.alpha * xb - sc.beta * coupling - vv;
                                return d;
                            });
        } else {
            detail::advance(state, t, h, sc.integrator,
                            [&](double tt, const Vector& xx, const Vector& vv) {
                                Derivatives d;
                                d.dv = sc.alpha * sc.beta * coupling;
                                d.dx = derivatives_at(sc.signals, tt) -
                                       sc.alpha * (xx - values_at(sc.signals, tt)) -
                                       sc.beta * coupling - vv;
                                return d;
                            });
        }
    }

    // per-agent mean gap from the event log
    {
        std::vector<double> first_t(static_cast<std::size_t>(n),
                                    std::numeric_limits<double>::quiet_NaN());
        std::vector<double> last_t(static_cast<std::size_t>(n), 0.0);
        for (const auto& ev : rec.events) {
            if (ev.kind != EventKind::Sample) continue;
            const auto i = static_cast<std::size_t>(ev.agent);
            if (std::isnan(first_t[i])) first_t[i] = ev.time;
            last_t[i] = ev.time;
        }
        for (int i = 0; i < n; ++i) {
            auto& st = rec.stats[static_cast<std::size_t>(i)];
            if (st.sample_count > 1) {
                st.mean_gap = (last_t[static_cast<std::size_t>(i)] -
                               first_t[static_cast<std::size_t>(i)]) /
                              static_cast<double>(st.sample_count - 1);
            }
        }
    }

    rec.verdict = check_guarantees(rec, rec.bounds);
    return rec;
}

/// Transform-coordinate residuals along a recorded trajectory: the
/// conserved coordinate, the deviation of the decaying coordinate from
/// its closed-form exponential, and the same for the mean component of
/// the tracking error.
struct TransformDiagnostics {
    double max_abs_q1 = 0.0;
    double max_q2n_deviation = 0.0;
    double max_z1_deviation = 0.0;
};

inline TransformDiagnostics transform_diagnostics(const RunRecord& rec, const Scenario& sc,
                                                  int stride = 1) {
    const ConsensusBasis basis(sc.size());
    TransformDiagnostics out;
    Vector q2n0;
    double z10 = 0.0;
    for (int k = 0; k <= rec.steps(); k += stride) {
        const double t = rec.times[static_cast<std::size_t>(k)];
        const auto ts = to_transformed(rec.x.row(k).transpose(), rec.v.row(k).transpose(),
                                       values_at(sc.signals, t), sc.alpha, basis);
        if (k == 0) {
            q2n0 = ts.q2n;
            z10 = ts.z1;
        }
        const double decay = std::exp(-sc.alpha * t);
        out.max_abs_q1 = std::max(out.max_abs_q1, std::abs(ts.q1));
        out.max_q2n_deviation = std::max(out.max_q2n_deviation, (ts.q2n - decay * q2n0).norm());
        out.max_z1_deviation = std::max(out.max_z1_deviation, std::abs(ts.z1 - decay * z10));
    }
    return out;
}

struct ComparisonEntry {
    std::string name;
    std::string law;
    std::vector<int> sample_counts;
    std::vector<int> rebroadcast_counts;
    int total_samples = 0;
    Vector tail_error;
    double ultimate_bound = std::numeric_limits<double>::quiet_NaN();
    bool verdict_passed = false;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    std::vector<RunRecord> records;
    std::string note;
};

/// Runs a set of scenarios sharing inputs and horizon and aligns their
/// event statistics and error curves.
inline ComparisonReport run_comparison(const std::vector<Scenario>& scenarios) {
    if (scenarios.empty()) throw std::invalid_argument("nothing to compare");
    const double horizon = scenarios.front().horizon;
    const int n = scenarios.front().size();
    for (const auto& sc : scenarios) {
        if (sc.size() != n || std::abs(sc.horizon - horizon) > 1e-12) {
            throw std::invalid_argument("compared scenarios must share agents and horizon");
        }
        for (int i = 0; i < n; ++i) {
            for (double probe : {0.0, 0.37 * horizon, 0.81 * horizon}) {
                if (std::abs(sc.signals[static_cast<std::size_t>(i)].value(probe) -
                             scenarios.front().signals[static_cast<std::size_t>(i)].value(probe)) >
                    1e-12) {
                    throw std::invalid_argument("compared scenarios must share reference inputs");
                }
            }
        }
    }
    ComparisonReport out;
    for (const auto& sc : scenarios) {
        RunRecord rec = run(sc);
        ComparisonEntry e;
        e.name = rec.scenario_name;
        e.law = rec.bounds.law;
        for (const auto& st : rec.stats) {
            e.sample_counts.push_back(st.sample_count);
            e.rebroadcast_counts.push_back(st.rebroadcast_count);
            e.total_samples += st.sample_count;
        }
        e.tail_error = rec.tail_error_per_agent();
        if (rec.bounds.has_ultimate_bound()) e.ultimate_bound = rec.bounds.ultimate_bound(0);
        e.verdict_passed = rec.verdict.passed();
        out.entries.push_back(std::move(e));
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace detcon
