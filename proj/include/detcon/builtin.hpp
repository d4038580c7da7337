#pragma once

// Bundled five-agent reference scenarios: a switching digraph driven by
// heterogeneous waveforms, a static ring comparing the relative law
// against a fixed-step baseline, and an edge-dropping ring comparing the
// two event-triggered laws at matched thresholds.

#include <cmath>
#include <string>
#include <vector>

#include "detcon/engine.hpp"

namespace detcon::builtin {

inline constexpr int kAgents = 5;

/// Heterogeneous smooth waveforms (sinusoids, arctangent ramp).
inline std::vector<SignalExpr> mixed_waveforms() {
    return {
        SignalExpr::sine(0.5, 0.8),
        SignalExpr::sine(0.5, 0.7) + SignalExpr::cosine(0.5, 0.6),
        SignalExpr::sine(1.0, 0.2) + 1.0,
        SignalExpr::arctan(0.5),
        SignalExpr::cosine(0.1, 2.0),
    };
}

/// A shared sinusoid plus distinct decaying offsets per agent.
inline std::vector<SignalExpr> offset_waveforms() {
    const SignalExpr base = SignalExpr::sine(0.5, 1.0);
    return {
        base + SignalExpr::reciprocal(2.0, 1.0) + 2.0,
        base + SignalExpr::reciprocal(2.0, 2.0) + 4.0,
        base + SignalExpr::reciprocal(2.0, 3.0) + 5.0,
        base + SignalExpr::exponential(1.0) + 4.0,
        base + SignalExpr::arctan(1.0) - 1.5,
    };
}

/// Ring digraph for t in [0, 5), a single linked pair rotating through
/// (1,2), (2,3), (3,4), (4,5), (5,1) every 2 s on [5, 15), ring again
/// afterwards. The pair union over [5, 15) spans a cycle, so the
/// schedule is recurrently jointly strongly connected.
inline GraphSchedule switching_digraph_schedule(double horizon = 20.0) {
    std::vector<GraphSchedule::Segment> segs;
    segs.push_back({0.0, WeightedDigraph::ring(kAgents, 1.0, true)});
    for (int k = 0; k < 5; ++k) {
        segs.push_back(
            {5.0 + 2.0 * k, WeightedDigraph::pair_link(kAgents, k, (k + 1) % kAgents)});
    }
    segs.push_back({15.0, WeightedDigraph::ring(kAgents, 1.0, true)});
    return GraphSchedule(std::move(segs), horizon, 2.0);
}

/// Undirected unit ring with one edge missing at every instant, the
/// broken edge cycling in index order every 3 s. Switches strictly
/// inside [0, horizon); the final segment extends to the horizon.
inline GraphSchedule edge_drop_schedule(double horizon = 12.0) {
    std::vector<GraphSchedule::Segment> segs;
    for (int k = 0; 3.0 * k < horizon; ++k) {
        const int e = k % kAgents;
        segs.push_back(
            {3.0 * k, WeightedDigraph::ring_minus_edge(kAgents, e, (e + 1) % kAgents)});
    }
    return GraphSchedule(std::move(segs), horizon, 3.0);
}

namespace detail {
inline Scenario base(std::string name, GraphSchedule sched, std::vector<SignalExpr> signals,
                     double alpha, double beta, TriggerLaw law, double horizon) {
    Scenario sc;
    sc.name = std::move(name);
    sc.schedule = std::move(sched);
    sc.signals = std::move(signals);
    sc.alpha = alpha;
    sc.beta = beta;
    sc.trigger = std::move(law);
    sc.horizon = horizon;
    sc.h = 1e-3;
    sc.x0 = Vector::Zero(kAgents);
    sc.v0 = Vector::Zero(kAgents);
    return sc;
}
}  // namespace detail

/// Switching digraph under the per-agent threshold law.
inline Scenario switching_digraph_threshold() {
    return detail::base("switching-digraph-threshold", switching_digraph_schedule(),
                        mixed_waveforms(), 1.0, 4.0,
                        DirectedThreshold{Vector::Constant(kAgents, 0.1)}, 20.0);
}

/// Same network with per-step communication, for comparison.
inline Scenario switching_digraph_continuous() {
    return detail::base("switching-digraph-continuous", switching_digraph_schedule(),
                        mixed_waveforms(), 1.0, 4.0, ContinuousLaw{}, 20.0);
}

/// Static undirected unit ring under the neighbor-relative law, with the
/// per-agent radius eps_i/(2 sqrt(dout_i)) matched to 0.1.
inline Scenario ring_relative() {
    const double eps = 0.2 * std::sqrt(2.0);
    return detail::base("ring-relative", GraphSchedule::constant(WeightedDigraph::ring(kAgents), 21.0),
                        mixed_waveforms(), 1.0, 4.0,
                        UndirectedRelative{Vector::Constant(kAgents, eps)}, 20.0);
}

/// Fixed-step baseline on the same ring: forward Euler with the
/// communication period tied to the integration step.
inline Scenario ring_euler_baseline(double delta = 0.12) {
    Scenario sc =
        detail::base("ring-euler-baseline", GraphSchedule::constant(WeightedDigraph::ring(kAgents), 21.0),
                     mixed_waveforms(), 1.0, 4.0, PeriodicLaw{delta}, 20.0);
    sc.h = delta;
    sc.integrator = IntegratorKind::Euler;
    return sc;
}

/// Same periodic cadence resolved on the fine grid (for diagnostics).
inline Scenario ring_periodic_fine(double delta = 0.12) {
    return detail::base("ring-periodic", GraphSchedule::constant(WeightedDigraph::ring(kAgents), 21.0),
                        mixed_waveforms(), 1.0, 4.0, PeriodicLaw{delta}, 20.0);
}

/// Static directed unit ring under the threshold law.
inline Scenario directed_ring_threshold() {
    return detail::base("directed-ring-threshold",
                        GraphSchedule::constant(WeightedDigraph::ring(kAgents, 1.0, true), 21.0),
                        mixed_waveforms(), 1.0, 4.0,
                        DirectedThreshold{Vector::Constant(kAgents, 0.1)}, 20.0);
}

/// Static directed ring with per-step communication; constant_inputs
/// swaps the waveforms for constants (gamma = 0).
inline Scenario directed_ring_continuous(bool constant_inputs = false) {
    std::vector<SignalExpr> sigs;
    if (constant_inputs) {
        for (int i = 0; i < kAgents; ++i) sigs.push_back(SignalExpr::constant(1.0 + i));
    } else {
        sigs = mixed_waveforms();
    }
    return detail::base(constant_inputs ? "directed-ring-continuous-const"
                                        : "directed-ring-continuous",
                        GraphSchedule::constant(WeightedDigraph::ring(kAgents, 1.0, true), 21.0),
                        std::move(sigs), 1.0, 4.0, ContinuousLaw{}, 20.0);
}

/// Edge-dropping ring under either law with matched radii: 0.1 directly,
/// or eps_i = 0.1 * 2 sqrt(dout_bar_i) for the relative law. Agents start
/// on their own reference inputs.
inline Scenario edge_drop(bool relative_law, double horizon = 12.0) {
    auto signals = offset_waveforms();
    TriggerLaw law;
    if (relative_law) {
        law = UndirectedRelative{Vector::Constant(kAgents, 0.1 * 2.0 * std::sqrt(2.0))};
    } else {
        law = DirectedThreshold{Vector::Constant(kAgents, 0.1)};
    }
    Scenario sc = detail::base(relative_law ? "edge-drop-relative" : "edge-drop-threshold",
                               edge_drop_schedule(horizon), std::move(signals), 1.0, 1.0,
                               std::move(law), horizon);
    sc.x0 = values_at(sc.signals, 0.0);
    return sc;
}

}  // namespace detcon::builtin
