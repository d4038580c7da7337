#pragma once

// Communication laws. An agent samples (sets x_hat := x and broadcasts)
// whenever its law fires; firing uses the >= convention so that the
// holding constraint stays satisfied up to one grid step of slack.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "detcon/graph.hpp"

namespace detcon {

/// Fire when the agent's own sample mismatch reaches eps_i.
struct DirectedThreshold {
    Vector eps;
};

/// Fire when the squared mismatch reaches the neighbor-disagreement slack
/// plus eps_i^2, both scaled by 1/(4 d_out^i).
struct UndirectedRelative {
    Vector eps;
};

/// Broadcast every grid step (continuous-communication idealization).
struct ContinuousLaw {};

/// Broadcast at fixed multiples of delta (fixed-step baseline).
struct PeriodicLaw {
    double delta = 0.0;
};

using TriggerLaw = std::variant<DirectedThreshold, UndirectedRelative, ContinuousLaw, PeriodicLaw>;

enum class EventKind { Sample, SwitchRebroadcast };

/// One communication event. Sample events install x_hat := x(t);
/// switch rebroadcasts retransmit the existing x_hat unchanged.
struct TriggerEvent {
    int agent = 0;
    double time = 0.0;
    EventKind kind = EventKind::Sample;
    double value = 0.0;
};

inline bool should_fire_directed(double x_hat, double x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("threshold must be positive");
    return std::abs(x_hat - x) >= eps;
}

/// weights_row holds a_ij for the deciding agent i; x_hat_all the
/// broadcast values it has received. Requires d_out^i > 0: the law is
/// undefined on isolated nodes.
inline bool should_fire_undirected(double x_hat, double x,
                                   const Eigen::Ref<const Vector>& weights_row,
                                   const Vector& x_hat_all, double dout, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("threshold must be positive");
    if (!(dout > 0.0)) {
        throw std::domain_error("relative trigger undefined for an isolated node");
    }
    const double mismatch_sq = (x_hat - x) * (x_hat - x);
    const double disagreement =
        (weights_row.array() * (x_hat - x_hat_all.array()).square()).sum();
    return mismatch_sq >= (disagreement + eps * eps) / (4.0 * dout);
}

/// Conservative pure-threshold radius of the relative law; also the
/// quantity matched across laws when comparing them at equal strength.
inline double threshold_equivalent_eps(double eps, double dout_bar) {
    if (!(dout_bar > 0.0)) throw std::invalid_argument("dout_bar must be positive");
    return eps / (2.0 * std::sqrt(dout_bar));
}

inline void validate_law(const TriggerLaw& law, int n) {
    std::visit(
        [n](const auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, DirectedThreshold> ||
                          std::is_same_v<L, UndirectedRelative>) {
                if (l.eps.size() != n) {
                    throw std::invalid_argument("trigger thresholds must be per-agent");
                }
                if (!(l.eps.minCoeff() > 0.0)) {
                    throw std::invalid_argument("trigger thresholds must be positive");
                }
            } else if constexpr (std::is_same_v<L, PeriodicLaw>) {
                if (!(l.delta > 0.0)) {
                    throw std::invalid_argument("broadcast period must be positive");
                }
            }
        },
        law);
}

inline std::string law_name(const TriggerLaw& law) {
    struct Name {
        std::string operator()(const DirectedThreshold&) const { return "directed"; }
        std::string operator()(const UndirectedRelative&) const { return "undirected"; }
        std::string operator()(const ContinuousLaw&) const { return "continuous"; }
        std::string operator()(const PeriodicLaw&) const { return "periodic"; }
    };
    return std::visit(Name{}, law);
}

}  // namespace detcon
