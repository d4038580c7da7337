#pragma once

// Closed-form guarantees: ultimate tracking-error bounds, the per-agent
// inter-event-time lower bounds tau_i and the constants (eta, zeta, c_i)
// they are built from.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "detcon/graph.hpp"

namespace detcon {

/// Norms of the transformed coordinates at t = 0 (the integral state is
/// zero-sum by construction, so the conserved coordinate vanishes).
struct InitialTerms {
    double q2n_norm = 0.0;  ///< || alpha Pi (x0 - r0) + v0 ||
    double z1_abs = 0.0;    ///< | <1/sqrt(n), x0 - mean(r0) 1> |
    double z2n_norm = 0.0;  ///< || Pi (x0 - mean(r0) 1) ||
};

inline InitialTerms initial_terms(const Vector& x0, const Vector& v0, const Vector& r0,
                                  double alpha) {
    const Eigen::Index n = x0.size();
    if (v0.size() != n || r0.size() != n) {
        throw std::invalid_argument("initial-term dimension mismatch");
    }
    const auto center = [](const Vector& u) -> Vector { return u.array() - u.mean(); };
    InitialTerms out;
    out.q2n_norm = (alpha * center(x0 - r0) + v0).norm();
    const Vector y0 = x0.array() - r0.mean();
    out.z1_abs = std::abs(y0.sum() / std::sqrt(static_cast<double>(n)));
    out.z2n_norm = center(y0).norm();
    return out;
}

/// Everything the guarantee formulas consume. rho = 1 with
/// lambda_sigma = inf lambda2_hat is valid exactly when every scheduled
/// graph is strongly connected and weight-balanced; see
/// certify_lambda_sigma.
struct GuaranteeInputs {
    double alpha = 0.0;
    double beta = 0.0;
    Vector eps;
    Vector kappa;
    double gamma = 0.0;
    double rho = 1.0;
    double lambda_sigma = 0.0;   ///< exponential-bound constant
    double lambda2_lower = 0.0;  ///< inf lambda_2 over a connected undirected schedule
    double laplacian_sup = 0.0;
    Vector dout_bar;
    InitialTerms init;
};

/// The eta display carries the squared threshold norm while the matching
/// ultimate bound uses the plain norm; both variants are computed and the
/// printed (squared) one is the default everywhere downstream.
enum class EpsTerm { SquaredNorm, Norm };

/// max over t of (e^{-l t} - e^{-a t}) / (a - l), evaluated through the
/// cancellation-free closed form e^{-l t*}/a with t* = ln(a/l)/(a - l).
inline double decay_gap_factor(double alpha, double beta_lambda) {
    if (!(alpha > 0.0) || !(beta_lambda > 0.0)) {
        throw std::domain_error("decay rates must be positive");
    }
    const double delta = (alpha - beta_lambda) / beta_lambda;
    if (delta == 0.0) return 1.0 / (beta_lambda * std::numbers::e);
    const double t_star = std::log1p(delta) / (beta_lambda * delta);
    return std::exp(-beta_lambda * t_star) / alpha;
}

namespace detail {
inline void require_rates(const GuaranteeInputs& in) {
    if (!(in.alpha > 0.0) || !(in.beta > 0.0)) {
        throw std::domain_error("design parameters must be positive");
    }
}
inline double eps_norm(const GuaranteeInputs& in) {
    return in.eps.size() > 0 ? in.eps.norm() : 0.0;
}
}  // namespace detail

/// Uniform bound on the norm of the decaying disagreement coordinate for
/// the directed-threshold law.
inline double eta(const GuaranteeInputs& in, EpsTerm term = EpsTerm::SquaredNorm) {
    detail::require_rates(in);
    if (!(in.lambda_sigma > 0.0)) throw std::domain_error("lambda_sigma must be positive");
    const double bl = in.beta * in.lambda_sigma;
    const double eps_n = detail::eps_norm(in);
    const double eps_term = term == EpsTerm::SquaredNorm ? eps_n * eps_n : eps_n;
    return in.rho * (in.gamma + in.beta * in.laplacian_sup * eps_term) / bl +
           in.init.z2n_norm + in.rho * in.init.q2n_norm * decay_gap_factor(in.alpha, bl);
}

/// Slope constant bounding d|x_hat - x|/dt <= alpha |x_hat - x| + c_i.
inline double c_i(const GuaranteeInputs& in, double eta_or_zeta, int agent) {
    detail::require_rates(in);
    const double level = std::sqrt(eta_or_zeta * eta_or_zeta + in.init.z1_abs * in.init.z1_abs);
    return in.kappa(agent) + (in.alpha + 2.0 * in.beta * in.dout_bar(agent)) * level +
           in.init.q2n_norm + in.alpha * eta_or_zeta;
}

/// Inter-event lower bound for the directed-threshold law. A vanishing
/// slope constant means the mismatch never grows: tau = +infinity.
inline double tau_from_radius(double alpha, double radius, double c) {
    if (c < 0.0) throw std::domain_error("slope constant must be nonnegative");
    if (c == 0.0) return std::numeric_limits<double>::infinity();
    return std::log1p(alpha * radius / c) / alpha;
}

inline double tau_directed(const GuaranteeInputs& in, int agent,
                           EpsTerm term = EpsTerm::SquaredNorm) {
    return tau_from_radius(in.alpha, in.eps(agent), c_i(in, eta(in, term), agent));
}

/// Counterpart of eta for the relative law over connected undirected
/// schedules.
inline double zeta(const GuaranteeInputs& in) {
    detail::require_rates(in);
    if (!(in.lambda2_lower > 0.0)) {
        throw std::domain_error("the relative-law bounds need a connected undirected schedule");
    }
    const double bl = in.beta * in.lambda2_lower;
    const double drive = in.init.q2n_norm / 2.0 + in.gamma / bl;
    const double eps_n = detail::eps_norm(in);
    const double sustained =
        drive + std::sqrt(drive * drive + eps_n * eps_n / (2.0 * in.lambda2_lower));
    return std::max(in.init.z2n_norm, sustained);
}

inline double tau_undirected(const GuaranteeInputs& in, int agent) {
    const double radius =
        in.eps(agent) / (2.0 * std::sqrt(in.dout_bar(agent)));
    return tau_from_radius(in.alpha, radius, c_i(in, zeta(in), agent));
}

/// Ultimate tracking-error radius for the directed law; with eps = 0 this
/// is the continuous-communication guarantee.
inline double ultimate_bound_directed(const GuaranteeInputs& in) {
    detail::require_rates(in);
    if (!(in.lambda_sigma > 0.0)) throw std::domain_error("lambda_sigma must be positive");
    return in.rho * (in.gamma + in.beta * in.laplacian_sup * detail::eps_norm(in)) /
           (in.beta * in.lambda_sigma);
}

/// Ultimate tracking-error radius for the relative law.
inline double ultimate_bound_undirected(const GuaranteeInputs& in) {
    detail::require_rates(in);
    if (!(in.lambda2_lower > 0.0)) {
        throw std::domain_error("the relative-law bounds need a connected undirected schedule");
    }
    const double head = in.gamma / (in.beta * in.lambda2_lower);
    const double eps_n = detail::eps_norm(in);
    return head + std::sqrt(head * head + eps_n * eps_n / (2.0 * in.lambda2_lower));
}

inline double convergence_rate(const GuaranteeInputs& in) {
    return std::min(in.alpha, in.beta * in.lambda_sigma);
}

struct Certification {
    double rho = 1.0;
    double lambda_sigma = 0.0;
};

/// The exponential bound holds with rho = 1 and lambda_sigma equal to the
/// schedule infimum of lambda2_hat whenever every segment is strongly
/// connected and weight-balanced. Otherwise no constructive pair is
/// available and the caller must supply one.
inline std::optional<Certification> certify_lambda_sigma(const GraphSchedule& sched) {
    double lam = std::numeric_limits<double>::infinity();
    for (const auto& seg : sched.segments()) {
        if (!seg.graph.is_weight_balanced() || !seg.graph.is_strongly_connected()) {
            return std::nullopt;
        }
        lam = std::min(lam, spectral_summary(seg.graph).lambda2_hat);
    }
    return Certification{1.0, lam};
}

/// Guarantee bundle attached to a run. Fields that do not apply to the
/// active law (or that need a certificate the schedule cannot provide)
/// are quiet NaNs.
struct GuaranteeReport {
    bool certified = false;
    std::string law;
    double rho = std::numeric_limits<double>::quiet_NaN();
    double lambda_sigma = std::numeric_limits<double>::quiet_NaN();
    double lambda2_lower = std::numeric_limits<double>::quiet_NaN();
    double laplacian_sup = std::numeric_limits<double>::quiet_NaN();
    double gamma = 0.0;
    Vector kappa;
    Vector eps;
    Vector dout_bar;
    double eta_printed = std::numeric_limits<double>::quiet_NaN();
    double eta_normed = std::numeric_limits<double>::quiet_NaN();
    double zeta_value = std::numeric_limits<double>::quiet_NaN();
    double eta_or_zeta = std::numeric_limits<double>::quiet_NaN();
    Vector c;
    Vector tau;
    Vector ultimate_bound;
    double rate = std::numeric_limits<double>::quiet_NaN();
    /// Convergence interval (0, min{1/alpha, 1/(beta max_i dout_i)}) for
    /// the fixed-step baseline; populated for periodic runs only.
    std::optional<std::pair<double, double>> euler_stepsize_interval;

    /// tau entries may be +infinity for agents whose mismatch cannot grow.
    bool has_tau() const { return tau.size() > 0 && tau.minCoeff() > 0.0; }
    bool has_ultimate_bound() const {
        return ultimate_bound.size() > 0 && std::isfinite(ultimate_bound.maxCoeff());
    }
};

}  // namespace detcon
