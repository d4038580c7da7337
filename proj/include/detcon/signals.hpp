#pragma once

// Reference-signal algebra. Expressions are immutable trees over a small
// set of smooth primitives, closed under scaling and finite sums, and
// carry exact closed-form derivatives.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace detcon {

class SignalExpr {
public:
    struct Constant {
        double value;
    };
    /// amplitude * sin(omega t + phase), or the cosine counterpart.
    struct Sinusoid {
        double amplitude;
        double omega;
        double phase;
        bool cosine;
    };
    /// atan(rate * t)
    struct Arctan {
        double rate;
    };
    /// exp(-rate * t)
    struct Exponential {
        double rate;
    };
    /// 1 / (t + offset)^power with offset > 0, pole-free on t >= 0.
    struct Reciprocal {
        double offset;
        double power;
    };
    /// sum_k coeffs[k] * t^k
    struct Polynomial {
        std::vector<double> coeffs;
    };
    struct Scale;
    struct Sum;
    struct Node;

    static SignalExpr constant(double value) { return make(Constant{value}); }
    static SignalExpr sine(double amplitude, double omega, double phase = 0.0) {
        return make(Sinusoid{amplitude, omega, phase, false});
    }
    static SignalExpr cosine(double amplitude, double omega, double phase = 0.0) {
        return make(Sinusoid{amplitude, omega, phase, true});
    }
    static SignalExpr arctan(double rate) { return make(Arctan{rate}); }
    static SignalExpr exponential(double rate) { return make(Exponential{rate}); }
    static SignalExpr reciprocal(double offset, double power) {
        if (!(offset > 0.0)) {
            throw std::invalid_argument("reciprocal signal needs a positive offset");
        }
        return make(Reciprocal{offset, power});
    }
    static SignalExpr polynomial(std::vector<double> coeffs) {
        if (coeffs.empty()) throw std::invalid_argument("polynomial needs coefficients");
        return make(Polynomial{std::move(coeffs)});
    }

    double value(double t) const;
    double derivative(double t) const;
    const Node& node() const { return *node_; }

    SignalExpr scaled(double factor) const;
    friend SignalExpr operator+(const SignalExpr& a, const SignalExpr& b);
    friend SignalExpr operator*(double k, const SignalExpr& s) { return s.scaled(k); }
    SignalExpr operator+(double c) const { return *this + constant(c); }
    SignalExpr operator-(double c) const { return *this + constant(-c); }

private:
    template <typename Payload>
    static SignalExpr make(Payload&& p);

    std::shared_ptr<const Node> node_;
};

struct SignalExpr::Scale {
    double factor;
    SignalExpr term;
};

struct SignalExpr::Sum {
    std::vector<SignalExpr> terms;
};

struct SignalExpr::Node {
    std::variant<Constant, Sinusoid, Arctan, Exponential, Reciprocal, Polynomial, Scale, Sum> payload;
};

template <typename Payload>
SignalExpr SignalExpr::make(Payload&& p) {
    SignalExpr e;
    e.node_ = std::make_shared<const Node>(Node{std::forward<Payload>(p)});
    return e;
}

inline SignalExpr SignalExpr::scaled(double factor) const {
    return make(Scale{factor, *this});
}

inline SignalExpr operator+(const SignalExpr& a, const SignalExpr& b) {
    return SignalExpr::make(SignalExpr::Sum{{a, b}});
}

inline double SignalExpr::value(double t) const {
    struct Eval {
        double t;
        double operator()(const Constant& c) const { return c.value; }
        double operator()(const Sinusoid& s) const {
            const double arg = s.omega * t + s.phase;
            return s.amplitude * (s.cosine ? std::cos(arg) : std::sin(arg));
        }
        double operator()(const Arctan& a) const { return std::atan(a.rate * t); }
        double operator()(const Exponential& e) const { return std::exp(-e.rate * t); }
        double operator()(const Reciprocal& r) const { return std::pow(t + r.offset, -r.power); }
        double operator()(const Polynomial& p) const {
            double acc = 0.0;
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * t + *it;
            return acc;
        }
        double operator()(const Scale& s) const { return s.factor * s.term.value(t); }
        double operator()(const Sum& s) const {
            double acc = 0.0;
            for (const auto& term : s.terms) acc += term.value(t);
            return acc;
        }
    };
    return std::visit(Eval{t}, node_->payload);
}

inline double SignalExpr::derivative(double t) const {
    struct Eval {
        double t;
        double operator()(const Constant&) const { return 0.0; }
        double operator()(const Sinusoid& s) const {
            const double arg = s.omega * t + s.phase;
            return s.amplitude * s.omega * (s.cosine ? -std::sin(arg) : std::cos(arg));
        }
        double operator()(const Arctan& a) const {
            const double u = a.rate * t;
            return a.rate / (1.0 + u * u);
        }
        double operator()(const Exponential& e) const { return -e.rate * std::exp(-e.rate * t); }
        double operator()(const Reciprocal& r) const {
            return -r.power * std::pow(t + r.offset, -r.power - 1.0);
        }
        double operator()(const Polynomial& p) const {
            double acc = 0.0;
            for (std::size_t k = p.coeffs.size(); k-- > 1;) {
                acc = acc * t + static_cast<double>(k) * p.coeffs[k];
            }
            return acc;
        }
        double operator()(const Scale& s) const { return s.factor * s.term.derivative(t); }
        double operator()(const Sum& s) const {
            double acc = 0.0;
            for (const auto& term : s.terms) acc += term.derivative(t);
            return acc;
        }
    };
    return std::visit(Eval{t}, node_->payload);
}

inline Eigen::VectorXd values_at(const std::vector<SignalExpr>& signals, double t) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(signals.size()));
    for (std::size_t i = 0; i < signals.size(); ++i) out(static_cast<Eigen::Index>(i)) = signals[i].value(t);
    return out;
}

inline Eigen::VectorXd derivatives_at(const std::vector<SignalExpr>& signals, double t) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(signals.size()));
    for (std::size_t i = 0; i < signals.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = signals[i].derivative(t);
    }
    return out;
}

/// Sampling grid used for the essential-supremum estimates.
struct GridSpec {
    double t0 = 0.0;
    double t1 = 0.0;
    double step = 0.0;
};

/// Per-agent bound kappa_i on |d r_i / dt| and a bound gamma on the norm
/// of the mean-removed derivative vector, both taken as dense-grid maxima
/// inflated by 1%.
struct InputBounds {
    Eigen::VectorXd kappa;
    double gamma = 0.0;
    GridSpec sampled_on;
};

inline InputBounds estimate_bounds(const std::vector<SignalExpr>& signals, double horizon,
                                   double grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const auto n = static_cast<Eigen::Index>(signals.size());
    InputBounds out;
    out.kappa = Eigen::VectorXd::Zero(n);
    out.sampled_on = GridSpec{0.0, horizon, grid_step};
    const auto steps = static_cast<long>(std::floor(horizon / grid_step + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * grid_step;
        const Eigen::VectorXd d = derivatives_at(signals, t);
        out.kappa = out.kappa.cwiseMax(d.cwiseAbs());
        if (n > 1) {
            const Eigen::VectorXd centered = d.array() - d.mean();
            out.gamma = std::max(out.gamma, centered.norm());
        }
    }
    constexpr double kSafety = 1.01;
    out.kappa *= kSafety;
    out.gamma *= kSafety;
    return out;
}

}  // namespace detcon
