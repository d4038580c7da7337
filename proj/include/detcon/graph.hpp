#pragma once

// Weighted digraphs, piecewise-constant switching schedules and their
// spectral quantities (Laplacian, degree vectors, weight-balance tests,
// second-smallest eigenvalue of the symmetric part).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace detcon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Declared range for nonzero edge weights.
struct WeightBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Weighted digraph on n nodes. Entry (i, j) of the adjacency matrix is
/// positive iff node i receives information from node j; the diagonal is
/// zero. Immutable after construction.
class WeightedDigraph {
public:
    explicit WeightedDigraph(Matrix adjacency,
                             std::optional<WeightBounds> declared = std::nullopt)
        : adj_(std::move(adjacency)) {
        if (adj_.rows() != adj_.cols() || adj_.rows() < 1) {
            throw std::invalid_argument("adjacency matrix must be square and nonempty");
        }
        double wmin = std::numeric_limits<double>::infinity();
        double wmax = 0.0;
        for (Eigen::Index i = 0; i < adj_.rows(); ++i) {
            for (Eigen::Index j = 0; j < adj_.cols(); ++j) {
                const double a = adj_(i, j);
                if (!(a >= 0.0)) {
                    throw std::invalid_argument("edge weights must be nonnegative");
                }
                if (i == j && a != 0.0) {
                    throw std::invalid_argument("adjacency diagonal must be zero");
                }
                if (a > 0.0) {
                    wmin = std::min(wmin, a);
                    wmax = std::max(wmax, a);
                }
            }
        }
        if (wmax == 0.0) {
            bounds_ = declared.value_or(WeightBounds{0.0, 0.0});
        } else if (declared) {
            if (!(declared->lo > 0.0) || declared->lo > declared->hi) {
                throw std::invalid_argument("declared weight bounds must satisfy 0 < lo <= hi");
            }
            if (wmin < declared->lo || wmax > declared->hi) {
                throw std::invalid_argument("edge weight outside declared bounds");
            }
            bounds_ = *declared;
        } else {
            bounds_ = WeightBounds{wmin, wmax};
        }
    }

    int size() const { return static_cast<int>(adj_.rows()); }
    const Matrix& adjacency() const { return adj_; }
    const WeightBounds& weight_bounds() const { return bounds_; }
    bool has_edges() const { return bounds_.hi > 0.0; }

    Vector out_degrees() const { return adj_.rowwise().sum(); }
    Vector in_degrees() const { return adj_.colwise().sum().transpose(); }

    /// Degenerate nodes (zero weighted out-degree) are permitted here but
    /// rejected by the neighbor-relative trigger law.
    bool has_isolated_node() const { return out_degrees().minCoeff() <= 0.0; }

    /// Out-degree Laplacian L = D_out - A. Rows sum to zero.
    Matrix laplacian() const {
        Matrix lap = -adj_;
        lap.diagonal() += out_degrees();
        return lap;
    }

    /// Default balance tolerance: 1e-9 relative to the largest degree.
    double balance_tolerance() const {
        const double dmax = std::max(out_degrees().maxCoeff(), in_degrees().maxCoeff());
        return 1e-9 * std::max(1.0, dmax);
    }

    /// True iff every node's weighted out- and in-degrees coincide,
    /// equivalently 1^T L = 0^T.
    bool is_weight_balanced(double tol = -1.0) const {
        if (tol < 0.0) tol = balance_tolerance();
        return (out_degrees() - in_degrees()).cwiseAbs().maxCoeff() <= tol;
    }

    bool is_strongly_connected() const {
        const int n = size();
        if (n == 1) return true;
        return reaches_all(adj_) && reaches_all(Matrix(adj_.transpose()));
    }

    // --- generators (0-based node indices) ---

    static WeightedDigraph ring(int n, double weight = 1.0, bool directed = false) {
        require_nodes(n, 2, "ring");
        Matrix a = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            a(i, (i + 1) % n) = weight;
            if (!directed) a((i + 1) % n, i) = weight;
        }
        return WeightedDigraph(std::move(a));
    }

    static WeightedDigraph complete(int n, double weight = 1.0) {
        require_nodes(n, 2, "complete");
        Matrix a = Matrix::Constant(n, n, weight);
        a.diagonal().setZero();
        return WeightedDigraph(std::move(a));
    }

    /// Two nodes joined by an undirected edge; everyone else isolated.
    static WeightedDigraph pair_link(int n, int i, int j, double weight = 1.0) {
        require_nodes(n, 2, "pair");
        check_index(n, i);
        check_index(n, j);
        if (i == j) throw std::invalid_argument("pair endpoints must differ");
        Matrix a = Matrix::Zero(n, n);
        a(i, j) = weight;
        a(j, i) = weight;
        return WeightedDigraph(std::move(a));
    }

    /// Undirected ring with the ring edge {i, j} removed.
    static WeightedDigraph ring_minus_edge(int n, int i, int j, double weight = 1.0) {
        require_nodes(n, 3, "ring_minus_edge");
        check_index(n, i);
        check_index(n, j);
        Matrix a = ring(n, weight, false).adjacency();
        if (a(i, j) == 0.0 || a(j, i) == 0.0) {
            throw std::invalid_argument("ring_minus_edge: {i, j} is not a ring edge");
        }
        a(i, j) = 0.0;
        a(j, i) = 0.0;
        return WeightedDigraph(std::move(a));
    }

    static WeightedDigraph edgeless(int n) {
        require_nodes(n, 1, "edgeless");
        return WeightedDigraph(Matrix::Zero(n, n));
    }

private:
    static void require_nodes(int n, int at_least, const char* what) {
        if (n < at_least) {
            throw std::invalid_argument(std::string(what) + ": too few nodes");
        }
    }
    static void check_index(int n, int i) {
        if (i < 0 || i >= n) throw std::invalid_argument("node index out of range");
    }
    static bool reaches_all(const Matrix& a) {
        const int n = static_cast<int>(a.rows());
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int visited = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int w = 0; w < n; ++w) {
                if (!seen[w] && a(u, w) > 0.0) {
                    seen[w] = 1;
                    ++visited;
                    stack.push_back(w);
                }
            }
        }
        return visited == n;
    }

    Matrix adj_;
    WeightBounds bounds_;
};

/// Spectral data of a single weight-balanced digraph.
struct SpectralSummary {
    double lambda2_hat = 0.0;  ///< second-smallest eigenvalue of (L + L^T)/2
    double laplacian_norm = 0.0;
    Vector dout;
    Vector din;
};

inline SpectralSummary spectral_summary(const WeightedDigraph& g) {
    if (!g.is_weight_balanced()) {
        throw std::domain_error("spectral_summary requires a weight-balanced digraph");
    }
    const Matrix lap = g.laplacian();
    const Matrix sym = 0.5 * (lap + lap.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigensolve failed");
    }
    SpectralSummary out;
    out.lambda2_hat = g.size() > 1 ? es.eigenvalues()(1) : 0.0;
    out.laplacian_norm =
        Eigen::JacobiSVD<Matrix>(lap).singularValues()(0);
    out.dout = g.out_degrees();
    out.din = g.in_degrees();
    return out;
}

/// Piecewise-constant (from the right) sequence of digraphs on a shared
/// vertex set. Switching times start at s_0 = 0 and are strictly
/// increasing with a positive lower bound on the gaps.
class GraphSchedule {
public:
    struct Segment {
        double start;
        WeightedDigraph graph;
    };

    GraphSchedule(std::vector<Segment> segments, double horizon,
                  std::optional<double> min_gap = std::nullopt)
        : segments_(std::move(segments)), horizon_(horizon) {
        if (segments_.empty()) throw std::invalid_argument("schedule needs at least one segment");
        if (segments_.front().start != 0.0) {
            throw std::invalid_argument("first segment must start at t = 0");
        }
        if (!(horizon_ > 0.0)) throw std::invalid_argument("horizon must be positive");
        const int n = segments_.front().graph.size();
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < segments_.size(); ++k) {
            if (segments_[k].graph.size() != n) {
                throw std::invalid_argument("all segments must share the vertex set");
            }
            const double d = segments_[k].start - segments_[k - 1].start;
            if (!(d > 0.0)) throw std::invalid_argument("switching times must be strictly increasing");
            gap = std::min(gap, d);
        }
        if (min_gap) {
            if (!(*min_gap > 0.0)) throw std::invalid_argument("min switch gap must be positive");
            if (gap < *min_gap) {
                throw std::invalid_argument("inter-switch gap below the declared lower bound");
            }
            min_gap_ = *min_gap;
        } else {
            min_gap_ = gap;
        }
        if (segments_.back().start >= horizon_) {
            throw std::invalid_argument("last switching time must precede the horizon");
        }
    }

    static GraphSchedule constant(WeightedDigraph g, double horizon) {
        std::vector<Segment> seg;
        seg.push_back(Segment{0.0, std::move(g)});
        return GraphSchedule(std::move(seg), horizon);
    }

    const std::vector<Segment>& segments() const { return segments_; }
    double horizon() const { return horizon_; }
    double min_switch_gap() const { return min_gap_; }
    int size() const { return segments_.front().graph.size(); }

    /// Index of the segment active at time t (right-continuous).
    int segment_index(double t) const {
        int k = static_cast<int>(segments_.size()) - 1;
        while (k > 0 && segments_[static_cast<std::size_t>(k)].start > t) --k;
        return k;
    }

    const WeightedDigraph& at(double t) const {
        return segments_[static_cast<std::size_t>(segment_index(t))].graph;
    }

    std::vector<double> switch_times() const {
        std::vector<double> out;
        for (std::size_t k = 1; k < segments_.size(); ++k) out.push_back(segments_[k].start);
        return out;
    }

    bool all_weight_balanced() const {
        return std::all_of(segments_.begin(), segments_.end(),
                           [](const Segment& s) { return s.graph.is_weight_balanced(); });
    }

private:
    std::vector<Segment> segments_;
    double horizon_;
    double min_gap_;
};

/// True iff the union of all segments active during [t1, t2) is strongly
/// connected.
inline bool is_jointly_strongly_connected(const GraphSchedule& sched, double t1, double t2) {
    if (!(t1 < t2)) throw std::invalid_argument("empty interval");
    const int n = sched.size();
    Matrix acc = Matrix::Zero(n, n);
    const auto& segs = sched.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const double seg_start = segs[k].start;
        const double seg_end =
            (k + 1 < segs.size()) ? segs[k + 1].start : std::max(sched.horizon(), t2);
        if (seg_start < t2 && seg_end > t1) acc += segs[k].graph.adjacency();
    }
    return WeightedDigraph(std::move(acc)).is_strongly_connected();
}

/// Schedule-level extrema: sup of the Laplacian norm, inf of lambda2_hat
/// over the strongly connected weight-balanced segments (absent when no
/// segment qualifies), and the per-agent sup of the weighted out-degree.
struct ScheduleExtrema {
    double laplacian_sup = 0.0;
    std::optional<double> lambda2_inf;
    Vector dout_bar;
};

inline ScheduleExtrema schedule_extrema(const GraphSchedule& sched) {
    ScheduleExtrema out;
    out.dout_bar = Vector::Zero(sched.size());
    for (const auto& seg : sched.segments()) {
        const Matrix lap = seg.graph.laplacian();
        out.laplacian_sup = std::max(out.laplacian_sup,
                                     Eigen::JacobiSVD<Matrix>(lap).singularValues()(0));
        out.dout_bar = out.dout_bar.cwiseMax(seg.graph.out_degrees());
        if (seg.graph.is_weight_balanced() && seg.graph.is_strongly_connected()) {
            const double l2 = spectral_summary(seg.graph).lambda2_hat;
            out.lambda2_inf = out.lambda2_inf ? std::min(*out.lambda2_inf, l2) : l2;
        }
    }
    return out;
}

/// Times at which each agent acquires a listener: agent i appears with
/// switch time s_k iff some entry (j, i) of the adjacency goes from zero
/// to positive at s_k. At those times the agent rebroadcasts its last
/// transmitted state to the newcomers.
inline std::map<int, std::vector<double>> in_neighbor_acquisitions(const GraphSchedule& sched) {
    std::map<int, std::vector<double>> out;
    const auto& segs = sched.segments();
    for (std::size_t k = 1; k < segs.size(); ++k) {
        const Matrix& before = segs[k - 1].graph.adjacency();
        const Matrix& after = segs[k].graph.adjacency();
        for (int i = 0; i < sched.size(); ++i) {
            for (int j = 0; j < sched.size(); ++j) {
                if (before(j, i) == 0.0 && after(j, i) > 0.0) {
                    out[i].push_back(segs[k].start);
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace detcon
