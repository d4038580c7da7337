#include <catch2/catch_amalgamated.hpp>

#include "detcon/graph.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace detcon;
using Catch::Approx;

namespace {

// Independent reachability oracle: Floyd-Warshall transitive closure.
bool strongly_connected_oracle(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
        reach[i][i] = 1;
        for (int j = 0; j < n; ++j)
            if (a(i, j) > 0.0) reach[i][j] = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

Matrix random_adjacency(std::mt19937& rng, int n, double density = 0.5) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && u(rng) < density) a(i, j) = 0.1 + u(rng);
    return a;
}

// Weight-balanced random digraph: superposition of weighted directed cycles.
Matrix random_balanced_adjacency(std::mt19937& rng, int n, int cycles = 4) {
    std::uniform_real_distribution<double> u(0.2, 1.5);
    Matrix a = Matrix::Zero(n, n);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int c = 0; c < cycles; ++c) {
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::shuffle(order.begin(), order.end(), rng);
        const double w = u(rng);
        for (int i = 0; i < n; ++i) {
            a(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>((i + 1) % n)]) += w;
        }
    }
    a.diagonal().setZero();
    return a;
}

}  // namespace

TEST_CASE("laplacian of the smallest graphs", "[graph]") {
    Matrix a(2, 2);
    a << 0, 1, 1, 0;
    const Matrix lap = WeightedDigraph(a).laplacian();
    CHECK(lap(0, 0) == 1.0);
    CHECK(lap(0, 1) == -1.0);
    CHECK(lap(1, 0) == -1.0);
    CHECK(lap(1, 1) == 1.0);

    const auto ring5 = WeightedDigraph::ring(5, 1.0, true);
    const Matrix l5 = ring5.laplacian();
    for (int i = 0; i < 5; ++i) {
        CHECK(l5(i, i) == 1.0);
        CHECK(l5.row(i).sum() == Approx(0.0).margin(1e-12));
        CHECK((l5.row(i).array() == -1.0).count() == 1);
    }
}

TEST_CASE("laplacian rows sum to zero on random graphs", "[graph]") {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        WeightedDigraph g(random_adjacency(rng, 4));
        CHECK((g.laplacian() * Vector::Ones(4)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("weight balance detection", "[graph]") {
    CHECK(WeightedDigraph::ring(5, 1.0, true).is_weight_balanced());

    Matrix one_way = Matrix::Zero(2, 2);
    one_way(1, 0) = 1.0;  // node 0 sends to node 1 only
    CHECK_FALSE(WeightedDigraph(one_way).is_weight_balanced());

    std::mt19937 rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        Matrix a = random_adjacency(rng, 5);
        Matrix sym = 0.5 * (a + a.transpose());
        sym.diagonal().setZero();
        CHECK(WeightedDigraph(sym).is_weight_balanced());
    }
}

TEST_CASE("balance is equivalent to vanishing column sums of L", "[graph]") {
    std::mt19937 rng(13);
    for (int rep = 0; rep < 60; ++rep) {
        WeightedDigraph g(rep % 2 == 0 ? random_adjacency(rng, 5)
                                       : random_balanced_adjacency(rng, 5));
        const double tol = g.balance_tolerance();
        const double col_inf =
            (Vector::Ones(5).transpose() * g.laplacian()).cwiseAbs().maxCoeff();
        CHECK(g.is_weight_balanced(tol) == (col_inf <= tol));
    }
}

TEST_CASE("strong connectivity agrees with a closure oracle", "[graph]") {
    CHECK(WeightedDigraph::ring(5, 1.0, true).is_strongly_connected());
    CHECK_FALSE(WeightedDigraph::pair_link(5, 0, 1).is_strongly_connected());
    CHECK_FALSE(WeightedDigraph::edgeless(4).is_strongly_connected());

    std::mt19937 rng(17);
    for (int rep = 0; rep < 80; ++rep) {
        Matrix a = random_adjacency(rng, 5, 0.3);
        CHECK(WeightedDigraph(a).is_strongly_connected() == strongly_connected_oracle(a));
    }
}

TEST_CASE("symmetric part of a balanced laplacian is PSD", "[graph]") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 40; ++rep) {
        WeightedDigraph g(random_balanced_adjacency(rng, 6));
        const Matrix lap = g.laplacian();
        const Matrix sym = 0.5 * (lap + lap.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        if (g.is_strongly_connected()) {
            CHECK(spectral_summary(g).lambda2_hat > 0.0);
        }
    }
}

TEST_CASE("ring eigenvalues match the circulant closed form", "[graph]") {
    const double two_pi_fifth = 2.0 * std::numbers::pi / 5.0;

    const auto undirected = spectral_summary(WeightedDigraph::ring(5, 1.0, false));
    CHECK(undirected.lambda2_hat == Approx(2.0 * (1.0 - std::cos(two_pi_fifth))).epsilon(1e-12));
    CHECK(undirected.lambda2_hat == Approx(1.3819660112501051).epsilon(1e-12));

    const auto directed = spectral_summary(WeightedDigraph::ring(5, 1.0, true));
    CHECK(directed.lambda2_hat == Approx(1.0 - std::cos(two_pi_fifth)).epsilon(1e-12));
    // spectral norm of I - P: largest singular value of the circulant
    CHECK(directed.laplacian_norm ==
          Approx(std::sqrt(2.0 - 2.0 * std::cos(2.0 * two_pi_fifth))).epsilon(1e-12));

    CHECK(spectral_summary(WeightedDigraph::complete(2)).lambda2_hat == Approx(2.0));
}

TEST_CASE("spectral summary rejects unbalanced graphs", "[graph]") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = 1.0;
    a(1, 2) = 2.0;
    a(2, 0) = 1.0;
    CHECK_THROWS_AS(spectral_summary(WeightedDigraph(a)), std::domain_error);
}

TEST_CASE("spectral summary is invariant under relabeling", "[graph]") {
    std::mt19937 rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a = random_balanced_adjacency(rng, 5);
        std::vector<int> p{0, 1, 2, 3, 4};
        std::shuffle(p.begin(), p.end(), rng);
        Matrix ap(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                ap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]) = a(i, j);
        const auto s = spectral_summary(WeightedDigraph(a));
        const auto sp = spectral_summary(WeightedDigraph(ap));
        CHECK(s.lambda2_hat == Approx(sp.lambda2_hat).margin(1e-10));
        CHECK(s.laplacian_norm == Approx(sp.laplacian_norm).margin(1e-10));
        for (int i = 0; i < 5; ++i) {
            CHECK(sp.dout(p[static_cast<std::size_t>(i)]) == Approx(s.dout(i)).margin(1e-12));
        }
    }
}

TEST_CASE("schedule lookup is right-continuous", "[graph]") {
    std::vector<GraphSchedule::Segment> segs;
    segs.push_back({0.0, WeightedDigraph::ring(5, 1.0, true)});
    segs.push_back({5.0, WeightedDigraph::pair_link(5, 0, 1)});
    GraphSchedule sched(std::move(segs), 10.0);
    CHECK(sched.segment_index(0.0) == 0);
    CHECK(sched.segment_index(4.999) == 0);
    CHECK(sched.segment_index(5.0) == 1);  // new graph active at the switch
    CHECK(sched.min_switch_gap() == 5.0);
}

TEST_CASE("schedule validation", "[graph]") {
    auto ring = WeightedDigraph::ring(5);
    CHECK_THROWS_AS(GraphSchedule({{1.0, ring}}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(GraphSchedule({{0.0, ring}, {0.0, ring}}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(GraphSchedule({{0.0, ring}, {4.0, ring}}, 10.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(GraphSchedule({{0.0, ring}, {12.0, ring}}, 10.0), std::invalid_argument);
}

TEST_CASE("joint connectivity over the pair rotation", "[graph]") {
    // Ring / rotating pairs / ring: the pair union covers a spanning cycle.
    std::vector<GraphSchedule::Segment> segs;
    segs.push_back({0.0, WeightedDigraph::ring(5, 1.0, true)});
    const int pairs[5][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};
    for (int k = 0; k < 5; ++k) {
        segs.push_back({5.0 + 2.0 * k, WeightedDigraph::pair_link(5, pairs[k][0], pairs[k][1])});
    }
    segs.push_back({15.0, WeightedDigraph::ring(5, 1.0, true)});
    GraphSchedule sched(std::move(segs), 20.0);

    CHECK(is_jointly_strongly_connected(sched, 5.0, 15.0));
    CHECK_FALSE(is_jointly_strongly_connected(sched, 5.0, 9.0));  // only two pairs
    CHECK(is_jointly_strongly_connected(sched, 0.0, 1.0));        // ring alone

    GraphSchedule empty_graphs = GraphSchedule::constant(WeightedDigraph::edgeless(5), 10.0);
    CHECK_FALSE(is_jointly_strongly_connected(empty_graphs, 0.0, 10.0));
    CHECK_THROWS_AS(is_jointly_strongly_connected(sched, 3.0, 3.0), std::invalid_argument);
}

TEST_CASE("schedule extrema fold over segments", "[graph]") {
    const auto ring = WeightedDigraph::ring(5, 1.0, true);
    const auto single = schedule_extrema(GraphSchedule::constant(ring, 10.0));
    const auto summary = spectral_summary(ring);
    REQUIRE(single.lambda2_inf.has_value());
    CHECK(*single.lambda2_inf == Approx(summary.lambda2_hat));
    CHECK(single.laplacian_sup == Approx(summary.laplacian_norm));

    // weights 1 then 2: out-degree sup doubles
    std::vector<GraphSchedule::Segment> segs;
    segs.push_back({0.0, WeightedDigraph::ring(5, 1.0, true)});
    segs.push_back({5.0, WeightedDigraph::ring(5, 2.0, true)});
    const auto two = schedule_extrema(GraphSchedule(std::move(segs), 10.0));
    CHECK(two.dout_bar.isApproxToConstant(2.0, 1e-12));
    CHECK(two.laplacian_sup == Approx(2.0 * summary.laplacian_norm));
    CHECK(*two.lambda2_inf == Approx(summary.lambda2_hat));

    // pair segments are not strongly connected and do not enter the inf
    std::vector<GraphSchedule::Segment> mixed;
    mixed.push_back({0.0, WeightedDigraph::ring(5, 1.0, true)});
    mixed.push_back({5.0, WeightedDigraph::pair_link(5, 0, 1)});
    const auto m = schedule_extrema(GraphSchedule(std::move(mixed), 10.0));
    CHECK(*m.lambda2_inf == Approx(summary.lambda2_hat));
}

TEST_CASE("in-neighbor acquisitions from edge-set diffs", "[graph]") {
    CHECK(in_neighbor_acquisitions(
              GraphSchedule::constant(WeightedDigraph::ring(5), 10.0))
              .empty());

    // pair(4,0) -> directed ring at t = 15: broadcasters 1..4 gain a listener,
    // agent 0 keeps its existing one (edge (4,0) persists).
    std::vector<GraphSchedule::Segment> segs;
    segs.push_back({0.0, WeightedDigraph::pair_link(5, 4, 0)});
    segs.push_back({15.0, WeightedDigraph::ring(5, 1.0, true)});
    const auto acq = in_neighbor_acquisitions(GraphSchedule(std::move(segs), 20.0));
    CHECK(acq.size() == 4);
    CHECK_FALSE(acq.contains(0));
    for (int i = 1; i < 5; ++i) {
        REQUIRE(acq.contains(i));
        CHECK(acq.at(i) == std::vector<double>{15.0});
    }

    // pure edge removal is not an acquisition
    std::vector<GraphSchedule::Segment> rem;
    rem.push_back({0.0, WeightedDigraph::ring(5, 1.0, false)});
    rem.push_back({5.0, WeightedDigraph::ring_minus_edge(5, 0, 1)});
    CHECK(in_neighbor_acquisitions(GraphSchedule(std::move(rem), 10.0)).empty());
}

TEST_CASE("generator validation", "[graph]") {
    CHECK_THROWS_AS(WeightedDigraph::ring_minus_edge(5, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(WeightedDigraph::pair_link(5, 2, 2), std::invalid_argument);
    Matrix bad = Matrix::Zero(3, 3);
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(WeightedDigraph(bad), std::invalid_argument);
    Matrix neg = Matrix::Zero(3, 3);
    neg(0, 1) = -0.5;
    CHECK_THROWS_AS(WeightedDigraph(neg), std::invalid_argument);
    Matrix narrow = Matrix::Zero(2, 2);
    narrow(0, 1) = narrow(1, 0) = 0.5;
    CHECK_THROWS_AS(WeightedDigraph(narrow, WeightBounds{1.0, 2.0}), std::invalid_argument);
}
