#include <catch2/catch_amalgamated.hpp>

#include "detcon/builtin.hpp"
#include "detcon/metrics.hpp"
#include "detcon/svg.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace detcon;
using Catch::Approx;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "detcon_metrics_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("summary of a quiet run keeps the infinity sentinel", "[metrics]") {
    Scenario sc;
    sc.name = "quiet";
    sc.schedule = GraphSchedule::constant(WeightedDigraph::ring(5, 1.0, true), 6.0);
    for (int i = 0; i < 5; ++i) sc.signals.push_back(SignalExpr::constant(1.5));
    sc.alpha = 1.0;
    sc.beta = 4.0;
    sc.trigger = DirectedThreshold{Vector::Constant(5, 0.1)};
    sc.x0 = Vector::Constant(5, 1.5);
    sc.v0 = Vector::Zero(5);
    sc.horizon = 5.0;
    const auto s = summarize(run(sc));
    for (int i = 0; i < 5; ++i) {
        CHECK(s.event_count[static_cast<std::size_t>(i)] == 1);
        CHECK(std::isinf(s.min_gap(i)));
    }
    CHECK(s.tail_error <= 1e-12);
}

TEST_CASE("switching-digraph reproduction lands near the reported counts", "[metrics]") {
    const auto rec = run(builtin::switching_digraph_threshold());
    const auto s = summarize(rec);
    // reported per-agent totals (41, 49, 44, 31, 40); initial conditions
    // are not published, so the reproduction targets wide tolerances
    const int reported[5] = {41, 49, 44, 31, 40};
    int total = 0;
    for (int i = 0; i < 5; ++i) {
        const auto c = s.event_count[static_cast<std::size_t>(i)];
        CHECK(c >= reported[i] / 2);
        CHECK(c <= reported[i] * 3 / 2);
        total += c;
    }
    CHECK(total >= 144);  // 205 +/- 30%
    CHECK(total <= 267);
    // rebroadcasts occur at the five pair switches and the ring return
    int rebroadcasts = 0;
    for (int r : s.rebroadcast_count) rebroadcasts += r;
    CHECK(rebroadcasts > 0);
}

TEST_CASE("summaries expose the bound margin", "[metrics]") {
    Scenario sc = builtin::ring_relative();
    const auto rec = run(sc);
    const auto s = summarize(rec);
    REQUIRE(rec.bounds.has_ultimate_bound());
    CHECK(std::isfinite(s.bound_margin));
    CHECK(s.bound_margin >= 0.0);  // guarantee dominates the observed tail
    // pinned: gamma/(beta l2) + sqrt((gamma/(beta l2))^2 + ||eps||^2/(2 l2))
    // with the estimated gamma, l2 = 1.381966..., beta = 4, eps = 0.2 sqrt(2)
    CHECK(rec.bounds.ultimate_bound(0) == Approx(0.525922).epsilon(1e-4));
    CHECK(s.tail_error == Approx(rec.tail_error_per_agent().maxCoeff()));

    // paired continuous run tracks at least as tightly, up to the
    // threshold-driven slack
    Scenario cont = sc;
    cont.name = "ring-continuous-paired";
    cont.trigger = ContinuousLaw{};
    const auto cs = summarize(run(cont));
    CHECK(cs.tail_error <= s.tail_error + rec.bounds.eps.norm());
}

TEST_CASE("event triggering communicates far less than the fixed-step baseline", "[metrics]") {
    const auto event_run = summarize(run(builtin::ring_relative()));
    const auto baseline = summarize(run(builtin::ring_euler_baseline()));
    int event_total = 0;
    int baseline_total = 0;
    for (int c : event_run.event_count) event_total += c;
    for (int c : baseline.event_count) baseline_total += c;
    // roughly a factor of four in the bundled configuration
    CHECK(event_total * 3 <= baseline_total);
    CHECK(baseline_total == 5 * 167);
}

TEST_CASE("summary table serializes one row per agent", "[metrics]") {
    Scenario sc = builtin::ring_relative();
    sc.horizon = 6.0;
    const auto s = summarize(run(sc));
    std::ostringstream os;
    write_summary_csv(os, {s});
    const std::string text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);  // header + 5 agents
    CHECK(text.find("ring-relative") != std::string::npos);
}

TEST_CASE("plots land on disk as svg documents", "[metrics]") {
    const auto dir = temp_dir();
    Scenario sc = builtin::ring_relative();
    sc.horizon = 6.0;
    const auto rec = run(sc);

    const auto err_path = dir / "error.svg";
    const auto raster_path = dir / "raster.svg";
    svg::plot_error_curves({&rec}, err_path.string(), rec.bounds.ultimate_bound(0));
    svg::plot_event_raster(rec, raster_path.string());
    const std::string err_svg = slurp(err_path);
    const std::string ras_svg = slurp(raster_path);
    CHECK(err_svg.rfind("<svg", 0) == 0);
    CHECK(err_svg.find("polyline") != std::string::npos);
    CHECK(err_svg.find("bound") != std::string::npos);
    CHECK(ras_svg.find("<line") != std::string::npos);

    // overlay of two runs
    Scenario cont = sc;
    cont.name = "ring-continuous-overlay";
    cont.trigger = ContinuousLaw{};
    const auto rec2 = run(cont);
    const auto overlay_path = dir / "overlay.svg";
    svg::plot_error_curves({&rec, &rec2}, overlay_path.string(), 0.05);
    CHECK(slurp(overlay_path).find("ring-continuous-overlay") != std::string::npos);

    RunRecord empty;
    CHECK_THROWS_AS(svg::plot_event_raster(empty, (dir / "x.svg").string()),
                    std::invalid_argument);
    CHECK_THROWS_AS(svg::plot_error_curves({&rec}, "/nonexistent-dir/zz/e.svg"),
                    std::runtime_error);
    fs::remove_all(dir);
}
