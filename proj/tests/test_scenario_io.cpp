#include <catch2/catch_amalgamated.hpp>

#include "detcon/builtin.hpp"
#include "detcon/scenario_io.hpp"

#include <filesystem>
#include <fstream>

using namespace detcon;
using Catch::Approx;

namespace fs = std::filesystem;

TEST_CASE("signal trees round-trip through json", "[io]") {
    const auto originals = builtin::offset_waveforms();
    for (const auto& s : originals) {
        const json j = signal_to_json(s);
        const SignalExpr back = signal_from_json(j);
        for (double t : {0.0, 0.5, 3.25, 11.0}) {
            CHECK(back.value(t) == s.value(t));
            CHECK(back.derivative(t) == s.derivative(t));
        }
        CHECK(signal_to_json(back) == j);
    }
}

TEST_CASE("signal schema accepts scale nodes and defaults", "[io]") {
    const auto j = json::parse(R"({"kind":"scale","factor":-2.0,
        "term":{"kind":"sum","terms":[{"kind":"sin","omega":1.5},
                                      {"kind":"const","value":3.0}]}})");
    const SignalExpr s = signal_from_json(j);
    CHECK(s.value(0.0) == Approx(-6.0));
    CHECK(s.derivative(0.0) == Approx(-3.0));  // -2 * 1 * 1.5 cos(0)
    CHECK_THROWS_AS(signal_from_json(json{{"kind", "nope"}}), std::invalid_argument);
    CHECK_THROWS_AS(signal_from_json(json{{"kind", "sum"}, {"terms", json::array()}}),
                    std::invalid_argument);
}

TEST_CASE("graph literals: generators and explicit matrices", "[io]") {
    const auto ring = graph_from_json(json::parse(R"({"kind":"ring","n":5,"directed":true})"));
    CHECK(ring.adjacency()(0, 1) == 1.0);
    CHECK(ring.adjacency()(1, 0) == 0.0);

    // 1-based labels in scenario files
    const auto pair = graph_from_json(json::parse(R"({"kind":"pair","n":5,"i":1,"j":2})"));
    CHECK(pair.adjacency()(0, 1) == 1.0);
    CHECK(pair.adjacency()(1, 0) == 1.0);
    CHECK_THROWS_AS(graph_from_json(json::parse(R"({"kind":"pair","n":5,"i":0,"j":2})")),
                    std::invalid_argument);

    const auto cut = graph_from_json(
        json::parse(R"({"kind":"ring_minus_edge","n":5,"i":2,"j":3,"weight":2.0})"));
    CHECK(cut.adjacency()(1, 2) == 0.0);
    CHECK(cut.adjacency()(2, 1) == 0.0);
    CHECK(cut.adjacency()(0, 1) == 2.0);

    const auto lowered = graph_from_json(graph_to_json(cut));
    CHECK(lowered.adjacency() == cut.adjacency());

    CHECK_THROWS_AS(graph_from_json(json::parse(R"({"kind":"ring"})")), std::invalid_argument);
}

TEST_CASE("scenarios round-trip to an identical model", "[io]") {
    for (const Scenario& sc :
         {builtin::ring_relative(), builtin::switching_digraph_threshold(),
          builtin::edge_drop(true), builtin::ring_euler_baseline()}) {
        const json j = scenario_to_json(sc);
        const Scenario back = scenario_from_json(j);
        CHECK(scenario_to_json(back) == j);  // fixed point after one lowering
        CHECK(back.name == sc.name);
        CHECK(back.alpha == sc.alpha);
        CHECK(back.h == sc.h);
        CHECK(back.schedule.segments().size() == sc.schedule.segments().size());
        for (std::size_t k = 0; k < sc.schedule.segments().size(); ++k) {
            CHECK(back.schedule.segments()[k].graph.adjacency() ==
                  sc.schedule.segments()[k].graph.adjacency());
        }
        CHECK(law_name(back.trigger) == law_name(sc.trigger));
    }
}

TEST_CASE("scenario files load from disk with defaults applied", "[io]") {
    const auto dir = fs::temp_directory_path() / "detcon_io_test";
    fs::create_directories(dir);
    const auto path = dir / "minimal.json";
    {
        std::ofstream out(path);
        out << R"({
          "name": "minimal",
          "horizon": 2.0,
          "alpha": 1.0, "beta": 4.0,
          "trigger": {"law": "directed", "eps": 0.1},
          "signals": [{"kind":"const","value":1.0},{"kind":"const","value":2.0},
                      {"kind":"const","value":3.0},{"kind":"const","value":4.0},
                      {"kind":"const","value":5.0}],
          "schedule": {"segments": [{"t": 0.0, "graph": {"kind":"ring","n":5}}]}
        })";
    }
    const Scenario sc = load_scenario(path);
    CHECK(sc.size() == 5);
    CHECK(sc.h == 1e-3);
    CHECK(sc.x0.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::get<DirectedThreshold>(sc.trigger).eps(3) == Approx(0.1));
    CHECK(sc.schedule.horizon() == 2.0);

    const auto saved = dir / "resaved.json";
    save_scenario(sc, saved);
    const Scenario again = load_scenario(saved);
    CHECK(scenario_to_json(again) == scenario_to_json(sc));

    CHECK_THROWS_AS(load_scenario(dir / "missing.json"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("shipped scenario files match the built-in definitions", "[io]") {
    const fs::path dir = fs::path(DETCON_SOURCE_DIR) / "scenarios";
    const std::vector<std::pair<std::string, Scenario>> expected = {
        {"ring_relative.json", builtin::ring_relative()},
        {"ring_euler_baseline.json", builtin::ring_euler_baseline()},
        {"directed_ring_threshold.json", builtin::directed_ring_threshold()},
        {"directed_ring_continuous.json", builtin::directed_ring_continuous(false)},
        {"switching_digraph.json", builtin::switching_digraph_threshold()},
        {"edge_drop_threshold.json", builtin::edge_drop(false)},
        {"edge_drop_relative.json", builtin::edge_drop(true)},
    };
    for (const auto& [file, ref] : expected) {
        const Scenario sc = load_scenario(dir / file);
        INFO(file);
        CHECK(sc.name == ref.name);
        CHECK(sc.alpha == ref.alpha);
        CHECK(sc.beta == ref.beta);
        CHECK(sc.h == ref.h);
        CHECK(sc.horizon == ref.horizon);
        CHECK((sc.integrator == ref.integrator));
        CHECK(scenario_to_json(sc) == scenario_to_json(ref));
    }
}

TEST_CASE("run artifacts serialize", "[io]") {
    Scenario sc = builtin::ring_relative();
    sc.horizon = 4.0;
    const RunRecord rec = run(sc);
    const json j = record_to_json(rec);
    CHECK(j.at("scenario") == "ring-relative");
    CHECK(j.at("stats").size() == 5);
    CHECK(j.at("events").size() == rec.events.size());
    CHECK(j.at("verdict").contains("passed"));
    CHECK(j.at("bounds").at("law") == "undirected");
    CHECK(j.at("events")[0].at("agent").get<int>() >= 1);  // 1-based labels outward

    const auto dir = fs::temp_directory_path() / "detcon_io_test2";
    fs::create_directories(dir);
    const auto csv = dir / "series.csv";
    write_series_csv(rec, csv, 10);
    std::ifstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 1 + rec.steps() / 10 + 1);  // header + decimated samples
    CHECK_THROWS_AS(write_series_csv(rec, csv, 0), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("comparison artifacts serialize", "[io]") {
    const auto rep = run_comparison({builtin::edge_drop(false, 6.0), builtin::edge_drop(true, 6.0)});
    const json j = comparison_to_json(rep);
    REQUIRE(j.at("runs").size() == 2);
    CHECK(j["runs"][0].at("total_samples").get<int>() > 0);

    const auto dir = fs::temp_directory_path() / "detcon_io_test3";
    fs::create_directories(dir);
    write_comparison_csv(rep, dir / "cmp.csv");
    std::ifstream in(dir / "cmp.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.find("total_samples") != std::string::npos);
    fs::remove_all(dir);
}
