// Command-line front end: run a scenario file, compare several, print the
// analytic guarantee report, or rebuild the bundled reference studies.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "detcon/builtin.hpp"
#include "detcon/metrics.hpp"
#include "detcon/scenario_io.hpp"
#include "detcon/svg.hpp"

namespace fs = std::filesystem;
using namespace detcon;

namespace {

struct CommonOpts {
    std::string out_dir;
    double h_override = 0.0;
    double horizon_override = 0.0;
    std::vector<std::string> overrides;
    bool uncertified_ok = false;
    int decimate = 10;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->set_help_flag("--help", "print this help message");  // frees --h
    const char* env_out = std::getenv("ETC_OUT_DIR");
    opts.out_dir = env_out != nullptr ? env_out : ".";
    cmd->add_option("-o,--out", opts.out_dir, "output directory");
    cmd->add_option("--h", opts.h_override, "integration step override");
    cmd->add_option("--horizon", opts.horizon_override, "horizon override");
    cmd->add_option("--override", opts.overrides,
                    "key=value override (alpha, beta, eps, h, horizon)");
    cmd->add_flag("--uncertified-ok", opts.uncertified_ok,
                  "run even when the scenario demands a certificate the schedule lacks");
    cmd->add_option("--decimate", opts.decimate, "series CSV decimation (default 10)");
}

void set_eps(Scenario& sc, double value) {
    const int n = sc.size();
    if (auto* d = std::get_if<DirectedThreshold>(&sc.trigger)) {
        d->eps = Vector::Constant(n, value);
    } else if (auto* u = std::get_if<UndirectedRelative>(&sc.trigger)) {
        u->eps = Vector::Constant(n, value);
    } else {
        throw std::invalid_argument("eps override needs a threshold trigger law");
    }
}

void apply_overrides(Scenario& sc, const CommonOpts& opts) {
    if (opts.h_override > 0.0) sc.h = opts.h_override;
    if (opts.horizon_override > 0.0) sc.horizon = opts.horizon_override;
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("override must look like key=value: " + kv);
        }
        const std::string key = kv.substr(0, eq);
        const double value = std::stod(kv.substr(eq + 1));
        if (key == "alpha") {
            sc.alpha = value;
        } else if (key == "beta") {
            sc.beta = value;
        } else if (key == "eps") {
            set_eps(sc, value);
        } else if (key == "h") {
            sc.h = value;
        } else if (key == "horizon") {
            sc.horizon = value;
        } else {
            throw std::invalid_argument("unknown override key: " + key);
        }
    }
    if (opts.uncertified_ok) sc.require_certified = false;
    if (sc.schedule.horizon() < sc.horizon) {
        // extend a constant schedule transparently; switching schedules
        // must be edited in the file
        if (sc.schedule.segments().size() == 1) {
            sc.schedule = GraphSchedule::constant(sc.schedule.segments().front().graph,
                                                  sc.horizon + sc.h);
        }
    }
}

void print_warnings(const RunRecord& rec) {
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
}

void print_verdict(const RunRecord& rec) {
    const auto& v = rec.verdict;
    std::cout << rec.scenario_name << ": inter_event=" << outcome_name(v.inter_event)
              << " tail_error=" << outcome_name(v.tail_error)
              << " conservation=" << outcome_name(v.conservation)
              << " zeno=" << outcome_name(v.zeno) << " => "
              << (v.passed() ? "PASS" : "FAIL") << '\n';
    if (!v.details.empty()) std::cout << "  " << v.details << '\n';
}

void write_run_artifacts(const RunRecord& rec, const fs::path& dir, int decimate) {
    fs::create_directories(dir);
    write_series_csv(rec, dir / (rec.scenario_name + ".series.csv"), decimate);
    std::ofstream rj(dir / (rec.scenario_name + ".run.json"));
    if (!rj) throw std::runtime_error("cannot write run json");
    rj << record_to_json(rec).dump(2) << '\n';
    std::optional<double> band;
    if (rec.bounds.has_ultimate_bound()) band = rec.bounds.ultimate_bound(0);
    svg::plot_error_curves({&rec}, (dir / (rec.scenario_name + ".error.svg")).string(), band);
    svg::plot_event_raster(rec, (dir / (rec.scenario_name + ".events.svg")).string());
}

int exit_code_for(const RunRecord& rec) {
    if (!rec.bounds.certified) return 0;  // nothing bindable to fail against
    return rec.verdict.passed() ? 0 : 1;
}

void write_comparison_artifacts(const ComparisonReport& rep, const fs::path& dir, int decimate,
                                std::optional<double> band) {
    fs::create_directories(dir);
    std::ofstream cj(dir / "comparison.json");
    if (!cj) throw std::runtime_error("cannot write comparison json");
    cj << comparison_to_json(rep).dump(2) << '\n';
    write_comparison_csv(rep, dir / "comparison.csv");
    std::vector<const RunRecord*> views;
    for (const auto& r : rep.records) views.push_back(&r);
    svg::plot_error_curves(views, (dir / "comparison.error.svg").string(), band);
    std::vector<RunSummary> summaries;
    for (const auto& r : rep.records) {
        svg::plot_event_raster(r, (dir / (r.scenario_name + ".events.svg")).string());
        write_run_artifacts(r, dir, decimate);
        summaries.push_back(summarize(r));
    }
    write_summary_csv(std::cout, summaries);
    if (!rep.note.empty()) std::cout << "note: " << rep.note << '\n';
}

int run_command(const std::string& path, const CommonOpts& opts) {
    Scenario sc = load_scenario(path);
    apply_overrides(sc, opts);
    const RunRecord rec = run(sc);
    print_warnings(rec);
    write_run_artifacts(rec, opts.out_dir, opts.decimate);
    write_summary_csv(std::cout, {summarize(rec)});
    print_verdict(rec);
    return exit_code_for(rec);
}

int compare_command(const std::vector<std::string>& paths, const CommonOpts& opts) {
    std::vector<Scenario> scenarios;
    for (const auto& p : paths) {
        Scenario sc = load_scenario(p);
        apply_overrides(sc, opts);
        scenarios.push_back(std::move(sc));
    }
    const ComparisonReport rep = run_comparison(scenarios);
    int code = 0;
    for (const auto& rec : rep.records) {
        print_warnings(rec);
        code = std::max(code, exit_code_for(rec));
    }
    write_comparison_artifacts(rep, opts.out_dir, opts.decimate, std::nullopt);
    for (const auto& rec : rep.records) print_verdict(rec);
    return code;
}

int bounds_command(const std::string& path, const CommonOpts& opts) {
    Scenario sc = load_scenario(path);
    apply_overrides(sc, opts);
    std::cout << bounds_to_json(guarantee_report(sc)).dump(2) << '\n';
    return 0;
}

int reproduce_command(const std::string& figure, const CommonOpts& opts) {
    std::vector<Scenario> set;
    std::optional<double> band;
    std::string note;
    if (figure == "fig1") {
        set = {builtin::switching_digraph_threshold(), builtin::switching_digraph_continuous()};
    } else if (figure == "fig2") {
        set = {builtin::ring_relative(), builtin::ring_euler_baseline()};
        band = 0.05;
        note = "proportional-integral averaging baseline not included "
               "(external algorithm, out of scope)";
    } else if (figure == "fig3") {
        set = {builtin::edge_drop(false), builtin::edge_drop(true)};
    } else {
        throw std::invalid_argument("unknown figure id (expected fig1, fig2 or fig3)");
    }
    for (auto& sc : set) apply_overrides(sc, opts);
    ComparisonReport rep = run_comparison(set);
    rep.note = note;
    int code = 0;
    for (const auto& rec : rep.records) {
        print_warnings(rec);
        code = std::max(code, exit_code_for(rec));
    }
    write_comparison_artifacts(rep, opts.out_dir, opts.decimate, band);
    for (const auto& rec : rep.records) print_verdict(rec);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "dynamic average consensus with event-triggered communication: "
        "simulation, guarantees and verification"};
    app.require_subcommand(1);

    std::string run_path;
    CommonOpts run_opts;
    auto* cmd_run = app.add_subcommand("run", "simulate one scenario file");
    cmd_run->add_option("scenario", run_path, "scenario JSON file")->required();
    add_common(cmd_run, run_opts);

    std::vector<std::string> compare_paths;
    CommonOpts compare_opts;
    auto* cmd_compare = app.add_subcommand("compare", "run several scenarios side by side");
    cmd_compare->add_option("scenarios", compare_paths, "scenario JSON files")
        ->required()
        ->expected(-2);
    add_common(cmd_compare, compare_opts);

    std::string bounds_path;
    CommonOpts bounds_opts;
    auto* cmd_bounds =
        app.add_subcommand("bounds", "print the guarantee report for a scenario as JSON");
    cmd_bounds->add_option("scenario", bounds_path, "scenario JSON file")->required();
    add_common(cmd_bounds, bounds_opts);

    std::string figure;
    CommonOpts repro_opts;
    auto* cmd_repro =
        app.add_subcommand("reproduce", "rebuild a bundled reference study (fig1|fig2|fig3)");
    cmd_repro->add_option("figure", figure, "fig1, fig2 or fig3")->required();
    add_common(cmd_repro, repro_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_run->parsed()) return run_command(run_path, run_opts);
        if (cmd_compare->parsed()) return compare_command(compare_paths, compare_opts);
        if (cmd_bounds->parsed()) return bounds_command(bounds_path, bounds_opts);
        if (cmd_repro->parsed()) return reproduce_command(figure, repro_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
