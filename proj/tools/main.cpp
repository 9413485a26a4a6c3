// capdyn: absorption proofs and figure data for the stiff planar system.
// Exit codes: 0 success, 2 usage error, 3 failed proof, 4 runtime error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capdyn/config.hpp"
#include "capdyn/report.hpp"
#include "capdyn/textio.hpp"

namespace {

using namespace capdyn;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string mode;
    bool no_snap = false;
    long seed = 1;  // recorded in the manifest; sampled checks live in the tests
    int threads = 1;
};

config::RunConfig effective_config(const GlobalOpts& g) {
    config::RunConfig cfg = g.config_path.empty()
                                ? config::default_run_config()
                                : config::load_config(g.config_path);
    if (g.mode == "paper_faithful")
        cfg.engine.absorption_mode = engine::AbsorptionMode::paper_faithful;
    else if (g.mode == "strict_containment")
        cfg.engine.absorption_mode = engine::AbsorptionMode::strict_containment;
    if (g.no_snap) cfg.engine.snap_enabled = false;
    cfg.engine.threads = g.threads;
    return cfg;
}

// writes content under the output dir and records a manifest entry
class OutputSet {
  public:
    explicit OutputSet(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void add(const std::string& name, const std::string& format,
             const std::string& content) {
        report::write_file(dir_ + "/" + name, content);
        entries_.push_back({name, format, report::fnv1a64(content)});
    }

    void finish(const std::string& command, const config::RunConfig& cfg,
                double wall_seconds) {
        report::write_file(dir_ + "/manifest.txt",
                           report::manifest_text(command, config::emit_config(cfg),
                                                 entries_, wall_seconds));
    }

  private:
    std::string dir_;
    std::vector<report::ManifestEntry> entries_;
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigorous absorption proofs and exploration data for the stiff "
                 "planar Heun map"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand too

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--mode", g.mode, "absorption mode")
        ->check(CLI::IsMember({"paper_faithful", "strict_containment"}));
    app.add_flag("--no-snap", g.no_snap, "disable the snap-to-axis projection");
    app.add_option("--seed", g.seed, "seed recorded for sampled property checks");
    app.add_option("--threads", g.threads, "worker threads")
        ->check(CLI::PositiveNumber);

    auto* prove = app.add_subcommand(
        "prove", "run the absorption proofs and write table + history");
    bool dump_cloud = false;
    double initial_width = -1.0;
    std::string runs = "all";
    prove->add_flag("--dump-cloud", dump_cloud,
                    "write per-step cloud boxes to cloud_dump.csv");
    prove->add_option("--initial-width", initial_width,
                      "side length of a custom square box centered at (1,1) "
                      "for the trajectory run")
        ->check(CLI::PositiveNumber);
    prove->add_option("--runs", runs, "which proofs to run")
        ->check(CLI::IsMember({"all", "sink", "trajectory"}))
        ->capture_default_str();

    auto* basin = app.add_subcommand("basin", "rasterize the basin of attraction");
    int resolution = 0;
    basin->add_option("--resolution", resolution, "cells per axis (overrides config)");

    auto* phase = app.add_subcommand("phase", "point trajectory of the plane map");
    bool have_px1 = false, have_px2 = false;
    double px1 = 0.0, px2 = 0.0;
    int psteps = 0;
    phase->add_option("--x1", px1, "start x1")->each([&](const std::string&) { have_px1 = true; });
    phase->add_option("--x2", px2, "start x2")->each([&](const std::string&) { have_px2 = true; });
    phase->add_option("--steps", psteps, "iterations");

    auto* cobweb = app.add_subcommand("cobweb", "cobweb polyline of the axis map g");
    bool have_cx0 = false;
    double cx0 = 0.0;
    int csteps = 0;
    cobweb->add_option("--x0", cx0, "start value (default: critical point)")
        ->each([&](const std::string&) { have_cx0 = true; });
    cobweb->add_option("--steps", csteps, "iterations");

    auto* bifurcation =
        app.add_subcommand("bifurcation", "stiffness scan for the doubling cascade");
    double blo = 0.0, bhi = 0.0;
    int bsteps = 0;
    bool have_blo = false, have_bhi = false;
    bifurcation->add_option("--lo", blo, "lambda range start")
        ->each([&](const std::string&) { have_blo = true; });
    bifurcation->add_option("--hi", bhi, "lambda range end")
        ->each([&](const std::string&) { have_bhi = true; });
    bifurcation->add_option("--steps", bsteps, "grid size");

    app.add_subcommand("stability", "tabulate R(z) and the |R(z)| = 1 boundary");
    app.add_subcommand("sink", "print the located sink orbit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    std::string command = join_args(argc, argv);
    try {
        config::RunConfig cfg = effective_config(g);

        if (prove->parsed()) {
            OutputSet out(g.out_dir);
            std::vector<engine::ProofResult> results;
            std::string dump = report::cloud_dump_header();
            engine::StepObserver observe;
            if (dump_cloud)
                observe = [&dump](const engine::StepStats& s, const engine::Cloud& c) {
                    dump += report::cloud_dump_rows(s.step, c);
                };
            if (runs == "all" || runs == "sink")
                for (auto& r : engine::run_sink_invariance(cfg.engine, observe))
                    results.push_back(std::move(r));
            if (runs == "all" || runs == "trajectory") {
                if (initial_width > 0.0) {
                    double hw = initial_width / 2.0;
                    Box b{make_interval(1.0 - hw, 1.0 + hw),
                          make_interval(1.0 - hw, 1.0 + hw)};
                    results.push_back(engine::prove_absorption(
                        b, cfg.engine, "Box around (1,1)", observe));
                } else {
                    results.push_back(engine::run_trajectory_proof(cfg.engine, observe));
                }
            }
            std::string table = report::emit_latex_table(results);
            out.add("cap_table_static.tex", "latex", table);
            out.add("proof_history.csv", "csv", report::proof_history_csv(results));
            if (dump_cloud) out.add("cloud_dump.csv", "csv", dump);
            out.finish(command, cfg, seconds_since(t0));
            std::cout << table;
            bool ok = true;
            for (const auto& r : results) {
                ok = ok && r.success;
                if (!r.diagnostic.empty())
                    std::cerr << r.label << ": " << r.diagnostic << "\n";
            }
            return ok ? 0 : 3;
        }

        if (basin->parsed()) {
            if (resolution > 1) {
                cfg.basin_grid.nx1 = resolution;
                cfg.basin_grid.nx2 = resolution;
            }
            OutputSet out(g.out_dir);
            analysis::SinkOrbit orbit = analysis::find_sink_orbit(cfg.dynamics);
            analysis::BasinGrid grid = analysis::basin_raster(
                cfg.basin_grid, cfg.dynamics, orbit, cfg.basin, g.threads);
            out.add("basin.csv", "csv", report::basin_csv(grid));
            out.add("basin.pgm", "pgm", report::basin_pgm(grid));
            out.finish(command, cfg, seconds_since(t0));
            return 0;
        }

        if (phase->parsed()) {
            if (have_px1) cfg.phase_start.x1 = px1;
            if (have_px2) cfg.phase_start.x2 = px2;
            if (psteps > 0) cfg.phase_steps = psteps;
            OutputSet out(g.out_dir);
            analysis::PhaseTrajectory t =
                analysis::phase_trajectory(cfg.phase_start, cfg.phase_steps, cfg.dynamics);
            out.add("phase.csv", "csv", report::phase_csv(t));
            out.finish(command, cfg, seconds_since(t0));
            if (t.escaped) std::cerr << "trajectory overflowed; orbit truncated\n";
            return 0;
        }

        if (cobweb->parsed()) {
            if (have_cx0) {
                cfg.cobweb_x0 = cx0;
                cfg.cobweb_from_critical = false;
            }
            if (csteps > 0) cfg.cobweb_steps = csteps;
            double x0 = cfg.cobweb_from_critical
                            ? analysis::critical_point_of_g(cfg.dynamics)
                            : cfg.cobweb_x0;
            OutputSet out(g.out_dir);
            out.add("cobweb.csv", "csv",
                    report::cobweb_csv(
                        analysis::cobweb_data(x0, cfg.cobweb_steps, cfg.dynamics)));
            out.finish(command, cfg, seconds_since(t0));
            return 0;
        }

        if (bifurcation->parsed()) {
            if (have_blo) cfg.scan_lambda_lo = blo;
            if (have_bhi) cfg.scan_lambda_hi = bhi;
            if (bsteps > 1) cfg.scan_steps = bsteps;
            OutputSet out(g.out_dir);
            analysis::CascadeScan scan = analysis::bifurcation_scan(
                cfg.scan_lambda_lo, cfg.scan_lambda_hi, cfg.scan_steps, cfg.dynamics,
                cfg.scan, g.threads);
            out.add("bifurcation.csv", "csv", report::bifurcation_csv(scan));
            out.finish(command, cfg, seconds_since(t0));
            std::cout << "doubling_lambdas:";
            for (double l : scan.doubling_lambdas) std::cout << " " << fmt_double(l);
            std::cout << "\ndelta_estimates:";
            for (double d : scan.delta_estimates) std::cout << " " << fmt_double(d);
            std::cout << "\n";
            return 0;
        }

        if (app.get_subcommand("stability")->parsed()) {
            OutputSet out(g.out_dir);
            out.add("stability.csv", "csv", report::stability_csv());
            out.finish(command, cfg, seconds_since(t0));
            return 0;
        }

        if (app.get_subcommand("sink")->parsed()) {
            analysis::SinkOrbit orbit = analysis::find_sink_orbit(cfg.dynamics);
            for (double p : orbit.points) std::cout << fmt_double(p) << "\n";
            std::cout << "period: " << orbit.period << "\n";
            std::cout << "residual: " << fmt_double(orbit.residual) << "\n";
            std::cout << "multiplier: " << fmt_double(orbit.multiplier) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
