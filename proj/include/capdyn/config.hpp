#pragma once
// Run configuration: `key = value` text files with # comments. Absent keys
// fall back to the built-in defaults; unknown keys and invalid values are
// reported with their line number. Decimal values consumed by the rigorous
// engine (h, lambda) are parsed conservatively into Intervals, so the
// original strings are kept for byte-stable re-emission.

#include <stdexcept>
#include <string>

#include "capdyn/analysis.hpp"
#include "capdyn/dynamics.hpp"
#include "capdyn/engine.hpp"

namespace capdyn::config {

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    engine::EngineConfig engine;
    dynamics::VectorFieldParams dynamics;
    std::string h_text = "0.1";     // decimal source of engine.iv.h
    std::string lambda_text = "30";  // decimal source of engine.iv.lambda_stiff

    analysis::BasinGridSpec basin_grid;
    analysis::BasinParams basin;
    analysis::ScanParams scan;
    double scan_lambda_lo = 10.0;
    double scan_lambda_hi = 300.0;
    int scan_steps = 581;  // 0.5-wide lambda grid over [10, 300]

    dynamics::Point2 phase_start{1.0, 1.0};
    int phase_steps = 100;
    int cobweb_steps = 40;
    bool cobweb_from_critical = true;  // x0 defaults to the critical point
    double cobweb_x0 = 0.0;
};

// paper constants everywhere; absorption runs default to the mode the
// published table was produced with
RunConfig default_run_config();

RunConfig load_config(const std::string& path);

// parse from a string (origin names the source in error messages)
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// serialize a config as a loadable file; load(emit(cfg)) == cfg
std::string emit_config(const RunConfig& cfg);

// full default config as a loadable file; load(emit) == defaults
std::string emit_default_config();

}  // namespace capdyn::config
