#include "capdyn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "capdyn/textio.hpp"

namespace capdyn::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw parse_error(os.str());
}

double to_double(const std::string& origin, int line, const std::string& key,
                 const std::string& v) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        fail(origin, line, key + ": not a number: '" + v + "'");
    return d;
}

long to_long(const std::string& origin, int line, const std::string& key,
             const std::string& v) {
    char* end = nullptr;
    long n = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        fail(origin, line, key + ": not an integer: '" + v + "'");
    return n;
}

bool to_bool(const std::string& origin, int line, const std::string& key,
             const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(origin, line, key + ": expected true/false: '" + v + "'");
}

}  // namespace

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.engine = engine::default_engine_config();
    // the published table was produced with the listing's absorption check;
    // strict containment stays available via config/flag
    cfg.engine.absorption_mode = engine::AbsorptionMode::paper_faithful;
    return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg = default_run_config();
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(origin, lineno, "malformed line (expected key = value)");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            fail(origin, lineno, "malformed line (expected key = value)");

        auto num = [&] { return to_double(origin, lineno, key, val); };
        auto integer = [&] { return to_long(origin, lineno, key, val); };
        auto positive = [&](double d) {
            if (!(d > 0.0)) fail(origin, lineno, key + " must be > 0 (got " + val + ")");
            return d;
        };
        auto at_least = [&](long n, long min) {
            if (n < min)
                fail(origin, lineno,
                     key + " must be >= " + std::to_string(min) + " (got " + val + ")");
            return n;
        };

        if (key == "h" || key == "lambda") {
            double d = positive(num());
            Interval enc;
            try {
                enc = parse_decimal_interval(val);
            } catch (const interval_error& e) {
                fail(origin, lineno, key + ": " + e.what());
            }
            if (key == "h") {
                cfg.dynamics.h = d;
                cfg.engine.iv.h = enc;
                cfg.h_text = val;
            } else {
                cfg.dynamics.lambda_stiff = d;
                cfg.engine.iv.lambda_stiff = enc;
                cfg.lambda_text = val;
            }
        } else if (key == "x1_diam_threshold") {
            cfg.engine.x1_diam_threshold = positive(num());
        } else if (key == "x2_diam_threshold") {
            cfg.engine.x2_diam_threshold = positive(num());
        } else if (key == "snap_threshold") {
            cfg.engine.snap_threshold = positive(num());
        } else if (key == "sink_epsilon") {
            cfg.engine.sink_epsilon = positive(num());
        } else if (key == "sink_point_1" || key == "sink_point_2" ||
                   key == "sink_point_3" || key == "sink_point_4") {
            double d = num();
            if (!(d > 0.0 && d < 8.31177))
                fail(origin, lineno, key + " must lie strictly inside (0, 8.31177)");
            cfg.engine.sink_points[static_cast<std::size_t>(key.back() - '1')] = d;
        } else if (key == "max_steps") {
            cfg.engine.max_steps = static_cast<int>(at_least(integer(), 1));
        } else if (key == "absorption_mode") {
            if (val == "paper_faithful")
                cfg.engine.absorption_mode = engine::AbsorptionMode::paper_faithful;
            else if (val == "strict_containment")
                cfg.engine.absorption_mode = engine::AbsorptionMode::strict_containment;
            else
                fail(origin, lineno,
                     "absorption_mode must be paper_faithful or strict_containment");
        } else if (key == "snap_enabled") {
            cfg.engine.snap_enabled = to_bool(origin, lineno, key, val);
        } else if (key == "cloud_cap") {
            cfg.engine.cloud_cap = static_cast<std::size_t>(at_least(integer(), 1));
        } else if (key == "basin_x1_min") {
            cfg.basin_grid.x1_min = num();
        } else if (key == "basin_x1_max") {
            cfg.basin_grid.x1_max = num();
        } else if (key == "basin_x2_min") {
            cfg.basin_grid.x2_min = num();
        } else if (key == "basin_x2_max") {
            cfg.basin_grid.x2_max = num();
        } else if (key == "basin_nx1") {
            cfg.basin_grid.nx1 = static_cast<int>(at_least(integer(), 2));
        } else if (key == "basin_nx2") {
            cfg.basin_grid.nx2 = static_cast<int>(at_least(integer(), 2));
        } else if (key == "basin_capture_epsilon") {
            cfg.basin.capture_epsilon = positive(num());
        } else if (key == "basin_confirm_steps") {
            cfg.basin.confirm_steps = static_cast<int>(at_least(integer(), 1));
        } else if (key == "basin_escape_radius") {
            cfg.basin.escape_radius = positive(num());
        } else if (key == "basin_origin_radius") {
            cfg.basin.origin_radius = positive(num());
        } else if (key == "basin_max_iter") {
            cfg.basin.max_iter = static_cast<int>(at_least(integer(), 1));
        } else if (key == "scan_lambda_lo") {
            cfg.scan_lambda_lo = num();
        } else if (key == "scan_lambda_hi") {
            cfg.scan_lambda_hi = num();
        } else if (key == "scan_steps") {
            cfg.scan_steps = static_cast<int>(at_least(integer(), 2));
        } else if (key == "scan_transient") {
            cfg.scan.transient = static_cast<int>(at_least(integer(), 1));
        } else if (key == "scan_samples") {
            cfg.scan.samples = static_cast<int>(at_least(integer(), 8));
        } else if (key == "scan_tolerance") {
            cfg.scan.tolerance = positive(num());
        } else if (key == "scan_max_period") {
            cfg.scan.max_period = static_cast<int>(at_least(integer(), 1));
        } else if (key == "phase_x1") {
            cfg.phase_start.x1 = num();
        } else if (key == "phase_x2") {
            cfg.phase_start.x2 = num();
        } else if (key == "phase_steps") {
            cfg.phase_steps = static_cast<int>(at_least(integer(), 1));
        } else if (key == "cobweb_x0") {
            cfg.cobweb_x0 = num();
            cfg.cobweb_from_critical = false;
        } else if (key == "cobweb_steps") {
            cfg.cobweb_steps = static_cast<int>(at_least(integer(), 1));
        } else {
            fail(origin, lineno, "unknown key '" + key + "'");
        }
    }

    if (!(cfg.basin_grid.x1_max > cfg.basin_grid.x1_min) ||
        !(cfg.basin_grid.x2_max > cfg.basin_grid.x2_min))
        throw parse_error(origin + ": basin ranges must have max > min");
    if (!(cfg.scan_lambda_hi > cfg.scan_lambda_lo))
        throw parse_error(origin + ": scan_lambda_hi must exceed scan_lambda_lo");
    engine::validate_config(cfg.engine);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string emit_config(const RunConfig& d) {
    std::ostringstream os;
    os << "# run configuration\n";
    os << "# step size and stiffness, parsed conservatively for the rigorous map\n";
    os << "h = " << d.h_text << "\n";
    os << "lambda = " << d.lambda_text << "\n";
    os << "\n# absorption engine\n";
    os << "x1_diam_threshold = " << fmt_double(d.engine.x1_diam_threshold) << "\n";
    os << "x2_diam_threshold = " << fmt_double(d.engine.x2_diam_threshold) << "\n";
    os << "snap_threshold = " << fmt_double(d.engine.snap_threshold) << "\n";
    os << "sink_epsilon = " << fmt_double(d.engine.sink_epsilon) << "\n";
    for (int i = 0; i < 4; ++i)
        os << "sink_point_" << i + 1 << " = "
           << fmt_double(d.engine.sink_points[static_cast<std::size_t>(i)]) << "\n";
    os << "max_steps = " << d.engine.max_steps << "\n";
    os << "absorption_mode = "
       << (d.engine.absorption_mode == engine::AbsorptionMode::paper_faithful
               ? "paper_faithful"
               : "strict_containment")
       << "\n";
    os << "snap_enabled = " << (d.engine.snap_enabled ? "true" : "false") << "\n";
    os << "cloud_cap = " << d.engine.cloud_cap << "\n";
    os << "\n# basin raster\n";
    os << "basin_x1_min = " << fmt_double(d.basin_grid.x1_min) << "\n";
    os << "basin_x1_max = " << fmt_double(d.basin_grid.x1_max) << "\n";
    os << "basin_x2_min = " << fmt_double(d.basin_grid.x2_min) << "\n";
    os << "basin_x2_max = " << fmt_double(d.basin_grid.x2_max) << "\n";
    os << "basin_nx1 = " << d.basin_grid.nx1 << "\n";
    os << "basin_nx2 = " << d.basin_grid.nx2 << "\n";
    os << "basin_capture_epsilon = " << fmt_double(d.basin.capture_epsilon) << "\n";
    os << "basin_confirm_steps = " << d.basin.confirm_steps << "\n";
    os << "basin_escape_radius = " << fmt_double(d.basin.escape_radius) << "\n";
    os << "basin_origin_radius = " << fmt_double(d.basin.origin_radius) << "\n";
    os << "basin_max_iter = " << d.basin.max_iter << "\n";
    os << "\n# stiffness scan\n";
    os << "scan_lambda_lo = " << fmt_double(d.scan_lambda_lo) << "\n";
    os << "scan_lambda_hi = " << fmt_double(d.scan_lambda_hi) << "\n";
    os << "scan_steps = " << d.scan_steps << "\n";
    os << "scan_transient = " << d.scan.transient << "\n";
    os << "scan_samples = " << d.scan.samples << "\n";
    os << "scan_tolerance = " << fmt_double(d.scan.tolerance) << "\n";
    os << "scan_max_period = " << d.scan.max_period << "\n";
    os << "\n# figure trajectories\n";
    os << "phase_x1 = " << fmt_double(d.phase_start.x1) << "\n";
    os << "phase_x2 = " << fmt_double(d.phase_start.x2) << "\n";
    os << "phase_steps = " << d.phase_steps << "\n";
    if (d.cobweb_from_critical)
        os << "# cobweb_x0 defaults to the critical point of g when absent\n";
    else
        os << "cobweb_x0 = " << fmt_double(d.cobweb_x0) << "\n";
    os << "cobweb_steps = " << d.cobweb_steps << "\n";
    return os.str();
}

std::string emit_default_config() { return emit_config(default_run_config()); }

}  // namespace capdyn::config
