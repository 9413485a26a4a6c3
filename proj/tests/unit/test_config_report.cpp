#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "capdyn/config.hpp"
#include "capdyn/report.hpp"
#include "capdyn/textio.hpp"
#include "doctest.h"

using namespace capdyn;

namespace {

// field-by-field equality; interval endpoints compared bitwise
void check_same(const config::RunConfig& a, const config::RunConfig& b) {
    CHECK(a.engine.iv.h.lo == b.engine.iv.h.lo);
    CHECK(a.engine.iv.h.hi == b.engine.iv.h.hi);
    CHECK(a.engine.iv.lambda_stiff.lo == b.engine.iv.lambda_stiff.lo);
    CHECK(a.engine.iv.lambda_stiff.hi == b.engine.iv.lambda_stiff.hi);
    CHECK(a.engine.x1_diam_threshold == b.engine.x1_diam_threshold);
    CHECK(a.engine.x2_diam_threshold == b.engine.x2_diam_threshold);
    CHECK(a.engine.snap_threshold == b.engine.snap_threshold);
    CHECK(a.engine.sink_epsilon == b.engine.sink_epsilon);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(a.engine.sink_points[i] == b.engine.sink_points[i]);
    CHECK(a.engine.max_steps == b.engine.max_steps);
    CHECK(a.engine.absorption_mode == b.engine.absorption_mode);
    CHECK(a.engine.snap_enabled == b.engine.snap_enabled);
    CHECK(a.engine.cloud_cap == b.engine.cloud_cap);
    CHECK(a.dynamics.h == b.dynamics.h);
    CHECK(a.dynamics.lambda_stiff == b.dynamics.lambda_stiff);
    CHECK(a.h_text == b.h_text);
    CHECK(a.lambda_text == b.lambda_text);
    CHECK(a.basin_grid.x1_min == b.basin_grid.x1_min);
    CHECK(a.basin_grid.x1_max == b.basin_grid.x1_max);
    CHECK(a.basin_grid.x2_min == b.basin_grid.x2_min);
    CHECK(a.basin_grid.x2_max == b.basin_grid.x2_max);
    CHECK(a.basin_grid.nx1 == b.basin_grid.nx1);
    CHECK(a.basin_grid.nx2 == b.basin_grid.nx2);
    CHECK(a.basin.capture_epsilon == b.basin.capture_epsilon);
    CHECK(a.basin.confirm_steps == b.basin.confirm_steps);
    CHECK(a.basin.escape_radius == b.basin.escape_radius);
    CHECK(a.basin.origin_radius == b.basin.origin_radius);
    CHECK(a.basin.max_iter == b.basin.max_iter);
    CHECK(a.scan_lambda_lo == b.scan_lambda_lo);
    CHECK(a.scan_lambda_hi == b.scan_lambda_hi);
    CHECK(a.scan_steps == b.scan_steps);
    CHECK(a.scan.transient == b.scan.transient);
    CHECK(a.scan.samples == b.scan.samples);
    CHECK(a.scan.tolerance == b.scan.tolerance);
    CHECK(a.scan.max_period == b.scan.max_period);
    CHECK(a.phase_start.x1 == b.phase_start.x1);
    CHECK(a.phase_start.x2 == b.phase_start.x2);
    CHECK(a.phase_steps == b.phase_steps);
    CHECK(a.cobweb_steps == b.cobweb_steps);
    CHECK(a.cobweb_from_critical == b.cobweb_from_critical);
    if (!a.cobweb_from_critical) CHECK(a.cobweb_x0 == b.cobweb_x0);
}

}  // namespace

TEST_CASE("empty config text yields the defaults") {
    config::RunConfig cfg = config::parse_config_text("", "empty");
    check_same(cfg, config::default_run_config());
    CHECK(cfg.engine.absorption_mode == engine::AbsorptionMode::paper_faithful);
    CHECK(cfg.h_text == "0.1");
    CHECK(cfg.lambda_text == "30");
    CHECK(cfg.scan_steps == 581);
    // the struct default is the strict mode; the run default opts into the
    // published table's check explicitly
    CHECK(engine::EngineConfig{}.absorption_mode ==
          engine::AbsorptionMode::strict_containment);
}

TEST_CASE("comments, blank lines and stray whitespace are accepted") {
    config::RunConfig cfg = config::parse_config_text(
        "  h =   0.25   # quarter step\n"
        "\n"
        "   # a full-line comment\n"
        "\tlambda=25\n",
        "cfg");
    CHECK(cfg.dynamics.h == 0.25);
    CHECK(cfg.h_text == "0.25");
    // 0.25 is a binary number, so the conservative enclosure is degenerate
    CHECK(cfg.engine.iv.h.lo == 0.25);
    CHECK(cfg.engine.iv.h.hi == 0.25);
    CHECK(cfg.dynamics.lambda_stiff == 25.0);
    CHECK(cfg.lambda_text == "25");
}

TEST_CASE("decimal step size parses to its conservative enclosure") {
    config::RunConfig cfg = config::parse_config_text("h = 0.1\nlambda = 30\n", "cfg");
    double tenth = std::strtod("0.1", nullptr);
    CHECK(cfg.engine.iv.h.lo == std::nextafter(tenth, 0.0));
    CHECK(cfg.engine.iv.h.hi == tenth);
    CHECK(cfg.engine.iv.lambda_stiff.lo == 30.0);
    CHECK(cfg.engine.iv.lambda_stiff.hi == 30.0);
    // the defaults carry the same enclosure without any parsing
    check_same(cfg, config::default_run_config());

    config::RunConfig wide = config::parse_config_text("lambda = 29.9\n", "cfg");
    double lam = std::strtod("29.9", nullptr);
    CHECK(wide.dynamics.lambda_stiff == lam);
    CHECK(wide.engine.iv.lambda_stiff.lo <= lam);
    CHECK(wide.engine.iv.lambda_stiff.hi >= lam);
    CHECK(wide.engine.iv.lambda_stiff.hi ==
          std::nextafter(wide.engine.iv.lambda_stiff.lo,
                         std::numeric_limits<double>::infinity()));
}

TEST_CASE("parse errors carry origin, line number and offender") {
    using config::parse_config_text;
    using config::parse_error;
    CHECK_THROWS_WITH_AS(parse_config_text("foo = 1\n", "cfg"),
                         "cfg:1: unknown key 'foo'", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("\nh = -1\n", "cfg"),
                         "cfg:2: h must be > 0 (got -1)", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("h = abc\n", "cfg"),
                         "cfg:1: h: not a number: 'abc'", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("h 0.1\n", "cfg"),
                         "cfg:1: malformed line (expected key = value)", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("= 5\n", "cfg"),
                         "cfg:1: malformed line (expected key = value)", parse_error);
    CHECK_THROWS_WITH_AS(
        parse_config_text("absorption_mode = softly\n", "cfg"),
        "cfg:1: absorption_mode must be paper_faithful or strict_containment",
        parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("snap_enabled = maybe\n", "cfg"),
                         "cfg:1: snap_enabled: expected true/false: 'maybe'",
                         parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("sink_point_2 = 9\n", "cfg"),
                         "cfg:1: sink_point_2 must lie strictly inside (0, 8.31177)",
                         parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("max_steps = 0\n", "cfg"),
                         "cfg:1: max_steps must be >= 1 (got 0)", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("scan_samples = 4\n", "cfg"),
                         "cfg:1: scan_samples must be >= 8 (got 4)", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("basin_x1_max = -1\n", "cfg"),
                         "cfg: basin ranges must have max > min", parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text("scan_lambda_hi = 5\n", "cfg"),
                         "cfg: scan_lambda_hi must exceed scan_lambda_lo", parse_error);
    CHECK_THROWS_WITH_AS(config::load_config("/nonexistent/x.cfg"),
                         "/nonexistent/x.cfg: cannot open config file", parse_error);
}

TEST_CASE("emit and parse round-trip every field") {
    config::RunConfig cfg = config::parse_config_text(
        "h = 0.25\n"
        "lambda = 29.9\n"
        "x1_diam_threshold = 0.125\n"
        "sink_epsilon = 0.5\n"
        "sink_point_3 = 4.25\n"
        "max_steps = 17\n"
        "absorption_mode = strict_containment\n"
        "snap_enabled = false\n"
        "cloud_cap = 5000\n"
        "basin_x1_min = -1\n"
        "basin_x1_max = 2\n"
        "basin_nx1 = 64\n"
        "basin_nx2 = 48\n"
        "basin_origin_radius = 1e-7\n"
        "scan_lambda_lo = 20\n"
        "scan_lambda_hi = 40\n"
        "scan_steps = 101\n"
        "scan_tolerance = 1e-5\n"
        "phase_x1 = 0.5\n"
        "phase_x2 = 0\n"
        "phase_steps = 12\n"
        "cobweb_x0 = 2.5\n"
        "cobweb_steps = 9\n",
        "cfg");
    CHECK(!cfg.cobweb_from_critical);
    std::string text = config::emit_config(cfg);
    CHECK(text.find("cobweb_x0 = 2.5\n") != std::string::npos);
    check_same(config::parse_config_text(text, "reparse"), cfg);

    // and the default emission round-trips onto the default config
    check_same(config::parse_config_text(config::emit_default_config(), "d"),
               config::default_run_config());
    CHECK(config::emit_default_config().find("cobweb_x0") != std::string::npos);
    CHECK(config::emit_default_config().find("cobweb_x0 =") == std::string::npos);
}

TEST_CASE("the result table renders the published layout byte for byte") {
    engine::ProofResult sink;
    sink.label = "Sink Point 1";
    sink.success = true;
    sink.history = {{1, 0, 1, 0}};

    engine::ProofResult traj;
    traj.label = "Box around (1,1)";
    traj.success = true;
    traj.history = {{1, 512, 0, 0}, {2, 1784, 395, 0}};

    std::string expected = R"TEX(\begin{table}[ht]
  \centering
  \begin{tabular*}{\textwidth}{@{\extracolsep{\fill}} l r r r r @{}}
    \toprule
    \textbf{Initial Set} & \textbf{Step} & \textbf{Active Boxes} & \textbf{Absorbed} & \textbf{Snapped} \\
    \midrule
    \multicolumn{5}{c}{\textbf{Run 1: Invariance of Sink Neighborhoods}} \\
    \midrule
    Sink Point 1 & 1 & 0 & 1 & 0 \\
    \midrule
    \multicolumn{5}{c}{\textit{Success: All sink neighborhoods fully invariant.}} \\
    \midrule
    \multicolumn{5}{c}{\textbf{Run 2: Trajectory of $(1,1)$}} \\
    \midrule
    Box around $(1,1)$ & 1 & 512 & 0 & 0 \\
     & 2 & 1784 & 395 & 0 \\
    \midrule
    \multicolumn{5}{c}{\textit{Success: Cloud fully absorbed.}} \\
    \bottomrule
  \end{tabular*}
  \vspace{0.5em}
  \caption{Dynamics of the interval cloud during the computer-assisted proof. The cloud is fully absorbed by the period-4 sink.}
  \label{tab:cap_output}
\end{table}
)TEX";
    CHECK(report::emit_latex_table({sink, traj}) == expected);
}

TEST_CASE("failed runs and empty histories render their diagnostics") {
    engine::ProofResult r;
    r.label = "Box around (1,1)";
    r.success = false;
    r.diagnostic = "cloud not absorbed within 3 steps";
    std::string tex = report::emit_latex_table({r});
    CHECK(tex.find("\\multicolumn{5}{c}{\\textbf{Run 2: Trajectory of $(1,1)$}} \\\\\n") !=
          std::string::npos);
    CHECK(tex.find("    Box around $(1,1)$ & \\multicolumn{4}{c}{cloud not absorbed "
                   "within 3 steps} \\\\\n") != std::string::npos);
    CHECK(tex.find("\\textit{Failure: cloud not fully absorbed.}") != std::string::npos);
    CHECK(tex.find("Run 1:") == std::string::npos);
}

TEST_CASE("proof history rows quote labels only when needed") {
    engine::ProofResult sink;
    sink.label = "Sink Point 1";
    sink.history = {{1, 0, 1, 0}};
    engine::ProofResult traj;
    traj.label = "Box around (1,1)";
    traj.history = {{1, 512, 0, 0}, {2, 1784, 395, 0}};

    CHECK(report::proof_history_csv({sink, traj}) ==
          "run_label,step,active,absorbed,snapped\n"
          "Sink Point 1,1,0,1,0\n"
          "\"Box around (1,1)\",1,512,0,0\n"
          "\"Box around (1,1)\",2,1784,395,0\n");
}

TEST_CASE("cloud dumps list one interval box per row") {
    engine::Cloud cloud = {{make_interval(0.0, 0.05), make_interval(4.6, 4.65)},
                           {make_interval(-0.01, 0.0), make_interval(7.0, 7.25)}};
    CHECK(report::cloud_dump_header() == "step,x1_lo,x1_hi,x2_lo,x2_hi\n");
    CHECK(report::cloud_dump_rows(3, cloud) ==
          "3,0,0.05,4.6,4.65\n"
          "3,-0.01,0,7,7.25\n");
}

TEST_CASE("basin rasters serialize to csv and pgm") {
    analysis::BasinGrid grid;
    grid.spec = {0.0, 1.0, 0.0, 3.0, 2, 3};
    using analysis::BasinClass;
    grid.cells = {BasinClass::sink,      BasinClass::origin,
                  BasinClass::escaped,   BasinClass::undecided,
                  BasinClass::sink,      BasinClass::escaped};

    CHECK(report::basin_csv(grid) ==
          "x1,x2,class\n"
          "0.25,0.5,sink\n"
          "0.75,0.5,origin\n"
          "0.25,1.5,escaped\n"
          "0.75,1.5,undecided\n"
          "0.25,2.5,sink\n"
          "0.75,2.5,escaped\n");

    // P5 pixels walk the grid from the top row (largest x2) down
    std::string pgm = report::basin_pgm(grid);
    std::string expected("P5\n2 3\n255\n");
    expected.push_back(static_cast<char>(255));  // (0,2) sink
    expected.push_back(static_cast<char>(64));   // (1,2) escaped
    expected.push_back(static_cast<char>(64));   // (0,1) escaped
    expected.push_back(static_cast<char>(0));    // (1,1) undecided
    expected.push_back(static_cast<char>(255));  // (0,0) sink
    expected.push_back(static_cast<char>(128));  // (1,0) origin
    REQUIRE(pgm.size() == expected.size());
    CHECK(pgm == expected);
}

TEST_CASE("figure data emitters are plain headed csv") {
    analysis::PhaseTrajectory t;
    t.points = {{1.0, 1.0}, {0.5, 0.25}};
    CHECK(report::phase_csv(t) ==
          "step,x1,x2\n"
          "0,1,1\n"
          "1,0.5,0.25\n");

    CHECK(report::cobweb_csv({{4.5, 4.5}, {4.5, 7.2}}) ==
          "x,y\n"
          "4.5,4.5\n"
          "4.5,7.2\n");

    analysis::CascadeScan scan;
    scan.lambda_values = {10.0, 10.5};
    scan.attractor_samples = {{0.0}, {1.5, 2.25}};
    CHECK(report::bifurcation_csv(scan) ==
          "lambda,orbit_value\n"
          "10,0\n"
          "10.5,1.5\n"
          "10.5,2.25\n");
}

TEST_CASE("stability region data: grid, boundary curve, unit modulus") {
    std::string csv = report::stability_csv();
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 81 * 101 + 2 * 512);
    CHECK(csv.rfind("type,re,im,absR\n", 0) == 0);
    // spot values where R is exactly 1: z = -2 and z = 0
    CHECK(csv.find("\ngrid,-2,0,1\n") != std::string::npos);
    CHECK(csv.find("\ngrid,0,0,1\n") != std::string::npos);

    std::istringstream in(csv);
    std::string line;
    std::size_t boundary_rows = 0, grid_rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("grid,", 0) == 0) ++grid_rows;
        if (line.rfind("boundary,", 0) != 0) continue;
        ++boundary_rows;
        double absR = std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr);
        CHECK(std::fabs(absR - 1.0) < 1e-9);
    }
    CHECK(grid_rows == 81 * 101);
    CHECK(boundary_rows == 2 * 512);
}

TEST_CASE("hashes, manifest and text helpers") {
    CHECK(report::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(report::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(report::fnv1a64("hello world") == 0x779a65e7023cd2e7ull);
    CHECK(report::fnv1a64("a") != report::fnv1a64("b"));

    std::vector<report::ManifestEntry> outs = {
        {"table.tex", "latex", report::fnv1a64("")}};
    CHECK(report::manifest_text("prove", "h = 0.1\nlambda = 30", outs, 1.5) ==
          "command: prove\n"
          "wall_time_seconds: 1.500\n"
          "config:\n"
          "  h = 0.1\n"
          "  lambda = 30\n"
          "outputs:\n"
          "  table.tex latex fnv1a64:cbf29ce484222325\n");

    for (double v : {0.1, 1.0 / 3.0, 1e300, 5e-324, 123456789.123456789, 1e-8,
                     30.337643518908, 0.0, 1.0})
        CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
    CHECK(fmt_double(1.0) == "1");
    CHECK(fmt_double(0.05) == "0.05");

    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("a\"b") == "\"a\"\"b\"");
    CHECK(csv_quote("a\nb") == "\"a\nb\"");
}
