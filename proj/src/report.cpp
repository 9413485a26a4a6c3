#include "capdyn/report.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "capdyn/textio.hpp"

namespace capdyn::report {

namespace {

bool is_sink_run(const engine::ProofResult& r) {
    return r.label.rfind("Sink Point", 0) == 0;
}

// typeset coordinate tuples like (1,1) in math mode
std::string latex_label(const std::string& label) {
    std::string out;
    std::size_t i = 0;
    while (i < label.size()) {
        if (label[i] == '(') {
            std::size_t close = label.find(')', i);
            if (close != std::string::npos) {
                bool tuple = false, ok = true;
                for (std::size_t k = i + 1; k < close; ++k) {
                    char c = label[k];
                    if (c == ',') tuple = true;
                    else if (!std::isdigit(static_cast<unsigned char>(c)) &&
                             c != '.' && c != '-')
                        ok = false;
                }
                if (tuple && ok) {
                    out += "$" + label.substr(i, close - i + 1) + "$";
                    i = close + 1;
                    continue;
                }
            }
        }
        out += label[i++];
    }
    return out;
}

void emit_rows(std::ostringstream& os, const engine::ProofResult& r) {
    for (std::size_t k = 0; k < r.history.size(); ++k) {
        const engine::StepStats& s = r.history[k];
        os << "    " << (k == 0 ? latex_label(r.label) : "") << " & " << s.step
           << " & " << s.active << " & " << s.absorbed << " & " << s.snapped
           << " \\\\\n";
    }
    if (r.history.empty())
        os << "    " << latex_label(r.label) << " & \\multicolumn{4}{c}{"
           << (r.diagnostic.empty() ? "no steps recorded" : r.diagnostic)
           << "} \\\\\n";
}

}  // namespace

std::string emit_latex_table(const std::vector<engine::ProofResult>& results) {
    std::vector<const engine::ProofResult*> sink, traj;
    for (const auto& r : results) (is_sink_run(r) ? sink : traj).push_back(&r);

    std::ostringstream os;
    os << "\\begin{table}[ht]\n";
    os << "  \\centering\n";
    os << "  \\begin{tabular*}{\\textwidth}{@{\\extracolsep{\\fill}} l r r r r @{}}\n";
    os << "    \\toprule\n";
    os << "    \\textbf{Initial Set} & \\textbf{Step} & \\textbf{Active Boxes} & "
          "\\textbf{Absorbed} & \\textbf{Snapped} \\\\\n";
    os << "    \\midrule\n";
    if (!sink.empty()) {
        os << "    \\multicolumn{5}{c}{\\textbf{Run 1: Invariance of Sink "
              "Neighborhoods}} \\\\\n";
        os << "    \\midrule\n";
        bool all = true;
        for (const auto* r : sink) {
            emit_rows(os, *r);
            all = all && r->success;
        }
        os << "    \\midrule\n";
        os << "    \\multicolumn{5}{c}{\\textit{"
           << (all ? "Success: All sink neighborhoods fully invariant."
                   : "Failure: sink neighborhood invariance not established.")
           << "}} \\\\\n";
        if (!traj.empty()) os << "    \\midrule\n";
    }
    if (!traj.empty()) {
        os << "    \\multicolumn{5}{c}{\\textbf{Run 2: Trajectory of $(1,1)$}} \\\\\n";
        os << "    \\midrule\n";
        bool all = true;
        for (const auto* r : traj) {
            emit_rows(os, *r);
            all = all && r->success;
        }
        os << "    \\midrule\n";
        os << "    \\multicolumn{5}{c}{\\textit{"
           << (all ? "Success: Cloud fully absorbed."
                   : "Failure: cloud not fully absorbed.")
           << "}} \\\\\n";
    }
    os << "    \\bottomrule\n";
    os << "  \\end{tabular*}\n";
    os << "  \\vspace{0.5em}\n";
    os << "  \\caption{Dynamics of the interval cloud during the computer-assisted "
          "proof. The cloud is fully absorbed by the period-4 sink.}\n";
    os << "  \\label{tab:cap_output}\n";
    os << "\\end{table}\n";
    return os.str();
}

std::string proof_history_csv(const std::vector<engine::ProofResult>& results) {
    std::ostringstream os;
    os << "run_label,step,active,absorbed,snapped\n";
    for (const auto& r : results)
        for (const auto& s : r.history)
            os << csv_quote(r.label) << "," << s.step << "," << s.active << ","
               << s.absorbed << "," << s.snapped << "\n";
    return os.str();
}

std::string cloud_dump_header() { return "step,x1_lo,x1_hi,x2_lo,x2_hi\n"; }

std::string cloud_dump_rows(int step, const engine::Cloud& cloud) {
    std::ostringstream os;
    for (const Box& b : cloud)
        os << step << "," << fmt_double(b.x1.lo) << "," << fmt_double(b.x1.hi)
           << "," << fmt_double(b.x2.lo) << "," << fmt_double(b.x2.hi) << "\n";
    return os.str();
}

namespace {

const char* class_name(analysis::BasinClass c) {
    switch (c) {
        case analysis::BasinClass::sink: return "sink";
        case analysis::BasinClass::origin: return "origin";
        case analysis::BasinClass::escaped: return "escaped";
        default: return "undecided";
    }
}

unsigned char class_gray(analysis::BasinClass c) {
    switch (c) {
        case analysis::BasinClass::sink: return 255;
        case analysis::BasinClass::origin: return 128;
        case analysis::BasinClass::escaped: return 64;
        default: return 0;
    }
}

}  // namespace

std::string basin_csv(const analysis::BasinGrid& grid) {
    std::ostringstream os;
    os << "x1,x2,class\n";
    for (int j = 0; j < grid.spec.nx2; ++j)
        for (int i = 0; i < grid.spec.nx1; ++i)
            os << fmt_double(grid.cell_x1(i)) << "," << fmt_double(grid.cell_x2(j))
               << "," << class_name(grid.at(i, j)) << "\n";
    return os.str();
}

std::string basin_pgm(const analysis::BasinGrid& grid) {
    std::ostringstream os;
    os << "P5\n" << grid.spec.nx1 << " " << grid.spec.nx2 << "\n255\n";
    for (int j = grid.spec.nx2 - 1; j >= 0; --j)
        for (int i = 0; i < grid.spec.nx1; ++i)
            os << static_cast<char>(class_gray(grid.at(i, j)));
    return os.str();
}

std::string phase_csv(const analysis::PhaseTrajectory& t) {
    std::ostringstream os;
    os << "step,x1,x2\n";
    for (std::size_t k = 0; k < t.points.size(); ++k)
        os << k << "," << fmt_double(t.points[k].x1) << ","
           << fmt_double(t.points[k].x2) << "\n";
    return os.str();
}

std::string cobweb_csv(const std::vector<std::pair<double, double>>& vertices) {
    std::ostringstream os;
    os << "x,y\n";
    for (const auto& [x, y] : vertices)
        os << fmt_double(x) << "," << fmt_double(y) << "\n";
    return os.str();
}

std::string bifurcation_csv(const analysis::CascadeScan& scan) {
    std::ostringstream os;
    os << "lambda,orbit_value\n";
    for (std::size_t i = 0; i < scan.lambda_values.size(); ++i)
        for (double v : scan.attractor_samples[i])
            os << fmt_double(scan.lambda_values[i]) << "," << fmt_double(v) << "\n";
    return os.str();
}

std::string stability_csv() {
    std::ostringstream os;
    os << "type,re,im,absR\n";
    auto R = [](std::complex<double> z) { return 1.0 + z + 0.5 * z * z; };
    const int nre = 81, nim = 101;
    for (int i = 0; i < nre; ++i) {
        double re = -3.5 + 4.0 * i / (nre - 1);
        for (int j = 0; j < nim; ++j) {
            double im = -2.5 + 5.0 * j / (nim - 1);
            os << "grid," << fmt_double(re) << "," << fmt_double(im) << ","
               << fmt_double(std::abs(R({re, im}))) << "\n";
        }
    }
    // |R(z)| = 1 means 1 + z + z^2/2 = e^{i theta}: z = -1 +/- sqrt(2 e^{i theta} - 1)
    const int ntheta = 512;
    for (int branch = 0; branch < 2; ++branch) {
        double sign = branch == 0 ? 1.0 : -1.0;
        for (int k = 0; k < ntheta; ++k) {
            double theta = 2.0 * std::numbers::pi * k / ntheta;
            std::complex<double> w =
                std::sqrt(2.0 * std::polar(1.0, theta) - 1.0);
            std::complex<double> z = -1.0 + sign * w;
            os << "boundary," << fmt_double(z.real()) << "," << fmt_double(z.imag())
               << "," << fmt_double(std::abs(R(z))) << "\n";
        }
    }
    return os.str();
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string manifest_text(const std::string& command, const std::string& config_snapshot,
                          const std::vector<ManifestEntry>& outputs, double wall_seconds) {
    std::ostringstream os;
    os << "command: " << command << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", wall_seconds);
    os << "wall_time_seconds: " << buf << "\n";
    os << "config:\n";
    std::istringstream cfg(config_snapshot);
    std::string line;
    while (std::getline(cfg, line)) os << "  " << line << "\n";
    os << "outputs:\n";
    for (const auto& e : outputs) {
        char hex[24];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(e.hash));
        os << "  " << e.path << " " << e.format << " fnv1a64:" << hex << "\n";
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace capdyn::report
