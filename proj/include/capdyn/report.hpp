#pragma once
// Emitters for the published table and the figure data files, plus the run
// manifest. Every emitter is a pure value -> text function so outputs are
// byte-stable for identical inputs.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capdyn/analysis.hpp"
#include "capdyn/engine.hpp"

namespace capdyn::report {

// Full-width 5-column LaTeX table: sink-neighborhood results render under
// the Run 1 section, everything else under Run 2; each run labels only its
// first data row and closes with a Success/Failure rule line.
std::string emit_latex_table(const std::vector<engine::ProofResult>& results);

// machine-readable history: run_label,step,active,absorbed,snapped
std::string proof_history_csv(const std::vector<engine::ProofResult>& results);

// per-step cloud dump rows: step,x1_lo,x1_hi,x2_lo,x2_hi
std::string cloud_dump_header();
std::string cloud_dump_rows(int step, const engine::Cloud& cloud);

std::string basin_csv(const analysis::BasinGrid& grid);

// binary 8-bit PGM (P5); top row = largest x2; sink=255 origin=128
// escaped=64 undecided=0
std::string basin_pgm(const analysis::BasinGrid& grid);

std::string phase_csv(const analysis::PhaseTrajectory& t);

std::string cobweb_csv(const std::vector<std::pair<double, double>>& vertices);

std::string bifurcation_csv(const analysis::CascadeScan& scan);

// R(z) sampled on a rectangular grid plus the |R(z)| = 1 boundary curve
// z = -1 +/- sqrt(2 e^{i theta} - 1); rows: type,re,im,absR
std::string stability_csv();

std::uint64_t fnv1a64(std::string_view data);

struct ManifestEntry {
    std::string path;    // as written, relative to the output dir
    std::string format;  // latex | csv | pgm | text
    std::uint64_t hash = 0;
};

std::string manifest_text(const std::string& command, const std::string& config_snapshot,
                          const std::vector<ManifestEntry>& outputs, double wall_seconds);

// binary write; throws std::runtime_error when the file cannot be written
void write_file(const std::string& path, const std::string& content);

}  // namespace capdyn::report
