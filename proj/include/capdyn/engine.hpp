#pragma once
// Set-oriented absorption proofs: evolve a deduplicated cloud of boxes under
// the interval Heun map with threshold splitting, snap-to-axis projection,
// and sink absorption. A proof succeeds when the cloud empties; hitting the
// step limit or the cloud cap is a failed proof, never a crash.

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "capdyn/box.hpp"
#include "capdyn/dynamics.hpp"

namespace capdyn::engine {

enum class AbsorptionMode { paper_faithful, strict_containment };

struct EngineConfig {
    dynamics::IvParams iv;  // rigorous h and stiffness used by the map
    double x1_diam_threshold = 0.1;
    double x2_diam_threshold = 0.1;
    double snap_threshold = 0.4;
    double sink_epsilon = 1.3;
    std::array<double, 4> sink_points{4.613677692731402, 7.214907799688287,
                                      3.9654987245283035, 6.9704245174643379};
    int max_steps = 250;
    AbsorptionMode absorption_mode = AbsorptionMode::strict_containment;
    bool snap_enabled = true;
    std::size_t cloud_cap = 1000000;
    int threads = 1;
};

// config with the interval parameters filled in (h enclosing decimal 0.1)
EngineConfig default_engine_config();

// throws std::invalid_argument on violated invariants (thresholds <= 0,
// sink points outside (0, 8.31177), max_steps < 1, ...)
void validate_config(const EngineConfig& cfg);

struct StepStats {
    int step = 0;
    std::size_t active = 0;    // boxes surviving the step (after dedup)
    std::size_t absorbed = 0;  // boxes removed this step
    std::size_t snapped = 0;   // boxes projected onto the axis this step
};

struct ProofResult {
    bool success = false;
    std::vector<StepStats> history;
    std::size_t peak_active = 0;
    std::string label;
    bool aborted = false;     // cloud cap exceeded or non-finite image
    std::string diagnostic;   // failure reason / snap-straddle notes
};

// boxes sorted by box_less and unique under box_same
using Cloud = std::vector<Box>;

// paper_faithful: some sink point s has max(|x1.lo|, |mid(x2) - s|) < eps.
// strict_containment: the whole box lies strictly inside the open
// l-inf eps-ball around (0, s) for some s (outward-rounded comparison).
bool absorb_check(const Box& b, const EngineConfig& cfg);

// Projects a box touching the axis strip onto x1 = 0: requires
// 0 < x1.hi < snap_threshold and x1.lo >= 0. A straddling box
// (x1.lo < 0 < x1.hi < threshold) is left alone and counted through
// *straddle so callers can surface a diagnostic.
std::pair<Box, bool> snap_to_axis(const Box& b, const EngineConfig& cfg,
                                  std::size_t* straddle = nullptr);

struct StepOutcome {
    Cloud cloud;
    StepStats stats;
    std::size_t straddle_events = 0;
    bool aborted = false;
    std::string diagnostic;
};

// One synchronous step: image -> absorb -> snap -> split -> dedup. step_index
// is recorded in the stats. Deterministic for any cfg.threads.
StepOutcome step_cloud(const Cloud& c, const EngineConfig& cfg, int step_index);

// called after every completed step with the stats and the surviving cloud
using StepObserver = std::function<void(const StepStats&, const Cloud&)>;

ProofResult prove_absorption(const Box& b0, const EngineConfig& cfg,
                             const std::string& label,
                             const StepObserver& observe = {});

// the four initial sets [0, eps] x [s - eps, s + eps], built with directed
// endpoint arithmetic
std::vector<Box> sink_neighborhood_boxes(const EngineConfig& cfg);

// Run 1: one absorption proof per sink neighborhood, labels "Sink Point i"
std::vector<ProofResult> run_sink_invariance(const EngineConfig& cfg,
                                             const StepObserver& observe = {});

Box trajectory_initial_box();

// Run 2: the box around (1,1), label "Box around (1,1)"
ProofResult run_trajectory_proof(const EngineConfig& cfg,
                                 const StepObserver& observe = {});

}  // namespace capdyn::engine
