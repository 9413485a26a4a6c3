#pragma once
// Plain floating-point exploration layer: locate the period-4 sink and the
// landmarks of the quartic restriction g, rasterize the basin of attraction,
// produce phase/cobweb trajectories, and scan the stiffness parameter for
// the period-doubling cascade. Nothing here is interval-verified; the
// rigorous engine consumes these values only as target regions.

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

#include "capdyn/dynamics.hpp"

namespace capdyn::analysis {

struct no_stable_cycle : std::runtime_error {
    explicit no_stable_cycle(const std::string& what) : std::runtime_error(what) {}
};

struct SinkOrbit {
    std::array<double, 4> points{};  // g maps points[i] to points[(i+1) % 4]
    double residual = 0.0;           // max |g^4(p_i) - p_i|
    int period = 0;                  // attractor period (1, 2, or 4)
    double multiplier = 0.0;         // product of g'(p_i) over the 4 slots
};

// Iterate g from the critical point until a cycle of period <= 4 settles,
// then polish each point as a root of g^4(x) - x with bisection-safeguarded
// Newton. points[0] is the smallest orbit value; shorter cycles repeat to
// fill the 4 slots. Throws no_stable_cycle after 10^4 unsettled iterations
// or when the attractor period exceeds 4.
SinkOrbit find_sink_orbit(const dynamics::VectorFieldParams& params);

// unique maximum abscissa of g in (0, r*): root of g' by bisection to 1e-12
double critical_point_of_g(const dynamics::VectorFieldParams& params);

// positive root r* of g, bisected on [critical, 20] (widened if needed) to 1e-10
double positive_root_of_g(const dynamics::VectorFieldParams& params);

enum class BasinClass : unsigned char { undecided = 0, escaped, origin, sink };

struct BasinGridSpec {
    double x1_min = 0.0, x1_max = 9.0;
    double x2_min = 0.0, x2_max = 9.0;
    int nx1 = 256, nx2 = 256;
};

struct BasinParams {
    double capture_epsilon = 0.2;  // l-inf ball radius around (0, p_i)
    int confirm_steps = 8;         // consecutive in-ball steps to call it sink
    double escape_radius = 1e3;
    double origin_radius = 1e-6;
    int max_iter = 2000;
};

struct BasinGrid {
    BasinGridSpec spec;
    std::vector<BasinClass> cells;  // row-major, index = j * nx1 + i

    BasinClass at(int i, int j) const { return cells[static_cast<std::size_t>(j) * spec.nx1 + i]; }
    double cell_x1(int i) const {
        return spec.x1_min + (i + 0.5) * (spec.x1_max - spec.x1_min) / spec.nx1;
    }
    double cell_x2(int j) const {
        return spec.x2_min + (j + 0.5) * (spec.x2_max - spec.x2_min) / spec.nx2;
    }
};

BasinClass classify_point(dynamics::Point2 p, const dynamics::VectorFieldParams& params,
                          const SinkOrbit& sink, const BasinParams& bp);

BasinGrid basin_raster(const BasinGridSpec& spec, const dynamics::VectorFieldParams& params,
                       const SinkOrbit& sink, const BasinParams& bp, int threads = 1);

struct PhaseTrajectory {
    std::vector<dynamics::Point2> points;  // p0, F(p0), ..., truncated on overflow
    bool escaped = false;
};

PhaseTrajectory phase_trajectory(const dynamics::Point2& p0, int n,
                                 const dynamics::VectorFieldParams& params);

// cobweb polyline vertices for g from x0: (x,x) -> (x,g(x)) -> (g(x),g(x)) -> ...
std::vector<std::pair<double, double>> cobweb_data(double x0, int n,
                                                   const dynamics::VectorFieldParams& params);

struct ScanParams {
    int transient = 1000;     // iterations discarded before sampling
    int samples = 256;        // recorded post-transient values
    double tolerance = 1e-6;  // cycle-matching tolerance
    int max_period = 64;      // larger periods are marked aperiodic
};

struct CascadeScan {
    std::vector<double> lambda_values;
    std::vector<std::vector<double>> attractor_samples;  // per-lambda tail values
    std::vector<int> periods;                            // 0 = no cycle detected
    std::vector<double> doubling_lambdas;                // strictly increasing
    std::vector<double> delta_estimates;                 // successive gap ratios
};

// Detected attractor period of g_lambda from its critical point, escalating
// the transient when the orbit settles slowly (neutral parameters); 0 when
// no cycle of period <= max_period emerges.
int detect_attractor_period(double lambda, const dynamics::VectorFieldParams& params,
                            const ScanParams& sp, std::vector<double>* samples_out = nullptr);

CascadeScan bifurcation_scan(double lambda_lo, double lambda_hi, int steps,
                             const dynamics::VectorFieldParams& params,
                             const ScanParams& sp = {}, int threads = 1);

}  // namespace capdyn::analysis
