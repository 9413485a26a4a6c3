#include "capdyn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "capdyn/parallel.hpp"

namespace capdyn::engine {

EngineConfig default_engine_config() {
    EngineConfig cfg;
    cfg.iv = dynamics::default_iv_params();
    return cfg;
}

void validate_config(const EngineConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(cfg.x1_diam_threshold > 0.0)) fail("x1_diam_threshold must be > 0");
    if (!(cfg.x2_diam_threshold > 0.0)) fail("x2_diam_threshold must be > 0");
    if (!(cfg.snap_threshold > 0.0)) fail("snap_threshold must be > 0");
    if (!(cfg.sink_epsilon > 0.0)) fail("sink_epsilon must be > 0");
    for (double s : cfg.sink_points)
        if (!(s > 0.0 && s < 8.31177))
            fail("sink points must lie strictly inside (0, 8.31177)");
    if (cfg.max_steps < 1) fail("max_steps must be >= 1");
    if (cfg.cloud_cap < 1) fail("cloud_cap must be >= 1");
    if (cfg.threads < 1) fail("threads must be >= 1");
    if (!(cfg.iv.h.lo > 0.0)) fail("step size h must be positive");
}

bool absorb_check(const Box& b, const EngineConfig& cfg) {
    double eps = cfg.sink_epsilon;
    if (cfg.absorption_mode == AbsorptionMode::paper_faithful) {
        double x1_val = std::fabs(b.x1.lo);
        double x2_val = iv_mid(b.x2);
        for (double s : cfg.sink_points)
            if (std::max(x1_val, std::fabs(x2_val - s)) < eps) return true;
        return false;
    }
    // sup-norm distance of the whole box to (0, s), overestimated by the
    // outward-rounded difference, must be strictly below eps
    double m1 = iv_mag(b.x1);
    if (!(m1 < eps)) return false;
    for (double s : cfg.sink_points) {
        Interval d = iv_sub(b.x2, iv_point(s));
        if (iv_mag(d) < eps) return true;
    }
    return false;
}

std::pair<Box, bool> snap_to_axis(const Box& b, const EngineConfig& cfg,
                                  std::size_t* straddle) {
    if (0.0 < b.x1.hi && b.x1.hi < cfg.snap_threshold) {
        if (b.x1.lo >= 0.0) return {Box{make_interval(0.0, 0.0), b.x2}, true};
        if (straddle) ++*straddle;  // negative extent: projection would not enclose
    }
    return {b, false};
}

namespace {

struct ParentOut {
    Box image;
    std::uint64_t pieces = 0;
    std::uint8_t absorbed = 0;
    std::uint8_t snapped = 0;
    std::uint8_t straddled = 0;
    std::uint8_t nonfinite = 0;
};

bool box_finite(const Box& b) {
    return std::isfinite(b.x1.lo) && std::isfinite(b.x1.hi) &&
           std::isfinite(b.x2.lo) && std::isfinite(b.x2.hi);
}

}  // namespace

StepOutcome step_cloud(const Cloud& c, const EngineConfig& cfg, int step_index) {
    StepOutcome out;
    out.stats.step = step_index;
    const std::size_t n = c.size();
    std::vector<ParentOut> parents(n);

    // pass A: map, classify, and count split pieces without materializing,
    // so a combinatorial explosion is detected before memory is committed
    const std::uint64_t budget = static_cast<std::uint64_t>(cfg.cloud_cap) + 1;
    detail::parallel_index(n, cfg.threads, [&](std::size_t i) {
        ParentOut& p = parents[i];
        p.image = dynamics::heun_map_iv(c[i], cfg.iv);
        if (!box_finite(p.image)) {
            p.nonfinite = 1;
            return;
        }
        if (absorb_check(p.image, cfg)) {
            p.absorbed = 1;
            return;
        }
        if (cfg.snap_enabled) {
            std::size_t straddle = 0;
            auto [snapped_box, did] = snap_to_axis(p.image, cfg, &straddle);
            p.image = snapped_box;
            p.snapped = did ? 1 : 0;
            p.straddled = straddle ? 1 : 0;
        }
        std::uint64_t count = 0;
        box_split_visit(p.image, cfg.x1_diam_threshold, cfg.x2_diam_threshold,
                        [&](const Box&) { return ++count < budget; });
        p.pieces = count;
    });

    std::uint64_t total_pieces = 0;
    for (const ParentOut& p : parents) {
        if (p.nonfinite) {
            std::ostringstream msg;
            msg << "non-finite image endpoints (overflow) at step " << step_index;
            out.aborted = true;
            out.diagnostic = msg.str();
            return out;
        }
        out.stats.absorbed += p.absorbed;
        out.stats.snapped += p.snapped;
        out.straddle_events += p.straddled;
        total_pieces += p.pieces;
    }
    if (total_pieces > cfg.cloud_cap) {
        std::ostringstream msg;
        msg << "combinatorial explosion at step " << step_index << ": more than "
            << cfg.cloud_cap << " boxes before dedup";
        out.aborted = true;
        out.diagnostic = msg.str();
        return out;
    }

    // pass B: materialize every parent's pieces into its precomputed slot
    // (parent order), then canonicalize; identical for any thread count
    std::vector<std::uint64_t> offset(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + parents[i].pieces;
    Cloud next(static_cast<std::size_t>(total_pieces));
    detail::parallel_index(n, cfg.threads, [&](std::size_t i) {
        const ParentOut& p = parents[i];
        if (p.absorbed) return;
        std::size_t at = static_cast<std::size_t>(offset[i]);
        box_split_visit(p.image, cfg.x1_diam_threshold, cfg.x2_diam_threshold,
                        [&](const Box& piece) {
                            next[at++] = piece;
                            return true;
                        });
    });
    std::sort(next.begin(), next.end(), box_less);
    next.erase(std::unique(next.begin(), next.end(), box_same), next.end());

    out.stats.active = next.size();
    out.cloud = std::move(next);
    return out;
}

ProofResult prove_absorption(const Box& b0, const EngineConfig& cfg,
                             const std::string& label,
                             const StepObserver& observe) {
    validate_config(cfg);
    ProofResult res;
    res.label = label;
    Cloud cloud{b0};
    std::size_t straddles = 0;
    for (int step = 1; step <= cfg.max_steps; ++step) {
        StepOutcome o = step_cloud(cloud, cfg, step);
        if (o.aborted) {
            res.aborted = true;
            res.diagnostic = o.diagnostic;
            return res;
        }
        cloud = std::move(o.cloud);
        res.history.push_back(o.stats);
        res.peak_active = std::max(res.peak_active, o.stats.active);
        straddles += o.straddle_events;
        if (observe) observe(o.stats, cloud);
        if (cloud.empty()) {
            res.success = true;
            break;
        }
    }
    if (straddles > 0) {
        std::ostringstream msg;
        msg << "snap skipped for " << straddles
            << " box(es) straddling x1 = 0 (projection would not enclose)";
        res.diagnostic = msg.str();
    }
    if (!res.success && res.diagnostic.empty()) {
        std::ostringstream msg;
        msg << "cloud not absorbed within " << cfg.max_steps << " steps ("
            << (res.history.empty() ? std::size_t{1} : res.history.back().active)
            << " boxes remain)";
        res.diagnostic = msg.str();
    }
    return res;
}

std::vector<Box> sink_neighborhood_boxes(const EngineConfig& cfg) {
    std::vector<Box> out;
    out.reserve(cfg.sink_points.size());
    double eps = cfg.sink_epsilon;
    for (double s : cfg.sink_points) {
        Interval x1 = iv_add(iv_point(0.0), make_interval(0.0, eps));
        Interval x2 = iv_add(iv_point(s), make_interval(-eps, eps));
        out.push_back({x1, x2});
    }
    return out;
}

std::vector<ProofResult> run_sink_invariance(const EngineConfig& cfg,
                                             const StepObserver& observe) {
    std::vector<ProofResult> results;
    std::vector<Box> boxes = sink_neighborhood_boxes(cfg);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        std::string label = "Sink Point " + std::to_string(i + 1);
        results.push_back(prove_absorption(boxes[i], cfg, label, observe));
    }
    return results;
}

Box trajectory_initial_box() {
    return {make_interval(0.78, 1.22), make_interval(0.78, 1.22)};
}

ProofResult run_trajectory_proof(const EngineConfig& cfg,
                                 const StepObserver& observe) {
    return prove_absorption(trajectory_initial_box(), cfg, "Box around (1,1)",
                            observe);
}

}  // namespace capdyn::engine
