#include "capdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "capdyn/parallel.hpp"

namespace capdyn::analysis {

namespace {

using dynamics::VectorFieldParams;

double g4(double x, const VectorFieldParams& p) {
    for (int i = 0; i < 4; ++i) x = dynamics::restricted_map_g(x, p);
    return x;
}

// derivative of the 4-fold composite by the chain rule
double g4_prime(double x, const VectorFieldParams& p) {
    double d = 1.0;
    for (int i = 0; i < 4; ++i) {
        d *= dynamics::g_prime(x, p);
        x = dynamics::restricted_map_g(x, p);
    }
    return d;
}

// bisection-safeguarded Newton for a root of g^4(x) - x near seed
double polish_cycle_point(double seed, const VectorFieldParams& p) {
    auto G = [&](double t) { return g4(t, p) - t; };
    double lo = seed - 1e-3, hi = seed + 1e-3;
    double Glo = G(lo), Ghi = G(hi);
    bool bracket = (Glo < 0.0) != (Ghi < 0.0);
    double t = seed;
    for (int i = 0; i < 80; ++i) {
        double d = g4_prime(t, p) - 1.0;
        double tn = (d != 0.0) ? t - G(t) / d : t;
        if (bracket && (tn <= lo || tn >= hi)) tn = 0.5 * (lo + hi);
        if (bracket) {
            double Gt = G(tn);
            if ((Gt < 0.0) == (Glo < 0.0)) {
                lo = tn;
                Glo = Gt;
            } else {
                hi = tn;
                Ghi = Gt;
            }
        }
        if (std::fabs(tn - t) <= 1e-15 * std::max(1.0, std::fabs(t))) return tn;
        t = tn;
    }
    return t;
}

}  // namespace

SinkOrbit find_sink_orbit(const VectorFieldParams& params) {
    const int kMinIter = 500;
    const int kMaxIter = 10000;
    const double kSettleTol = 1e-7;

    double x = critical_point_of_g(params);
    bool settled = false;
    for (int it = 1; it <= kMaxIter; ++it) {
        x = dynamics::restricted_map_g(x, params);
        if (!std::isfinite(x) || std::fabs(x) > 1e6)
            throw no_stable_cycle("orbit of the critical point escapes");
        if (it >= kMinIter && std::fabs(g4(x, params) - x) < kSettleTol) {
            settled = true;
            break;
        }
    }
    if (!settled)
        throw no_stable_cycle(
            "no stable cycle of period <= 4 within 10000 iterations");

    std::array<double, 4> pts;
    pts[0] = x;
    for (int i = 1; i < 4; ++i) pts[i] = dynamics::restricted_map_g(pts[i - 1], params);
    for (double& p : pts) p = polish_cycle_point(p, params);

    // canonical rotation: start the cycle at its smallest value
    std::size_t k = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (pts[i] < pts[k]) k = i;

    SinkOrbit orbit;
    for (std::size_t i = 0; i < 4; ++i) orbit.points[i] = pts[(k + i) % 4];

    orbit.residual = 0.0;
    orbit.multiplier = 1.0;
    for (double p : orbit.points) {
        orbit.residual = std::max(orbit.residual, std::fabs(g4(p, params) - p));
        orbit.multiplier *= dynamics::g_prime(p, params);
    }
    const double kEq = 1e-9;
    if (std::fabs(orbit.points[1] - orbit.points[0]) < kEq)
        orbit.period = 1;
    else if (std::fabs(orbit.points[2] - orbit.points[0]) < kEq &&
             std::fabs(orbit.points[3] - orbit.points[1]) < kEq)
        orbit.period = 2;
    else
        orbit.period = 4;
    return orbit;
}

double critical_point_of_g(const VectorFieldParams& params) {
    double lo = 0.0, hi = 1.0;
    while (dynamics::g_prime(hi, params) > 0.0 && hi < 1e6) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-12; ++i) {
        double m = 0.5 * (lo + hi);
        (dynamics::g_prime(m, params) > 0.0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

double positive_root_of_g(const VectorFieldParams& params) {
    double lo = critical_point_of_g(params);
    double hi = std::max(20.0, 2.0 * lo);
    while (dynamics::restricted_map_g(hi, params) >= 0.0 && hi < 1e9) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-10; ++i) {
        double m = 0.5 * (lo + hi);
        (dynamics::restricted_map_g(m, params) > 0.0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

BasinClass classify_point(dynamics::Point2 p, const VectorFieldParams& params,
                          const SinkOrbit& sink, const BasinParams& bp) {
    int run = 0;
    for (int k = 0; k <= bp.max_iter; ++k) {
        double norm = std::max(std::fabs(p.x1), std::fabs(p.x2));
        if (!std::isfinite(norm) || norm > bp.escape_radius) return BasinClass::escaped;
        if (norm < bp.origin_radius) return BasinClass::origin;
        bool in_ball = false;
        for (double s : sink.points)
            if (std::max(std::fabs(p.x1), std::fabs(p.x2 - s)) < bp.capture_epsilon) {
                in_ball = true;
                break;
            }
        run = in_ball ? run + 1 : 0;
        if (run >= bp.confirm_steps) return BasinClass::sink;
        p = dynamics::heun_map(p, params);
    }
    return BasinClass::undecided;
}

BasinGrid basin_raster(const BasinGridSpec& spec, const VectorFieldParams& params,
                       const SinkOrbit& sink, const BasinParams& bp, int threads) {
    BasinGrid grid;
    grid.spec = spec;
    grid.cells.assign(static_cast<std::size_t>(spec.nx1) * spec.nx2,
                      BasinClass::undecided);
    detail::parallel_index(static_cast<std::size_t>(spec.nx2), threads,
                           [&](std::size_t j) {
                               for (int i = 0; i < spec.nx1; ++i) {
                                   dynamics::Point2 p{grid.cell_x1(i),
                                                      grid.cell_x2(static_cast<int>(j))};
                                   grid.cells[j * spec.nx1 + i] =
                                       classify_point(p, params, sink, bp);
                               }
                           });
    return grid;
}

PhaseTrajectory phase_trajectory(const dynamics::Point2& p0, int n,
                                 const VectorFieldParams& params) {
    PhaseTrajectory out;
    out.points.reserve(static_cast<std::size_t>(n) + 1);
    dynamics::Point2 p = p0;
    out.points.push_back(p);
    for (int k = 1; k <= n; ++k) {
        p = dynamics::heun_map(p, params);
        if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) {
            out.escaped = true;
            break;
        }
        out.points.push_back(p);
    }
    return out;
}

std::vector<std::pair<double, double>> cobweb_data(double x0, int n,
                                                   const VectorFieldParams& params) {
    std::vector<std::pair<double, double>> out;
    out.reserve(2 * static_cast<std::size_t>(n) + 1);
    double x = x0;
    out.emplace_back(x, x);
    for (int k = 0; k < n; ++k) {
        double y = dynamics::restricted_map_g(x, params);
        out.emplace_back(x, y);
        out.emplace_back(y, y);
        x = y;
    }
    return out;
}

namespace {

// smallest p such that the sample tail repeats with period p within tol
int period_of_samples(const std::vector<double>& s, double tol, int max_period) {
    int m = static_cast<int>(s.size());
    int span = std::min(m / 2, 128);
    for (int p = 1; p <= max_period; ++p) {
        if (p + span > m) break;
        bool ok = true;
        for (int k = 0; k < span && ok; ++k)
            if (std::fabs(s[m - 1 - k] - s[m - 1 - k - p]) >= tol) ok = false;
        if (ok) return p;
    }
    return 0;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// multiplier and image of the p-fold composite of g at x
std::pair<double, double> cycle_mult(double x, int p, const VectorFieldParams& q) {
    double m = 1.0;
    for (int i = 0; i < p; ++i) {
        m *= dynamics::g_prime(x, q);
        x = dynamics::restricted_map_g(x, q);
    }
    return {m, x};
}

// Newton for a root of g^p(x) - x from seed. The derivative is m - 1, about
// -2 near a doubling, so the iteration stays well conditioned exactly where
// the boundary search needs it. NaN on failure.
double polish_period_point(double x, int p, const VectorFieldParams& q) {
    for (int i = 0; i < 80; ++i) {
        auto [m, y] = cycle_mult(x, p, q);
        double num = y - x, den = m - 1.0;
        if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) return kNaN;
        double xn = x - num / den;
        if (!std::isfinite(xn)) return kNaN;
        if (std::fabs(xn - x) <= 1e-14 * std::max(1.0, std::fabs(x))) {
            x = xn;
            break;
        }
        x = xn;
    }
    double res = std::fabs(cycle_mult(x, p, q).second - x);
    if (!(res <= 1e-8 * std::max(1.0, std::fabs(x)))) return kNaN;
    return x;
}

// a point near the attractor: iterate from the critical point with a long
// transient (well inside a stable window this converges geometrically)
double long_iterate_seed(double lambda, const VectorFieldParams& params) {
    VectorFieldParams q = params;
    q.lambda_stiff = lambda;
    double x = critical_point_of_g(q);
    for (long k = 0; k < 300000; ++k) {
        x = dynamics::restricted_map_g(x, q);
        if (!std::isfinite(x) || std::fabs(x) > 1e6) return kNaN;
    }
    return x;
}

}  // namespace

int detect_attractor_period(double lambda, const VectorFieldParams& params,
                            const ScanParams& sp, std::vector<double>* samples_out) {
    VectorFieldParams q = params;
    q.lambda_stiff = lambda;
    double x0 = critical_point_of_g(q);

    // escalate the discarded transient when no cycle shows up: neutral
    // parameters settle algebraically and need far more than the default
    struct Stage {
        long transient;
        int samples;
    };
    const Stage stages[] = {{sp.transient, sp.samples},
                            {10L * sp.transient, sp.samples},
                            {200L * sp.transient, 2 * sp.samples}};

    std::vector<double> samples;
    for (const Stage& stage : stages) {
        double x = x0;
        bool escaped = false;
        for (long k = 0; k < stage.transient; ++k) {
            x = dynamics::restricted_map_g(x, q);
            if (!std::isfinite(x) || std::fabs(x) > 1e6) {
                escaped = true;
                break;
            }
        }
        if (escaped) {
            if (samples_out) samples_out->clear();
            return 0;
        }
        samples.clear();
        samples.reserve(static_cast<std::size_t>(stage.samples));
        for (int k = 0; k < stage.samples && !escaped; ++k) {
            x = dynamics::restricted_map_g(x, q);
            if (!std::isfinite(x) || std::fabs(x) > 1e6) {
                escaped = true;
                break;
            }
            samples.push_back(x);
        }
        if (escaped) {
            if (samples_out) *samples_out = samples;
            return 0;
        }
        int p = period_of_samples(samples, sp.tolerance, sp.max_period);
        if (p > 0) {
            if (samples_out) *samples_out = samples;
            return p;
        }
    }
    if (samples_out) *samples_out = samples;
    return 0;
}

CascadeScan bifurcation_scan(double lambda_lo, double lambda_hi, int steps,
                             const VectorFieldParams& params, const ScanParams& sp,
                             int threads) {
    CascadeScan scan;
    scan.lambda_values.resize(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        scan.lambda_values[static_cast<std::size_t>(i)] =
            lambda_lo + (lambda_hi - lambda_lo) * i / (steps - 1);
    scan.periods.assign(scan.lambda_values.size(), 0);
    scan.attractor_samples.assign(scan.lambda_values.size(), {});

    detail::parallel_index(scan.lambda_values.size(), threads, [&](std::size_t i) {
        scan.periods[i] = detect_attractor_period(
            scan.lambda_values[i], params, sp, &scan.attractor_samples[i]);
    });

    // A doubling parameter is located by its defining condition: the 2^k-cycle
    // multiplier crossing -1. Bisecting on the raw period readout instead
    // inherits the detector's tolerance lag (near a boundary the decaying
    // period-2p echo already matches within tol), which is measurable at the
    // deep levels and wrecks the delta estimates. The cycle itself is tracked
    // by Newton on g^p(x) - x with continuation seeds; that root is simple
    // (derivative about -2) through the doubling, so the search stays stable
    // on both sides.
    auto with_lambda = [&](double lambda) {
        VectorFieldParams q = params;
        q.lambda_stiff = lambda;
        return q;
    };
    auto mult_at = [&](double x, int p, double lambda) {
        return cycle_mult(x, p, with_lambda(lambda)).first;
    };
    // stable interior cycle point at lambda, or NaN
    auto seed_at = [&](double lambda, int p) {
        double x = long_iterate_seed(lambda, params);
        if (!std::isfinite(x)) return kNaN;
        x = polish_period_point(x, p, with_lambda(lambda));
        if (!std::isfinite(x)) return kNaN;
        double m = mult_at(x, p, lambda);
        if (!(m > -1.0 && m < 1.0)) return kNaN;
        return x;
    };
    // carry a cycle point across a lambda span in polished substeps
    auto track = [&](double lam_from, double x_from, double lam_to, int p) {
        double x = x_from;
        for (int i = 1; i <= 12; ++i) {
            double lam = lam_from + (lam_to - lam_from) * i / 12.0;
            x = polish_period_point(x, p, with_lambda(lam));
            if (!std::isfinite(x)) return kNaN;
        }
        return x;
    };
    auto locate = [&](int p, double lo, double x_lo, double hi, double x_hi) {
        for (int i = 0; i < 48; ++i) {
            double mid = 0.5 * (lo + hi);
            double xm = polish_period_point(0.5 * (x_lo + x_hi), p, with_lambda(mid));
            if (!std::isfinite(xm)) return kNaN;
            if (mult_at(xm, p, mid) > -1.0) {
                lo = mid;
                x_lo = xm;
            } else {
                hi = mid;
                x_hi = xm;
            }
        }
        return 0.5 * (lo + hi);
    };

    auto grid_bracket = [&](int target) -> std::pair<double, double> {
        const auto& P = scan.periods;
        for (std::size_t j = 1; j < P.size(); ++j) {
            if (P[j] != target) continue;
            for (std::size_t i = j; i-- > 0;)
                if (P[i] > 0 && P[i] < target)
                    return {scan.lambda_values[i], scan.lambda_values[j]};
            break;
        }
        return {0.0, 0.0};  // not found
    };

    // level 0: the fixed point. The grid transition brackets it only roughly
    // (the detector flips early on the stable side), so extend right until
    // the multiplier actually crosses.
    auto [glo, ghi] = grid_bracket(2);
    if (ghi > glo) {
        double step = ghi - glo;
        double lo = glo;
        double x_lo = seed_at(lo, 1);
        for (int w = 0; w < 8 && !std::isfinite(x_lo) && lo - step >= lambda_lo; ++w) {
            lo -= step;
            x_lo = seed_at(lo, 1);
        }
        if (std::isfinite(x_lo)) {
            double hi = std::min(lo + step, lambda_hi);
            double x_hi = track(lo, x_lo, hi, 1);
            int grow = 0;
            while (std::isfinite(x_hi) && mult_at(x_hi, 1, hi) > -1.0 &&
                   hi < lambda_hi && grow++ < 16) {
                lo = hi;
                x_lo = x_hi;
                hi = std::min(hi + step, lambda_hi);
                x_hi = track(lo, x_lo, hi, 1);
            }
            if (std::isfinite(x_hi) && mult_at(x_hi, 1, hi) <= -1.0) {
                double b = locate(1, lo, x_lo, hi, x_hi);
                if (std::isfinite(b)) scan.doubling_lambdas.push_back(b);
            }
        }
    }

    // level 1: the 2-cycle. The first grid reading of period 4 lies past the
    // true boundary and serves as the right end.
    if (scan.doubling_lambdas.size() == 1) {
        auto [flo, fhi] = grid_bracket(4);
        if (fhi > flo) {
            double prev = scan.doubling_lambdas[0];
            double hi = std::min(fhi, lambda_hi);
            double lo = prev + 0.25 * (hi - prev);
            double x_lo = kNaN;
            for (int w = 0; w < 8 && !std::isfinite(x_lo); ++w) {
                x_lo = seed_at(lo, 2);
                if (!std::isfinite(x_lo)) lo = prev + 0.5 * (lo - prev);
            }
            double x_hi = std::isfinite(x_lo) ? track(lo, x_lo, hi, 2) : kNaN;
            if (std::isfinite(x_hi) && mult_at(x_hi, 2, hi) <= -1.0) {
                double b = locate(2, lo, x_lo, hi, x_hi);
                if (std::isfinite(b)) scan.doubling_lambdas.push_back(b);
            }
        }
    }

    // levels >= 2: walk down the cascade with the window predicted from the
    // previous gap; stop once the doubled cycle would exceed what the period
    // detector can certify.
    while (scan.doubling_lambdas.size() >= 2) {
        std::size_t k = scan.doubling_lambdas.size();
        int p = 1 << k;  // period of the cycle losing stability next
        if (2LL * p > sp.max_period) break;
        double prev = scan.doubling_lambdas[k - 1];
        double window = prev - scan.doubling_lambdas[k - 2];
        if (!(window > 1e-9)) break;
        double b = kNaN;
        for (double f : {0.05, 0.1, 0.2}) {
            double lo = prev + f * window;
            if (lo >= lambda_hi) break;
            double x_lo = seed_at(lo, p);
            if (!std::isfinite(x_lo)) continue;
            double hi = std::min(prev + window, lambda_hi);
            double x_hi = track(lo, x_lo, hi, p);
            int grow = 0;
            while (std::isfinite(x_hi) && mult_at(x_hi, p, hi) > -1.0 &&
                   hi < lambda_hi && grow++ < 3) {
                double hi2 = std::min(hi + window, lambda_hi);
                x_hi = track(hi, x_hi, hi2, p);
                hi = hi2;
            }
            if (!std::isfinite(x_hi) || mult_at(x_hi, p, hi) > -1.0) continue;
            b = locate(p, lo, x_lo, hi, x_hi);
            if (std::isfinite(b)) break;
        }
        if (!std::isfinite(b)) break;
        scan.doubling_lambdas.push_back(b);
    }

    for (std::size_t i = 2; i < scan.doubling_lambdas.size(); ++i) {
        double a = scan.doubling_lambdas[i - 2];
        double b = scan.doubling_lambdas[i - 1];
        double c = scan.doubling_lambdas[i];
        scan.delta_estimates.push_back((b - a) / (c - b));
    }
    return scan;
}

}  // namespace capdyn::analysis
