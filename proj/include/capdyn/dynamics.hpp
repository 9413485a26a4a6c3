#pragma once
// The concrete dynamical objects: the stiff planar vector field
//   x1' = -2 x1 - x1^2/(1 + x2^4)
//   x2' = -L x2 - x2^2/(1 + x1^4)
// its one-step Heun map F (point and interval flavors), the quartic
// restriction g of F to the x2-axis, the Runge-Kutta stability function
// R(z) = 1 + z + z^2/2, and derived linear/Schwarzian diagnostics.

#include <array>
#include <cmath>
#include <utility>

#include "capdyn/box.hpp"
#include "capdyn/interval.hpp"

namespace capdyn::dynamics {

struct VectorFieldParams {
    double lambda_stiff = 30.0;
    double h = 0.1;
};

struct Point2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

// Interval-valued parameters for the rigorous map. h defaults to the tight
// enclosure of decimal 0.1 (which is not a binary number); the stiffness
// coefficient defaults to exactly 30.
struct IvParams {
    Interval lambda_stiff{30.0, 30.0};
    Interval h{0.0, 0.0};
};

inline IvParams default_iv_params() {
    IvParams p;
    p.h = parse_decimal_interval("0.1");
    return p;
}

inline Point2 vector_field(const Point2& p, const VectorFieldParams& params) {
    double x1 = p.x1, x2 = p.x2;
    double p2 = x2 * x2, p4 = p2 * p2;
    double q2 = x1 * x1, q4 = q2 * q2;
    return {-2.0 * x1 - q2 / (1.0 + p4),
            -params.lambda_stiff * x2 - p2 / (1.0 + q4)};
}

inline Point2 heun_map(const Point2& p, const VectorFieldParams& params) {
    double h = params.h;
    Point2 k1 = vector_field(p, params);
    Point2 q{p.x1 + h * k1.x1, p.x2 + h * k1.x2};
    Point2 k2 = vector_field(q, params);
    return {p.x1 + h / 2.0 * (k1.x1 + k2.x1),
            p.x2 + h / 2.0 * (k1.x2 + k2.x2)};
}

inline Box vector_field_iv(const Box& b, const IvParams& params) {
    Interval one{1.0, 1.0};
    Interval f1 = iv_sub(iv_scale(b.x1, -2.0),
                         iv_div(iv_powi(b.x1, 2), iv_add(one, iv_powi(b.x2, 4))));
    Interval f2 = iv_sub(iv_neg(iv_mul(params.lambda_stiff, b.x2)),
                         iv_div(iv_powi(b.x2, 2), iv_add(one, iv_powi(b.x1, 4))));
    return {f1, f2};
}

// k1 = f(y); k2 = f(y + h k1); y + h/2 (k1 + k2) -- the same expression
// order as the point map, so enclosures are comparable step for step
inline Box heun_map_iv(const Box& b, const IvParams& params) {
    Box k1 = vector_field_iv(b, params);
    Box q{iv_add(b.x1, iv_mul(params.h, k1.x1)),
          iv_add(b.x2, iv_mul(params.h, k1.x2))};
    Box k2 = vector_field_iv(q, params);
    Interval h2 = iv_scale(params.h, 0.5);
    return {iv_add(b.x1, iv_mul(h2, iv_add(k1.x1, k2.x1))),
            iv_add(b.x2, iv_mul(h2, iv_add(k1.x2, k2.x2)))};
}

inline double stability_R(double z) { return 1.0 + z + z * z / 2.0; }

// Coefficients of the axis restriction g(x) = c1 x + c2 x^2 + c3 x^3 + c4 x^4,
// obtained by expanding the Heun update of (0, x) symbolically in x. With
// a = L h:
//   c1 = 1 - a + a^2/2 = R(-a)
//   c2 = (h/2) (-2 + 3a - a^2)
//   c3 = h^2 (1 - a)
//   c4 = -h^3 / 2
inline std::array<double, 4> quartic_coeffs(const VectorFieldParams& params) {
    double h = params.h;
    double a = params.lambda_stiff * h;
    return {stability_R(-a),
            h / 2.0 * (-2.0 + 3.0 * a - a * a),
            h * h * (1.0 - a),
            -h * h * h / 2.0};
}

inline double restricted_map_g(double x, const VectorFieldParams& params) {
    auto c = quartic_coeffs(params);
    return x * (c[0] + x * (c[1] + x * (c[2] + x * c[3])));
}

inline double g_prime(double x, const VectorFieldParams& params) {
    auto c = quartic_coeffs(params);
    return c[0] + x * (2.0 * c[1] + x * (3.0 * c[2] + x * 4.0 * c[3]));
}

inline double g_second(double x, const VectorFieldParams& params) {
    auto c = quartic_coeffs(params);
    return 2.0 * c[1] + x * (6.0 * c[2] + x * 12.0 * c[3]);
}

inline double g_third(double x, const VectorFieldParams& params) {
    auto c = quartic_coeffs(params);
    return 6.0 * c[2] + 24.0 * c[3] * x;
}

struct undefined_schwarzian : std::runtime_error {
    undefined_schwarzian()
        : std::runtime_error("Schwarzian derivative undefined at a critical point") {}
};

inline double schwarzian_g(double x, const VectorFieldParams& params) {
    double gp = g_prime(x, params);
    if (std::fabs(gp) < 1e-6) throw undefined_schwarzian();
    double r2 = g_second(x, params) / gp;
    return g_third(x, params) / gp - 1.5 * r2 * r2;
}

inline std::pair<double, double> jacobian_eigs_at_origin(const VectorFieldParams& params) {
    return {stability_R(-2.0 * params.h), stability_R(-params.lambda_stiff * params.h)};
}

// central-difference Jacobian of F at the origin (cross-check of the
// analytic eigenvalues); step 1e-6
inline std::array<std::array<double, 2>, 2> fd_jacobian_at_origin(const VectorFieldParams& params) {
    const double d = 1e-6;
    auto col = [&](double e1, double e2) {
        Point2 plus = heun_map({e1 * d, e2 * d}, params);
        Point2 minus = heun_map({-e1 * d, -e2 * d}, params);
        return std::array<double, 2>{(plus.x1 - minus.x1) / (2.0 * d),
                                     (plus.x2 - minus.x2) / (2.0 * d)};
    };
    auto c1 = col(1.0, 0.0);
    auto c2 = col(0.0, 1.0);
    return {{{c1[0], c2[0]}, {c1[1], c2[1]}}};
}

// linear decay estimate on the x1 coordinate: one step must keep
// 0 <= F(p).x1 <= 0.83 x1 on the verified domain
inline bool contraction_bound_check(const Point2& p, const VectorFieldParams& params) {
    double fx1 = heun_map(p, params).x1;
    return 0.0 <= fx1 && fx1 <= 0.83 * p.x1;
}

}  // namespace capdyn::dynamics
