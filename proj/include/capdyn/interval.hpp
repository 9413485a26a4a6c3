#pragma once
// Outward-rounded interval arithmetic on IEEE-754 doubles.
//
// Directed rounding is recovered from round-to-nearest through error-free
// transformations: TwoSum yields the exact residual of +/- and an FMA yields
// the exact residual of * and /. An endpoint is nudged one step toward the
// required infinity only when the native result was inexact in that
// direction, so operations that are exact in binary stay exact and every
// endpoint is the correctly rounded directed value. Results outside the
// normal range are recomputed at mantissa scale, where the residuals are
// exact again, and rescaled through an exact directed power-of-two scaler,
// so overflow saturates inward to +/-DBL_MAX and subnormal endpoints land
// on the 2^-1074 grid exactly as a directed IEEE operation would. No
// rounding-mode switches are involved; everything is thread-safe by
// construction.

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#if defined(__FAST_MATH__)
#error "interval arithmetic requires strict IEEE semantics; remove -ffast-math"
#endif

namespace capdyn {

struct interval_error : std::runtime_error {
    explicit interval_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct divide_by_zero_interval : interval_error {
    divide_by_zero_interval() : interval_error("division by an interval containing zero") {}
};

// Closed interval [lo, hi] with finite endpoints. Negative zeros are
// normalized to +0 on construction so endpoint identity is bitwise.
struct Interval {
    double lo;
    double hi;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double step_down(double x) { return std::nextafter(x, -kInf); }
inline double step_up(double x)   { return std::nextafter(x,  kInf); }

// Exact residual of s = fl(a + b), Dekker Fast2Sum on magnitude-ordered
// operands. The ordered form keeps every intermediate finite for finite s:
// the symmetric Knuth TwoSum can overflow its correction terms when s lands
// in the top binade and a, b have opposite signs.
inline double two_sum_err(double a, double b, double s) {
    double hi = a, lo = b;
    if (std::fabs(hi) < std::fabs(lo)) { hi = b; lo = a; }
    return lo - (s - hi);
}

// Exact directed rounding of v * 2^k onto the double grid. A power-of-two
// scale is exact while the result stays normal; past DBL_MAX it saturates
// toward the requested infinity (the inward direction lands on +/-DBL_MAX),
// and inside the subnormal range the value is floored/ceiled onto the fixed
// 2^-1074 quantum by exact integer arithmetic. Every double at the target
// scale is also a double at the working scale, so applying this after a
// correctly rounded 53-bit step keeps the composite correctly rounded.
inline double ldexp_dir(double v, int k, bool up) {
    if (v == 0.0) return 0.0;
    int e = 0;
    double f = std::frexp(v, &e);  // v = f * 2^e with |f| in [0.5, 1)
    long t = static_cast<long>(e) + k;
    if (t > 1024) {  // |true value| >= 2^1024 > DBL_MAX
        if (up) return v > 0.0 ? kInf : -DBL_MAX;
        return v > 0.0 ? DBL_MAX : -kInf;
    }
    if (t >= -1021) return std::ldexp(f, static_cast<int>(t));  // normal: exact
    int shift = static_cast<int>(t) + 1074;  // align to the subnormal quantum
    if (shift <= 0) {                        // 0 < |true value| < 2^-1074
        if (up) return v > 0.0 ? std::numeric_limits<double>::denorm_min() : 0.0;
        return v > 0.0 ? 0.0 : -std::numeric_limits<double>::denorm_min();
    }
    double u = std::ldexp(f, shift);  // |u| < 2^53, so the scale is exact
    double w = up ? std::ceil(u) : std::floor(u);
    return std::ldexp(w, -1074);  // an integer count of quanta: exact
}

inline double add_rd(double a, double b) {
    double s = a + b;
    if (std::isinf(s)) return s > 0.0 ? DBL_MAX : s;  // finite inputs: true sum exceeds the grid
    return two_sum_err(a, b, s) < 0.0 ? step_down(s) : s;
}
inline double add_ru(double a, double b) {
    double s = a + b;
    if (std::isinf(s)) return s < 0.0 ? -DBL_MAX : s;
    return two_sum_err(a, b, s) > 0.0 ? step_up(s) : s;
}
inline double sub_rd(double a, double b) { return add_rd(a, -b); }
inline double sub_ru(double a, double b) { return add_ru(a, -b); }

// The FMA residual of a product is exact only while the residual itself is
// representable: the exact product lives on a grid of 2^(Ea+Eb-104), so
// |r| >= 2^-968 witnesses that the grid clears the subnormal quantum. Below
// that the factors are split into mantissas in [0.5, 1), whose product has
// an exact residual again, and the collected binary exponent is reapplied
// through ldexp_dir. Overflow needs no case of its own: the FMA against an
// infinite native result keeps its sign, and stepping inward from infinity
// lands on +/-DBL_MAX.
inline double mul_rd(double a, double b) {
    double r = a * b;
    if (std::fabs(r) >= 0x1p-968)
        return std::fma(a, b, -r) < 0.0 ? step_down(r) : r;
    if (a == 0.0 || b == 0.0) return 0.0;
    int ea = 0, eb = 0;
    double fa = std::frexp(a, &ea);
    double fb = std::frexp(b, &eb);
    double p = fa * fb;  // in +/-[0.25, 1): normal
    double s = std::fma(fa, fb, -p) < 0.0 ? step_down(p) : p;
    return ldexp_dir(s, ea + eb, false);
}
inline double mul_ru(double a, double b) {
    double r = a * b;
    if (std::fabs(r) >= 0x1p-968)
        return std::fma(a, b, -r) > 0.0 ? step_up(r) : r;
    if (a == 0.0 || b == 0.0) return 0.0;
    int ea = 0, eb = 0;
    double fa = std::frexp(a, &ea);
    double fb = std::frexp(b, &eb);
    double p = fa * fb;
    double s = std::fma(fa, fb, -p) > 0.0 ? step_up(p) : p;
    return ldexp_dir(s, ea + eb, true);
}

// exact quotient = q - e/b with e = fl(q*b - a) computed exactly by FMA;
// the true value lies below q iff e and b share a sign. The residual is
// representable whenever |a| >= 2^-968 (the grid of q*b then clears the
// subnormal quantum, even for subnormal q); tinier dividends are recomputed
// at mantissa scale and rescaled. Quotients that overflow ride the normal
// path, whose inward step from infinity lands on +/-DBL_MAX.
inline double div_rd(double a, double b) {
    double q = a / b;
    if (a == 0.0) return 0.0;  // exact: b is nonzero here
    if (std::fabs(a) >= 0x1p-968) {
        double e = std::fma(q, b, -a);
        bool low = (e != 0.0) && ((e > 0.0) == (b > 0.0));
        return low ? step_down(q) : q;
    }
    int ea = 0, eb = 0;
    double fa = std::frexp(a, &ea);
    double fb = std::frexp(b, &eb);
    double p = fa / fb;  // in +/-[0.5, 2): normal
    double e = std::fma(p, fb, -fa);
    bool low = (e != 0.0) && ((e > 0.0) == (fb > 0.0));
    double s = low ? step_down(p) : p;
    return ldexp_dir(s, ea - eb, false);
}
inline double div_ru(double a, double b) {
    double q = a / b;
    if (a == 0.0) return 0.0;
    if (std::fabs(a) >= 0x1p-968) {
        double e = std::fma(q, b, -a);
        bool high = (e != 0.0) && ((e > 0.0) != (b > 0.0));
        return high ? step_up(q) : q;
    }
    int ea = 0, eb = 0;
    double fa = std::frexp(a, &ea);
    double fb = std::frexp(b, &eb);
    double p = fa / fb;
    double e = std::fma(p, fb, -fa);
    bool high = (e != 0.0) && ((e > 0.0) != (fb > 0.0));
    double s = high ? step_up(p) : p;
    return ldexp_dir(s, ea - eb, true);
}

struct dd {
    double hi;
    double lo;
};

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

// x^3 and x^4 through a double-double expansion at mantissa scale: x is
// split as m * 2^e with |m| in [0.5, 1), so every partial product below is
// normal and the FMA residuals are exact, then the collected exponent is
// reapplied through ldexp_dir (which also covers overflow and the subnormal
// grid). The leading pair is exact; sub-leading terms are accumulated in
// plain arithmetic and their rounding slack is dominated by a 2^-100
// relative sliver, far below half an ulp, so a single conditional step
// recovers the directed value. Exact powers take the fast path untouched.
inline double pow3_dir(double x, bool up) {
    if (x == 0.0) return 0.0;
    int e = 0;
    double m = std::frexp(x, &e);
    dd p1 = two_prod(m, m);
    dd p2 = two_prod(p1.hi, m);  // |p2.hi| in [0.125, 1)
    double s = p2.hi;
    if (p1.lo != 0.0 || p2.lo != 0.0) {
        double tail = p2.lo + p1.lo * m;
        s = p2.hi + tail;
        double r = two_sum_err(p2.hi, tail, s);
        double delta = std::ldexp(std::fabs(s), -100);
        if (up) s = (r > -delta) ? step_up(s) : s;
        else    s = (r <  delta) ? step_down(s) : s;
    }
    return ldexp_dir(s, 3 * e, up);
}

inline double pow4_dir(double x, bool up) {
    if (x == 0.0) return 0.0;
    int e = 0;
    double m = std::frexp(x, &e);
    dd p1 = two_prod(m, m);
    dd p2 = two_prod(p1.hi, p1.hi);  // p2.hi in [0.0625, 1)
    double s = p2.hi;
    if (p1.lo != 0.0 || p2.lo != 0.0) {
        double tail = p2.lo + 2.0 * (p1.hi * p1.lo);
        s = p2.hi + tail;
        double r = two_sum_err(p2.hi, tail, s);
        double delta = std::ldexp(std::fabs(s), -100);
        if (up) s = (r > -delta) ? step_up(s) : s;
        else    s = (r <  delta) ? step_down(s) : s;
    }
    return ldexp_dir(s, 4 * e, up);
}

inline double norm_zero(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace detail

inline Interval make_interval(double lo, double hi) {
    lo = detail::norm_zero(lo);
    hi = detail::norm_zero(hi);
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw interval_error("invalid interval endpoints [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
    return {lo, hi};
}

inline Interval iv_point(double x) { return make_interval(x, x); }

inline Interval iv_add(const Interval& a, const Interval& b) {
    return make_interval(detail::add_rd(a.lo, b.lo), detail::add_ru(a.hi, b.hi));
}

inline Interval iv_sub(const Interval& a, const Interval& b) {
    return make_interval(detail::sub_rd(a.lo, b.hi), detail::sub_ru(a.hi, b.lo));
}

inline Interval iv_neg(const Interval& a) {
    return make_interval(-a.hi, -a.lo);
}

inline Interval iv_mul(const Interval& a, const Interval& b) {
    using namespace detail;
    double lo = mul_rd(a.lo, b.lo);
    lo = std::fmin(lo, mul_rd(a.lo, b.hi));
    lo = std::fmin(lo, mul_rd(a.hi, b.lo));
    lo = std::fmin(lo, mul_rd(a.hi, b.hi));
    double hi = mul_ru(a.lo, b.lo);
    hi = std::fmax(hi, mul_ru(a.lo, b.hi));
    hi = std::fmax(hi, mul_ru(a.hi, b.lo));
    hi = std::fmax(hi, mul_ru(a.hi, b.hi));
    return make_interval(lo, hi);
}

inline Interval iv_div(const Interval& a, const Interval& b) {
    using namespace detail;
    if (b.lo <= 0.0 && b.hi >= 0.0) throw divide_by_zero_interval();
    double lo = div_rd(a.lo, b.lo);
    lo = std::fmin(lo, div_rd(a.lo, b.hi));
    lo = std::fmin(lo, div_rd(a.hi, b.lo));
    lo = std::fmin(lo, div_rd(a.hi, b.hi));
    double hi = div_ru(a.lo, b.lo);
    hi = std::fmax(hi, div_ru(a.lo, b.hi));
    hi = std::fmax(hi, div_ru(a.hi, b.lo));
    hi = std::fmax(hi, div_ru(a.hi, b.hi));
    return make_interval(lo, hi);
}

// tight integer powers, n in {2,3,4}; even powers of a zero-straddling
// interval bottom out at exactly 0 instead of the sloppy product bound
inline Interval iv_powi(const Interval& a, int n) {
    using namespace detail;
    switch (n) {
    case 2: {
        if (a.lo >= 0.0) return make_interval(mul_rd(a.lo, a.lo), mul_ru(a.hi, a.hi));
        if (a.hi <= 0.0) return make_interval(mul_rd(a.hi, a.hi), mul_ru(a.lo, a.lo));
        return make_interval(0.0, std::fmax(mul_ru(a.lo, a.lo), mul_ru(a.hi, a.hi)));
    }
    case 3:
        return make_interval(pow3_dir(a.lo, false), pow3_dir(a.hi, true));
    case 4: {
        if (a.lo >= 0.0) return make_interval(pow4_dir(a.lo, false), pow4_dir(a.hi, true));
        if (a.hi <= 0.0) return make_interval(pow4_dir(a.hi, false), pow4_dir(a.lo, true));
        return make_interval(0.0, std::fmax(pow4_dir(a.lo, true), pow4_dir(a.hi, true)));
    }
    default:
        throw interval_error("iv_powi supports exponents 2, 3, 4");
    }
}

inline Interval iv_scale(const Interval& a, double c) {
    using namespace detail;
    if (!std::isfinite(c)) throw interval_error("non-finite scale factor");
    if (c == 0.0) return {0.0, 0.0};
    if (c > 0.0) return make_interval(mul_rd(c, a.lo), mul_ru(c, a.hi));
    return make_interval(mul_rd(c, a.hi), mul_ru(c, a.lo));
}

inline double iv_width(const Interval& a) { return detail::sub_ru(a.hi, a.lo); }

inline double iv_mid(const Interval& a) {
    double m = 0.5 * (a.lo + a.hi);
    if (!std::isfinite(m)) m = a.lo + 0.5 * (a.hi - a.lo);
    if (m < a.lo) m = a.lo;
    if (m > a.hi) m = a.hi;
    return m;
}

inline double iv_mag(const Interval& a) { return std::fmax(std::fabs(a.lo), std::fabs(a.hi)); }

inline bool iv_contains(const Interval& a, double x) { return a.lo <= x && x <= a.hi; }

inline bool iv_subset(const Interval& inner, const Interval& outer) {
    return outer.lo <= inner.lo && inner.hi <= outer.hi;
}

inline Interval iv_hull(const Interval& a, const Interval& b) {
    return make_interval(std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi));
}

// Conservative decimal parsing: the returned Interval contains the exact
// decimal value of the literal. Digits are absorbed in 15-digit chunks
// (exact in double), then the decimal exponent is applied by stepwise
// outward-rounded multiplication/division by powers of ten, so the result
// is within one ulp of the minimal enclosure for any practical literal.
inline Interval parse_decimal_interval(const std::string& text) {
    const char* p = text.c_str();
    const char* end = p + text.size();
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    bool negative = false;
    if (p < end && (*p == '+' || *p == '-')) negative = (*p++ == '-');

    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; p < end; ++p) {
        if (*p >= '0' && *p <= '9') {
            digits.push_back(*p);
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else if (*p == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    long exp10 = 0;
    if (p < end && (*p == 'e' || *p == 'E')) {
        ++p;
        bool eneg = false;
        if (p < end && (*p == '+' || *p == '-')) eneg = (*p++ == '-');
        if (p == end || *p < '0' || *p > '9')
            throw interval_error("malformed exponent in decimal literal '" + text + "'");
        long ev = 0;
        while (p < end && *p >= '0' && *p <= '9') {
            ev = ev * 10 + (*p++ - '0');
            if (ev > 100000) throw interval_error("exponent out of range in '" + text + "'");
        }
        exp10 = eneg ? -ev : ev;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (!seen_digit || p != end)
        throw interval_error("malformed decimal literal '" + text + "'");

    Interval x{0.0, 0.0};
    for (std::size_t i = 0; i < digits.size();) {
        std::size_t take = std::min<std::size_t>(15, digits.size() - i);
        double chunk = 0.0, base = 1.0;
        for (std::size_t k = 0; k < take; ++k) {
            chunk = chunk * 10.0 + (digits[i + k] - '0');
            base *= 10.0;
        }
        x = iv_add(iv_mul(x, iv_point(base)), iv_point(chunk));
        i += take;
    }

    long shift = exp10 - frac_digits;
    while (shift > 0) {
        long m = shift > 15 ? 15 : shift;
        double f = 1.0;
        for (long k = 0; k < m; ++k) f *= 10.0;
        x = iv_mul(x, iv_point(f));
        shift -= m;
    }
    while (shift < 0) {
        long m = shift < -15 ? 15 : -shift;
        double f = 1.0;
        for (long k = 0; k < m; ++k) f *= 10.0;
        x = iv_div(x, iv_point(f));
        shift += m;
    }
    return negative ? iv_neg(x) : x;
}

}  // namespace capdyn
