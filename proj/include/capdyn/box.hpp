#pragma once
// Axis-aligned rectangles over Interval, plus the exact-endpoint key used to
// deduplicate cloud members and the threshold bisection splitter.

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "capdyn/interval.hpp"

namespace capdyn {

struct Box {
    Interval x1;
    Interval x2;
};

// Bitwise endpoint quadruple: two boxes collide iff all four endpoints are
// bit-identical (intervals normalize -0 away, so 0 is unambiguous).
struct BoxKey {
    double x1_lo, x1_hi, x2_lo, x2_hi;
};

inline BoxKey box_key(const Box& b) {
    return {b.x1.lo, b.x1.hi, b.x2.lo, b.x2.hi};
}

namespace detail {
// order-preserving unsigned encoding of a double (total order, bit-exact)
inline std::uint64_t ordered_bits(double d) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(d);
    return (u & 0x8000000000000000ull) ? ~u : (u | 0x8000000000000000ull);
}
}  // namespace detail

inline bool key_equal(const BoxKey& a, const BoxKey& b) {
    using detail::ordered_bits;
    return ordered_bits(a.x1_lo) == ordered_bits(b.x1_lo) &&
           ordered_bits(a.x1_hi) == ordered_bits(b.x1_hi) &&
           ordered_bits(a.x2_lo) == ordered_bits(b.x2_lo) &&
           ordered_bits(a.x2_hi) == ordered_bits(b.x2_hi);
}

inline bool key_less(const BoxKey& a, const BoxKey& b) {
    using detail::ordered_bits;
    if (ordered_bits(a.x1_lo) != ordered_bits(b.x1_lo))
        return ordered_bits(a.x1_lo) < ordered_bits(b.x1_lo);
    if (ordered_bits(a.x1_hi) != ordered_bits(b.x1_hi))
        return ordered_bits(a.x1_hi) < ordered_bits(b.x1_hi);
    if (ordered_bits(a.x2_lo) != ordered_bits(b.x2_lo))
        return ordered_bits(a.x2_lo) < ordered_bits(b.x2_lo);
    return ordered_bits(a.x2_hi) < ordered_bits(b.x2_hi);
}

inline bool box_less(const Box& a, const Box& b) {
    return key_less(box_key(a), box_key(b));
}

inline bool box_same(const Box& a, const Box& b) {
    return key_equal(box_key(a), box_key(b));
}

inline std::pair<double, double> box_width(const Box& b) {
    return {iv_width(b.x1), iv_width(b.x2)};
}

inline std::pair<double, double> box_mid(const Box& b) {
    return {iv_mid(b.x1), iv_mid(b.x2)};
}

inline bool box_contains(const Box& b, double x1, double x2) {
    return iv_contains(b.x1, x1) && iv_contains(b.x2, x2);
}

inline Box box_hull(const Box& a, const Box& b) {
    return {iv_hull(a.x1, b.x1), iv_hull(a.x2, b.x2)};
}

// Bisect until both widths fall under their thresholds, x1 direction first,
// visiting the pieces in LIFO order without materializing them. emit returns
// false to stop the traversal early (the return value propagates).
//
// NOTE: threshold comparisons use the plain round-to-nearest difference, not
// the outward-rounded iv_width; the cloud counts are measured against a
// splitter with exactly these comparisons, and soundness does not depend on
// them (pieces tile the input exactly either way, since midpoints are shared
// machine numbers).
template <class F>
inline bool box_split_visit(const Box& b, double t1, double t2, F&& emit) {
    std::vector<Box> stack{b};
    while (!stack.empty()) {
        Box cur = stack.back();
        stack.pop_back();
        double w1 = cur.x1.hi - cur.x1.lo;
        double w2 = cur.x2.hi - cur.x2.lo;
        if (w1 <= t1 && w2 <= t2) {
            if (!emit(cur)) return false;
        } else if (w1 > t1) {
            double m = iv_mid(cur.x1);
            if (m <= cur.x1.lo || m >= cur.x1.hi) {  // cannot shrink further
                if (!emit(cur)) return false;
                continue;
            }
            stack.push_back({{cur.x1.lo, m}, cur.x2});
            stack.push_back({{m, cur.x1.hi}, cur.x2});
        } else {
            double m = iv_mid(cur.x2);
            if (m <= cur.x2.lo || m >= cur.x2.hi) {
                if (!emit(cur)) return false;
                continue;
            }
            stack.push_back({cur.x1, {cur.x2.lo, m}});
            stack.push_back({cur.x1, {m, cur.x2.hi}});
        }
    }
    return true;
}

inline std::vector<Box> box_split(const Box& b, double t1, double t2) {
    std::vector<Box> out;
    box_split_visit(b, t1, t2, [&](const Box& piece) {
        out.push_back(piece);
        return true;
    });
    return out;
}

}  // namespace capdyn
