#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "capdyn/box.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace capdyn;

namespace {

// exact tiling check: pieces must form a full grid I x J of consecutive
// intervals chaining across each axis of the parent
void check_tiling(const Box& parent, std::vector<Box> pieces) {
    auto cmp = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
        return a < b;
    };
    std::set<std::pair<double, double>, decltype(cmp)> xs(cmp), ys(cmp);
    for (const Box& p : pieces) {
        xs.insert({p.x1.lo, p.x1.hi});
        ys.insert({p.x2.lo, p.x2.hi});
    }
    REQUIRE(pieces.size() == xs.size() * ys.size());

    auto check_chain = [](const auto& segs, double lo, double hi) {
        double at = lo;
        for (const auto& [a, b] : segs) {
            CHECK(a == at);
            if (lo < hi)
                CHECK(a < b);  // a degenerate axis keeps its single point
            else
                CHECK(a == b);
            at = b;
        }
        CHECK(at == hi);
    };
    check_chain(xs, parent.x1.lo, parent.x1.hi);
    check_chain(ys, parent.x2.lo, parent.x2.hi);

    // no duplicate cells
    std::sort(pieces.begin(), pieces.end(), box_less);
    CHECK(std::adjacent_find(pieces.begin(), pieces.end(), box_same) == pieces.end());
}

}  // namespace

TEST_CASE("box keys are bitwise and ignore how zero was spelled") {
    Box a{make_interval(-0.0, 1.0), make_interval(0.0, 2.0)};
    Box b{make_interval(0.0, 1.0), make_interval(-0.0, 2.0)};
    CHECK(box_same(a, b));
    CHECK(key_equal(box_key(a), box_key(b)));
    CHECK(!key_less(box_key(a), box_key(b)));
    CHECK(!key_less(box_key(b), box_key(a)));

    Box c{make_interval(0.0, 1.0), make_interval(0.0, std::nextafter(2.0, 3.0))};
    CHECK(!box_same(a, c));
    CHECK(key_less(box_key(a), box_key(c)) != key_less(box_key(c), box_key(a)));
}

TEST_CASE("ordered_bits preserves the numeric order of finite doubles") {
    std::vector<double> vals = {-1e300, -1.0, -1e-300, -std::numeric_limits<double>::denorm_min(),
                                0.0, std::numeric_limits<double>::denorm_min(), 1e-300, 1.0, 1e300};
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        CHECK(detail::ordered_bits(vals[i]) < detail::ordered_bits(vals[i + 1]));
}

TEST_CASE("box_less sorts and dedups a random cloud consistently") {
    std::mt19937_64 rng(0xb0cull);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::vector<Box> cloud;
    for (int i = 0; i < 500; ++i) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        cloud.push_back({make_interval(std::fmin(a, b), std::fmax(a, b)),
                         make_interval(std::fmin(c, d), std::fmax(c, d))});
    }
    // force duplicates
    for (int i = 0; i < 100; ++i) cloud.push_back(cloud[static_cast<std::size_t>(rng() % 500)]);

    std::sort(cloud.begin(), cloud.end(), box_less);
    CHECK(std::is_sorted(cloud.begin(), cloud.end(), box_less));
    auto end = std::unique(cloud.begin(), cloud.end(), box_same);
    cloud.erase(end, cloud.end());
    CHECK(std::adjacent_find(cloud.begin(), cloud.end(), box_same) == cloud.end());
    for (std::size_t i = 0; i + 1 < cloud.size(); ++i)
        CHECK(box_less(cloud[i], cloud[i + 1]));
}

TEST_CASE("box helper operations") {
    Box b{make_interval(0.0, 1.0), make_interval(2.0, 2.0)};
    auto [w1, w2] = box_width(b);
    CHECK(w1 == 1.0);
    CHECK(w2 == 0.0);

    CHECK(box_contains({make_interval(0.0, 1.0), make_interval(0.0, 1.0)}, 1.0, 1.0));
    CHECK(box_contains({make_interval(0.0, 1.0), make_interval(0.0, 1.0)}, 0.0, 0.5));
    CHECK(!box_contains({make_interval(0.0, 1.0), make_interval(0.0, 1.0)}, 1.0, 1.5));

    Box h = box_hull({make_interval(0.0, 1.0), make_interval(0.0, 1.0)},
                     {make_interval(2.0, 3.0), make_interval(0.0, 1.0)});
    CHECK(h.x1.lo == 0.0);
    CHECK(h.x1.hi == 3.0);
    CHECK(h.x2.lo == 0.0);
    CHECK(h.x2.hi == 1.0);

    auto [m1, m2] = box_mid(b);
    CHECK(m1 == 0.5);
    CHECK(m2 == 2.0);
}

TEST_CASE("splitting a small box returns it untouched") {
    Box b{make_interval(0.0, 0.05), make_interval(0.0, 0.05)};
    auto out = box_split(b, 0.1, 0.1);
    REQUIRE(out.size() == 1);
    CHECK(box_same(out[0], b));
}

TEST_CASE("splitting bisects x1 first and visits pieces in LIFO order") {
    Box b{make_interval(0.0, 0.2), make_interval(0.0, 0.05)};
    auto out = box_split(b, 0.1, 0.1);
    REQUIRE(out.size() == 2);
    // the upper half is pushed last, so it is emitted first
    CHECK(out[0].x1.lo == 0.1);
    CHECK(out[0].x1.hi == 0.2);
    CHECK(out[1].x1.lo == 0.0);
    CHECK(out[1].x1.hi == 0.1);
    CHECK(out[0].x2.lo == 0.0);
    CHECK(out[0].x2.hi == 0.05);
}

TEST_CASE("the 0.44 square splits into a 64-cell grid") {
    Box b{make_interval(0.0, 0.44), make_interval(0.0, 0.44)};
    auto out = box_split(b, 0.1, 0.1);
    // bisection halves 0.44 three times per axis before reaching <= 0.1
    REQUIRE(out.size() == 64);
    for (const Box& p : out) {
        CHECK(p.x1.hi - p.x1.lo <= 0.1);
        CHECK(p.x2.hi - p.x2.lo <= 0.1);
    }
    check_tiling(b, out);
}

TEST_CASE("a degenerate x1 splits along x2 only") {
    Box b{make_interval(5.0, 5.0), make_interval(0.0, 0.35)};
    auto out = box_split(b, 0.1, 0.1);
    REQUIRE(out.size() == 4);
    for (const Box& p : out) {
        CHECK(p.x1.lo == 5.0);
        CHECK(p.x1.hi == 5.0);
        CHECK(p.x2.hi - p.x2.lo <= 0.1);
    }
    check_tiling(b, out);
}

TEST_CASE("random boxes split into exact grid tilings") {
    std::mt19937_64 rng(0x7117ull);
    std::uniform_real_distribution<double> lo1(0.0, 2.0), lo2(0.0, 9.0), w(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double a = lo1(rng), c = lo2(rng);
        Box b{make_interval(a, a + w(rng)), make_interval(c, c + w(rng))};
        auto out = box_split(b, 0.1, 0.1);
        CHECK(!out.empty());
        for (const Box& p : out) {
            CHECK(p.x1.hi - p.x1.lo <= 0.1);
            CHECK(p.x2.hi - p.x2.lo <= 0.1);
        }
        check_tiling(b, out);
    }
}

TEST_CASE("visitors can stop a split early") {
    Box b{make_interval(0.0, 0.44), make_interval(0.0, 0.44)};
    std::size_t seen = 0;
    bool finished = box_split_visit(b, 0.1, 0.1, [&](const Box&) { return ++seen < 10; });
    CHECK(!finished);
    CHECK(seen == 10);

    seen = 0;
    finished = box_split_visit(b, 0.1, 0.1, [&](const Box&) {
        ++seen;
        return true;
    });
    CHECK(finished);
    CHECK(seen == 64);
}

TEST_CASE("an unsplittable sliver is emitted as-is instead of looping") {
    double lo = 1.0, hi = std::nextafter(1.0, 2.0);
    Box b{make_interval(lo, hi), make_interval(0.0, 0.0)};
    auto out = box_split(b, 1e-300, 0.1);
    REQUIRE(out.size() == 1);
    CHECK(box_same(out[0], b));
}
