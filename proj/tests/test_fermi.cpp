#include "ac/fermi.hpp"

#include "ac/errors.hpp"
#include "ac/leaf.hpp"
#include "ac/profile.hpp"

#include <doctest.h>

#include <cmath>

using namespace ac;

namespace {

FermiChart simons_line_chart(double l_max = 12.0) {
    return build_chart(make_cone_line_leaf(make_cone(4, 4), l_max));
}

// min distance from p to the sampled polyline (segment distances)
double polyline_distance(const FermiChart& ch, Point2 p) {
    double best = 1e300;
    for (std::size_t k = 0; k + 1 < ch.size(); ++k) {
        double ax = ch.r[k], ay = ch.s[k];
        double bx = ch.r[k + 1], by = ch.s[k + 1];
        double vx = bx - ax, vy = by - ay;
        double t = ((p.r - ax) * vx + (p.s - ay) * vy) / (vx * vx + vy * vy);
        t = std::clamp(t, 0.0, 1.0);
        double dx = p.r - (ax + t * vx), dy = p.s - (ay + t * vy);
        best = std::min(best, std::hypot(dx, dy));
    }
    return best;
}

} // namespace

TEST_CASE("straight chart along s = r") {
    FermiChart ch = simons_line_chart();
    const double rt2 = std::sqrt(2.0);

    FermiCoords fc = to_fermi(ch, {1.0, 3.0});
    CHECK(fc.l == doctest::Approx(2.0 * rt2).epsilon(1e-10));
    CHECK(fc.t == doctest::Approx(rt2).epsilon(1e-10));

    Point2 p = from_fermi(ch, 2.0 * rt2, rt2);
    CHECK(p.r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.s == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("chart normals are unit and oriented upward") {
    LeafCurve leaf = solve_leaf(make_cone(4, 4), '+', 1.0, 30.0);
    FermiChart ch = build_chart(leaf);
    for (std::size_t k = 0; k < ch.size(); k += 533) {
        CHECK(std::hypot(ch.nr[k], ch.ns[k]) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ch.ns[k] > 0.0);  // toward increasing s
    }
}

TEST_CASE("round trip and orientation on a curved leaf") {
    LeafCurve leaf = solve_leaf(make_cone(4, 4), '+', 1.0, 40.0);
    FermiChart ch = build_chart(leaf);

    for (double l : {2.0, 7.0, 21.0, 44.0}) {
        for (double t : {0.0, 0.4, -0.4, 0.9}) {
            if (std::abs(t) >= ch.band_at(l)) continue;
            Point2 p = from_fermi(ch, l, t);
            FermiCoords fc = to_fermi(ch, p);
            CHECK(std::abs(fc.l - l) < 1e-8);
            CHECK(std::abs(fc.t - t) < 1e-8);
        }
        // orientation: +eps on the nu side
        Point2 nu = ch.normal_at(l);
        Point2 base = ch.point_at(l);
        CHECK(to_fermi(ch, {base.r + 0.01 * nu.r, base.s + 0.01 * nu.s}).t > 0.0);
        CHECK(to_fermi(ch, {base.r - 0.01 * nu.r, base.s - 0.01 * nu.s}).t < 0.0);
    }
}

TEST_CASE("signed distance agrees with the discretized leaf") {
    LeafCurve leaf = solve_leaf(make_cone(4, 4), '+', 1.0, 30.0);
    FermiChart ch = build_chart(leaf);
    for (double l : {3.0, 11.0, 26.0}) {
        for (double t : {0.3, -0.35, 0.8}) {
            Point2 p = from_fermi(ch, l, t);
            FermiCoords fc = to_fermi(ch, p);
            CHECK(std::abs(std::abs(fc.t) - polyline_distance(ch, p)) < 1e-6);
        }
    }
}

namespace {

// circular arc s = cs - sqrt(R^2 - x^2): curvature 1/R everywhere, so the
// validity band is exactly 0.9 R
LeafCurve circle_arc(double R, double cs) {
    LeafCurve arc;
    arc.cone = make_cone(4, 4);
    arc.side = '+';
    arc.x0 = -2.0;
    arc.dx = 0.002;
    std::size_t n = static_cast<std::size_t>(4.0 / arc.dx) + 1;
    arc.g.resize(n);
    arc.dg.resize(n);
    arc.d2g.resize(n);
    arc.arclen.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double x = arc.x(k);
        double root = std::sqrt(R * R - x * x);
        arc.g[k] = cs - root;
        arc.dg[k] = x / root;
        arc.d2g[k] = R * R / (root * root * root);
        arc.arclen[k] = R * (std::asin(x / R) - std::asin(arc.x0 / R));
    }
    return arc;
}

} // namespace

TEST_CASE("validity band") {
    LeafCurve leaf = solve_leaf(make_cone(4, 4), '+', 1.0, 30.0);
    FermiChart ch = build_chart(leaf);
    // highest curvature sits at the axis start: band ~ 0.9 / f''(0)
    CHECK(ch.band_at(ch.l0) == doctest::Approx(0.9 / 0.75).epsilon(1e-3));
    CHECK_THROWS_AS(from_fermi(ch, 0.5, 5.0), Error);
    CHECK_THROWS_AS(from_fermi(ch, -3.0, 0.0), Error);  // off the range

    FermiChart arc = build_chart(circle_arc(3.0, 10.0));
    CHECK(arc.band_at(0.0) == doctest::Approx(2.7).epsilon(1e-6));
    CHECK_THROWS_AS(to_fermi(arc, {0.0, 9.85}), Error);  // t = 2.85 beyond the band
}

TEST_CASE("ambiguous projection is reported") {
    // the arc center is equidistant from every sample
    FermiChart ch = build_chart(circle_arc(3.0, 10.0));
    CHECK_THROWS_AS(to_fermi(ch, {0.0, 10.0}), Error);
}

TEST_CASE("sector cutoff") {
    CHECK(sector_cutoff({1.0, 1.0}, 0.1) == doctest::Approx(1.0));
    CHECK(sector_cutoff({1.0, 0.0}, 0.1) == 0.0);
    CHECK(sector_cutoff({0.0, 1.0}, 0.1) == 0.0);
    double mid = sector_cutoff({1.0, std::tan(0.5 * std::atan(0.1))}, 0.1);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // monotone through the transition
    double lo = sector_cutoff({1.0, 0.02}, 0.1);
    double hi = sector_cutoff({1.0, 0.08}, 0.1);
    CHECK(lo < hi);
}

TEST_CASE("boundary trace on the straight Simons chart") {
    FermiChart ch = simons_line_chart(40.0);
    Profile1D eta = solve_corrector(ProfileKind::eta);
    TraceParams params{&eta, nullptr, 0.1};

    // on the cone line the trace vanishes: H(0) = 0, eta(0) = 0
    Point2 onto = ch.point_at(10.0);
    CHECK(std::abs(boundary_trace(ch, params, onto)) < 1e-12);

    // saturation: 1 - H(8) = 2.4e-5, plus the small eta correction
    Point2 nu = ch.normal_at(10.0);
    Point2 up{onto.r + 8.0 * nu.r, onto.s + 8.0 * nu.s};
    CHECK(boundary_trace(ch, params, up) == doctest::Approx(1.0).epsilon(5e-5));
    Point2 up12{onto.r + 12.0 * nu.r, onto.s + 12.0 * nu.s};
    CHECK(boundary_trace(ch, params, up12) == doctest::Approx(1.0).epsilon(1e-6));

    // odd about the leaf inside the full-cutoff sector
    for (double tau : {0.25, 0.9, 2.0}) {
        Point2 a{onto.r + tau * nu.r, onto.s + tau * nu.s};
        Point2 b{onto.r - tau * nu.r, onto.s - tau * nu.s};
        CHECK(std::abs(boundary_trace(ch, params, a) + boundary_trace(ch, params, b)) < 1e-9);
    }

    // values stay strictly inside (-1, 1)
    Point2 far{onto.r + 30.0 * nu.r, onto.s + 30.0 * nu.s};
    CHECK(boundary_trace(ch, params, far) < 1.0);
    CHECK(boundary_trace(ch, params, far) >= 1.0 - 1e-8);
}

TEST_CASE("boundary trace with a xi shift") {
    LeafCurve leaf = solve_leaf(make_cone(3, 5), '+', 1.0, 40.0);
    FermiChart ch = build_chart(leaf);
    Profile1D eta = solve_corrector(ProfileKind::eta);

    RadialFunction xi;
    xi.l0 = 1.0;
    xi.dl = 0.05;
    xi.v.resize(2001);
    for (std::size_t k = 0; k < xi.v.size(); ++k) xi.v[k] = 0.3;  // constant shift
    xi.fill_derivatives();
    TraceParams params{&eta, &xi, 0.1};

    // the trace vanishes at t = xi (H(0) = 0, eta(0) = 0)
    double l = 20.0;
    Point2 nu = ch.normal_at(l);
    Point2 base = ch.point_at(l);
    Point2 shifted{base.r + 0.3 * nu.r, base.s + 0.3 * nu.s};
    CHECK(std::abs(boundary_trace(ch, params, shifted)) < 1e-10);
}

TEST_CASE("clamped projection continues beyond the band") {
    FermiChart arc = build_chart(circle_arc(3.0, 10.0));
    ClampedCoords cc = project_clamped(arc, {0.0, 9.9});  // t = 2.9 > band 2.7
    CHECK(cc.clamped);
    CHECK(cc.t == doctest::Approx(arc.band_at(cc.l)));

    // below the curved Simons leaf the projection is plain and negative
    LeafCurve leaf = solve_leaf(make_cone(4, 4), '+', 1.0, 40.0);
    FermiChart ch = build_chart(leaf);
    ClampedCoords below = project_clamped(ch, {6.0, 0.1});
    CHECK(!below.clamped);
    CHECK(below.t < -3.0);

    Profile1D eta = solve_corrector(ProfileKind::eta);
    TraceParams params{&eta, nullptr, 0.1};
    double v = boundary_trace(ch, params, {6.0, 0.1});
    CHECK(v < -0.99);
    CHECK(v > -1.0);
}

TEST_CASE("chart csv") {
    FermiChart ch = simons_line_chart();
    std::string csv = chart_csv(ch, 64);
    CHECK(csv.rfind("l,r,s,nu_r,nu_s,band\n", 0) == 0);
}
