#include "ac/nodal.hpp"

#include "ac/errors.hpp"
#include "ac/profile.hpp"

#include <doctest.h>

#include <cmath>

using namespace ac;

namespace {

Field2D plane_field(double len, double delta, double (*f)(double, double)) {
    Field2D fld = build_rectangle(len, len, delta, 1, 1);
    for (int m = 0; m < fld.ns; ++m)
        for (int k = 0; k < fld.nr; ++k)
            fld.u[fld.idx(k, m)] = f(fld.r_of(k), fld.s_of(m));
    return fld;
}

} // namespace

TEST_CASE("linear field has an exact nodal line") {
    Field2D f = plane_field(10.0, 0.1, [](double r, double s) { return s - r; });
    NodalCurve nodal = extract_nodal(f);
    CHECK(nodal.monotone);
    for (const Point2& p : nodal.samples) CHECK(std::abs(p.s - p.r) < 1e-12);
    CHECK(nodal.f_at(5.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("constructed heteroclinic field recovers the leaf") {
    ConeSpec c44 = make_cone(4, 4);
    LeafCurve leaf = solve_leaf(c44, '+', 1.0, 16.0);
    Field2D f = build_rectangle(12.0, 12.0, 0.1, 1, 1);
    for (int m = 0; m < f.ns; ++m)
        for (int k = 0; k < f.nr; ++k) {
            double r = f.r_of(k), s = f.s_of(m);
            double fr = leaf.s_at_r(r), fp = leaf.slope_at_r(r);
            f.u[f.idx(k, m)] = heteroclinic((s - fr) / std::hypot(1.0, fp));
        }
    NodalCurve nodal = extract_nodal(f);
    CHECK(nodal.monotone);
    double worst = 0.0;
    for (double r = 0.5; r <= 11.0; r += 0.37)
        worst = std::max(worst, std::abs(nodal.f_at(r) - leaf.s_at_r(r)));
    CHECK(worst < 5e-3);
}

TEST_CASE("degenerate fields are rejected") {
    Field2D flat = plane_field(5.0, 0.1, [](double, double) { return 0.5; });
    CHECK_THROWS_AS(extract_nodal(flat), Error);

    // two parallel zero lines -> two components, sizes reported
    Field2D two = plane_field(10.0, 0.1, [](double r, double s) {
        return (s - r - 2.0) * (s - r + 2.0);
    });
    bool threw = false;
    try {
        extract_nodal(two);
    } catch (const Error& e) {
        threw = true;
        CHECK(e.kind == ErrKind::geometry);
        CHECK(std::string(e.what()).find("2 disconnected") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("fermi height of synthetic nodal curves") {
    LeafCurve leaf = solve_leaf(make_cone(4, 4), '+', 1.0, 30.0);
    FermiChart chart = build_chart(leaf);

    NodalCurve on_leaf;
    NodalCurve shifted;
    for (double l = 1.0; l <= 35.0; l += 0.05) {
        if (l > chart.l_max() - 0.5) break;
        Point2 g = chart.point_at(l);
        Point2 nu = chart.normal_at(l);
        on_leaf.samples.push_back(g);
        shifted.samples.push_back({g.r + 0.3 * nu.r, g.s + 0.3 * nu.s});
    }
    FermiHeight h0 = fermi_height(chart, on_leaf);
    for (double v : h0.h.v) CHECK(std::abs(v) < 1e-8);

    FermiHeight h3 = fermi_height(chart, shifted);
    for (double v : h3.h.v) CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(h3.n_dropped == 0);
}

TEST_CASE("non-monotone nodal graphs are flagged") {
    // u = s - 2 - 0.2 (r-5)^2: the zero set dips and rises again
    Field2D f = plane_field(10.0, 0.1, [](double r, double s) {
        return s - 2.0 - 0.2 * (r - 5.0) * (r - 5.0);
    });
    NodalCurve nodal = extract_nodal(f);
    CHECK(!nodal.monotone);
    CHECK(nodal.monotone_violations > 0);
}

TEST_CASE("fermi_height rejects mostly out-of-band curves") {
    // circular arc: the band is 0.9 R everywhere, so t = 0.97 R is outside
    LeafCurve arc;
    arc.cone = make_cone(4, 4);
    arc.side = '+';
    arc.x0 = -2.0;
    arc.dx = 0.002;
    const double R = 3.0, cs = 10.0;
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
    FermiChart chart = build_chart(arc);
    NodalCurve far;
    for (double l = 0.3 * chart.l_max(); l <= 0.7 * chart.l_max(); l += 0.02) {
        Point2 g = chart.point_at(l);
        Point2 nu = chart.normal_at(l);
        far.samples.push_back({g.r + 0.97 * R * nu.r, g.s + 0.97 * R * nu.s});
    }
    CHECK_THROWS_AS(fermi_height(chart, far), Error);
}

TEST_CASE("fit_asymptotics synthetic recovery") {
    RadialFunction h;
    h.l0 = 5.0;
    h.dl = 0.05;
    h.v.resize(1501);
    for (std::size_t k = 0; k < h.v.size(); ++k) {
        double l = h.l(k);
        h.v[k] = 2.0 / (l * l) + 5.0 / (l * l * l);
    }
    h.fill_derivatives();
    AsymptoticFit fit = fit_asymptotics(h, {-2.0, -3.0}, 10.0, 70.0, 2.0);
    CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(fit.coefficients[1] == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(fit.residual_rms < 1e-10);
    CHECK(!fit.flagged);
}

TEST_CASE("fit_asymptotics flags a model mismatch") {
    // h = l^-3 ln l is not in the span of {l^-2, l^-3}
    RadialFunction h;
    h.l0 = 5.0;
    h.dl = 0.05;
    h.v.resize(1501);
    for (std::size_t k = 0; k < h.v.size(); ++k) {
        double l = h.l(k);
        h.v[k] = std::log(l) / (l * l * l);
    }
    h.fill_derivatives();
    AsymptoticFit fit = fit_asymptotics(h, {-2.0, -3.0}, 10.0, 70.0, 2.0);
    CHECK(fit.residual_rms > 1e-9);
    CHECK(fit.drift > 0.01);  // coefficients wander between window halves
}

TEST_CASE("fit_asymptotics window and conditioning guards") {
    RadialFunction h;
    h.l0 = 5.0;
    h.dl = 0.1;
    h.v.assign(501, 1.0);
    h.fill_derivatives();
    CHECK_THROWS_AS(fit_asymptotics(h, {-2.0, -3.0}, 10.0, 15.0, 2.0), Error);  // ratio < 2
    CHECK_THROWS_AS(fit_asymptotics(h, {-2.0, -3.0}, 10.0, 200.0, 2.0), Error); // outside range
    CHECK_THROWS_AS(fit_asymptotics(h, {-2.0, -2.0}, 10.0, 40.0, 2.0), Error);  // singular design
}

TEST_CASE("general cone expansion recovers synthetic coefficients") {
    ConeSpec c35 = make_cone(3, 5);
    NodalCurve nodal;
    std::size_t n = 2000;
    nodal.graph_r.resize(n);
    nodal.graph_s.resize(n);
    double m = std::sqrt(2.0);
    for (std::size_t k = 0; k < n; ++k) {
        double r = 5.0 + 60.0 * static_cast<double>(k) / static_cast<double>(n - 1);
        nodal.graph_r[k] = r;
        nodal.graph_s[k] = m * r + 0.7 / r + 0.2 * std::pow(r, c35.alpha_plus);
    }
    AsymptoticFit fit = general_cone_expansion(c35, nodal, 10.0, 60.0);
    CHECK(fit.coefficients[0] == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(fit.coefficients[1] == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-10);
}

TEST_CASE("balanced cone: the r^-1 term is absent") {
    ConeSpec c44 = make_cone(4, 4);
    NodalCurve nodal;
    std::size_t n = 2000;
    nodal.graph_r.resize(n);
    nodal.graph_s.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double r = 5.0 + 60.0 * static_cast<double>(k) / static_cast<double>(n - 1);
        nodal.graph_r[k] = r;
        nodal.graph_s[k] = r + 1.0 / (r * r);  // pure leaf-type deviation
    }
    AsymptoticFit fit = general_cone_expansion(c44, nodal, 10.0, 60.0);
    CHECK(std::abs(fit.coefficients[0]) < 1e-9);
    CHECK(fit.coefficients[1] == doctest::Approx(1.0).epsilon(1e-8));
}
