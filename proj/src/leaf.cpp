#include "ac/leaf.hpp"

#include "ac/errors.hpp"
#include "ac/io.hpp"

#include <algorithm>
#include <cmath>

namespace ac {

namespace {

// Graph ODE g''/(1+g'^2) + (di-1) g'/x - (dj-1)/g = 0.
inline double graph_rhs(int di, int dj, double x, double g, double p) {
    double drift = (x > 0.0) ? (di - 1) * p / x : 0.0;
    return (1.0 + p * p) * ((dj - 1) / g - drift);
}

struct OdeState {
    double g, p;
};

// Dormand-Prince 5(4) step; returns the embedded error estimate.
OdeState dopri_step(int di, int dj, double x, OdeState y, double h, double& err_g,
                    double& err_p) {
    auto f = [&](double xx, OdeState s) {
        return OdeState{s.p, graph_rhs(di, dj, xx, s.g, s.p)};
    };
    OdeState k1 = f(x, y);
    OdeState k2 = f(x + h / 5.0, {y.g + h * k1.g / 5.0, y.p + h * k1.p / 5.0});
    OdeState k3 = f(x + 3.0 * h / 10.0, {y.g + h * (3.0 * k1.g + 9.0 * k2.g) / 40.0,
                                         y.p + h * (3.0 * k1.p + 9.0 * k2.p) / 40.0});
    OdeState k4 = f(x + 4.0 * h / 5.0,
                    {y.g + h * (44.0 / 45.0 * k1.g - 56.0 / 15.0 * k2.g + 32.0 / 9.0 * k3.g),
                     y.p + h * (44.0 / 45.0 * k1.p - 56.0 / 15.0 * k2.p + 32.0 / 9.0 * k3.p)});
    OdeState k5 = f(x + 8.0 * h / 9.0,
                    {y.g + h * (19372.0 / 6561.0 * k1.g - 25360.0 / 2187.0 * k2.g +
                                64448.0 / 6561.0 * k3.g - 212.0 / 729.0 * k4.g),
                     y.p + h * (19372.0 / 6561.0 * k1.p - 25360.0 / 2187.0 * k2.p +
                                64448.0 / 6561.0 * k3.p - 212.0 / 729.0 * k4.p)});
    OdeState k6 = f(x + h, {y.g + h * (9017.0 / 3168.0 * k1.g - 355.0 / 33.0 * k2.g +
                                       46732.0 / 5247.0 * k3.g + 49.0 / 176.0 * k4.g -
                                       5103.0 / 18656.0 * k5.g),
                            y.p + h * (9017.0 / 3168.0 * k1.p - 355.0 / 33.0 * k2.p +
                                       46732.0 / 5247.0 * k3.p + 49.0 / 176.0 * k4.p -
                                       5103.0 / 18656.0 * k5.p)});
    OdeState y5{y.g + h * (35.0 / 384.0 * k1.g + 500.0 / 1113.0 * k3.g + 125.0 / 192.0 * k4.g -
                           2187.0 / 6784.0 * k5.g + 11.0 / 84.0 * k6.g),
                y.p + h * (35.0 / 384.0 * k1.p + 500.0 / 1113.0 * k3.p + 125.0 / 192.0 * k4.p -
                           2187.0 / 6784.0 * k5.p + 11.0 / 84.0 * k6.p)};
    OdeState k7 = f(x + h, y5);
    double y4g = y.g + h * (5179.0 / 57600.0 * k1.g + 7571.0 / 16695.0 * k3.g +
                            393.0 / 640.0 * k4.g - 92097.0 / 339200.0 * k5.g +
                            187.0 / 2100.0 * k6.g + k7.g / 40.0);
    double y4p = y.p + h * (5179.0 / 57600.0 * k1.p + 7571.0 / 16695.0 * k3.p +
                            393.0 / 640.0 * k4.p - 92097.0 / 339200.0 * k5.p +
                            187.0 / 2100.0 * k6.p + k7.p / 40.0);
    err_g = y5.g - y4g;
    err_p = y5.p - y4p;
    return y5;
}

} // namespace

double LeafCurve::g_at(double xq) const {
    if (xq <= x0) return g.front();
    if (xq >= x_max()) {
        // linear continuation off the sampled end
        return g.back() + dg.back() * (xq - x_max());
    }
    double u = (xq - x0) / dx;
    std::size_t k = static_cast<std::size_t>(u);
    if (k >= g.size() - 1) k = g.size() - 2;
    double s = u - static_cast<double>(k);
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * g[k] + h10 * dx * dg[k] + h01 * g[k + 1] + h11 * dx * dg[k + 1];
}

double LeafCurve::dg_at(double xq) const {
    if (xq <= x0) return dg.front();
    if (xq >= x_max()) return dg.back();
    double u = (xq - x0) / dx;
    std::size_t k = static_cast<std::size_t>(u);
    if (k >= g.size() - 1) k = g.size() - 2;
    double s = u - static_cast<double>(k);
    return (1 - s) * dg[k] + s * dg[k + 1];
}

double LeafCurve::d2g_at(double xq) const {
    if (xq <= x0) return d2g.front();
    if (xq >= x_max()) return d2g.back();
    double u = (xq - x0) / dx;
    std::size_t k = static_cast<std::size_t>(u);
    if (k >= d2g.size() - 1) k = d2g.size() - 2;
    double s = u - static_cast<double>(k);
    return (1 - s) * d2g[k] + s * d2g[k + 1];
}

double LeafCurve::s_at_r(double r) const {
    if (side != '+') throw Error(ErrKind::config, "s_at_r: side '-' leaf is not a graph over r");
    return g_at(r);
}

double LeafCurve::slope_at_r(double r) const {
    if (side != '+') throw Error(ErrKind::config, "slope_at_r: side '-' leaf");
    return dg_at(r);
}

double LeafCurve::arclen_at(double xq) const {
    if (xq <= x0) return arclen.front();
    if (xq >= x_max()) return arclen.back() + (xq - x_max()) * std::hypot(1.0, dg.back());
    double u = (xq - x0) / dx;
    std::size_t k = static_cast<std::size_t>(u);
    if (k >= arclen.size() - 1) k = arclen.size() - 2;
    double s = u - static_cast<double>(k);
    return (1 - s) * arclen[k] + s * arclen[k + 1];
}

CurvatureSet LeafCurve::curvatures(std::size_t k) const {
    double xv = x(k), gv = g[k], pv = dg[k];
    double gpp = d2g[k];
    double q = std::sqrt(1.0 + pv * pv);
    CurvatureSet c;
    c.mult_first = cone.i - 1;
    c.mult_second = cone.j - 1;
    if (side == '+') {
        c.k_radial = gpp / (q * q * q);
        c.k_first = (xv > 1e-12) ? pv / (xv * q) : gpp;  // p/x -> g''(0) at the axis
        c.k_second = -1.0 / (gv * q);
    } else {
        c.k_radial = -gpp / (q * q * q);
        c.k_first = 1.0 / (gv * q);
        c.k_second = (xv > 1e-12) ? -pv / (xv * q) : -gpp;
    }
    return c;
}

LeafCurve solve_leaf(const ConeSpec& cone, char side, double start_height, double x_max,
                     const LeafOptions& opts) {
    if (cone.minimizing_class == MinimizingClass::unstable)
        throw Error(ErrKind::config,
                    "solve_leaf: refusing unstable cone C_{" + std::to_string(cone.i) + "," +
                        std::to_string(cone.j) + "} (no foliation)");
    if (!(start_height > 0.0)) throw Error(ErrKind::config, "solve_leaf: start height must be > 0");
    if (side != '+' && side != '-') throw Error(ErrKind::config, "solve_leaf: side must be + or -");

    const int di = side == '+' ? cone.i : cone.j;
    const int dj = side == '+' ? cone.j : cone.i;

    LeafCurve leaf;
    leaf.cone = cone;
    leaf.side = side;
    leaf.start_height = start_height;
    leaf.lambda = start_height;  // unit leaf starts at height 1
    leaf.x0 = 0.0;
    leaf.dx = opts.out_step;
    const std::size_t n_out = static_cast<std::size_t>(std::ceil(x_max / opts.out_step)) + 1;
    leaf.g.resize(n_out);
    leaf.dg.resize(n_out);

    // Series start g = g0 + c2 x^2 + c4 x^4 removes the 0/0 drift at the axis.
    const double g0 = start_height;
    const double c2 = static_cast<double>(dj - 1) / (2.0 * di * g0);
    const double c4 = (8.0 * c2 * c2 * c2 - (dj - 1) * c2 / (g0 * g0)) / (4.0 * (di + 2));
    const double x_series = std::min(0.01, 0.5 * opts.max_step);
    auto series_g = [&](double x) { return g0 + c2 * x * x + c4 * x * x * x * x; };
    auto series_p = [&](double x) { return 2.0 * c2 * x + 4.0 * c4 * x * x * x; };

    std::size_t next_out = 0;
    while (next_out < n_out && leaf.x(next_out) <= x_series) {
        double xo = leaf.x(next_out);
        leaf.g[next_out] = series_g(xo);
        leaf.dg[next_out] = series_p(xo);
        ++next_out;
    }

    // Steps land exactly on the output nodes (the step is capped at the next
    // node), so the stored samples are RK states with smooth error and finite
    // differences of them stay clean.
    double x = x_series;
    OdeState y{series_g(x), series_p(x)};
    double h = std::min(opts.max_step, 1e-3);
    const double atol = 1e-13;

    while (next_out < n_out) {
        double x_target = leaf.x(next_out);
        if (x >= x_target - 1e-12) {
            leaf.g[next_out] = y.g;
            leaf.dg[next_out] = y.p;
            ++next_out;
            continue;
        }
        if (y.g <= 1e-9)
            throw Error(ErrKind::geometry,
                        "solve_leaf: graph reached the axis near x = " + fmt_double(x));
        double h_try = std::min({h, opts.max_step, x_target - x});
        double eg, ep;
        OdeState ynew = dopri_step(di, dj, x, y, h_try, eg, ep);
        double scale_g = atol + opts.rel_tol * std::max(std::abs(y.g), std::abs(ynew.g));
        double scale_p = atol + opts.rel_tol * std::max(std::abs(y.p), std::abs(ynew.p));
        double err = std::sqrt(0.5 * ((eg / scale_g) * (eg / scale_g) +
                                      (ep / scale_p) * (ep / scale_p)));
        if (err > 1.0) {
            h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-12) throw Error(ErrKind::numeric, "solve_leaf: step collapse");
            continue;
        }
        x += h_try;
        y = ynew;
        h = (err > 1e-30) ? h_try * std::min(5.0, 0.9 * std::pow(err, -0.2)) : opts.max_step;
    }

    leaf.d2g.resize(n_out);
    leaf.d2g[0] = static_cast<double>(dj - 1) / (di * g0);
    for (std::size_t k = 1; k < n_out; ++k)
        leaf.d2g[k] = graph_rhs(di, dj, leaf.x(k), leaf.g[k], leaf.dg[k]);

    // a foliation leaf stays strictly on its side of the cone; one-sided
    // minimizers (C_{2,6}) have no leaf on the other side and the integrated
    // graph crosses the cone line
    for (std::size_t k = 0; k < n_out; ++k) {
        double dev = leaf.s_of(k) - cone.slope * leaf.r_of(k);
        if ((side == '+' && dev <= 0.0) || (side == '-' && dev >= 0.0))
            throw Error(ErrKind::geometry,
                        "solve_leaf: curve crosses the cone line near r = " +
                            fmt_double(leaf.r_of(k)) + " (no one-sided leaf on side " +
                            std::string(1, side) + ")");
    }

    leaf.arclen.resize(n_out);
    leaf.arclen[0] = 0.0;
    for (std::size_t k = 1; k < n_out; ++k) {
        double q0 = std::hypot(1.0, leaf.dg[k - 1]);
        double q1 = std::hypot(1.0, leaf.dg[k]);
        leaf.arclen[k] = leaf.arclen[k - 1] + 0.5 * (q0 + q1) * leaf.dx;
    }
    return leaf;
}

LeafCurve make_cone_line_leaf(const ConeSpec& cone, double l_max, double out_step) {
    LeafCurve leaf;
    leaf.cone = cone;
    leaf.side = '+';
    leaf.start_height = 0.0;
    leaf.lambda = 0.0;
    leaf.cone_line = true;
    leaf.dx = out_step;
    leaf.x0 = out_step;
    const double m = cone.slope;
    const double x_end = l_max / std::hypot(1.0, m);
    const std::size_t n = static_cast<std::size_t>(std::ceil((x_end - leaf.x0) / out_step)) + 1;
    leaf.g.resize(n);
    leaf.dg.resize(n);
    leaf.d2g.assign(n, 0.0);
    leaf.arclen.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double x = leaf.x(k);
        leaf.g[k] = m * x;
        leaf.dg[k] = m;
        leaf.arclen[k] = std::hypot(1.0, m) * x;  // measured from the origin
    }
    return leaf;
}

AsymptoticFit leaf_asymptotics(const LeafCurve& leaf, double ra, double rb) {
    auto roots = indicial_roots(leaf.cone);
    std::vector<double> r(leaf.size()), dev(leaf.size());
    for (std::size_t k = 0; k < leaf.size(); ++k) {
        r[k] = leaf.r_of(k);
        dev[k] = leaf.s_of(k) - leaf.cone.slope * r[k];
    }
    return fit_power_series(r, dev, {roots.first, roots.first - 1.0}, ra, rb, -roots.first);
}

TargetLeaf leaf_for_coefficient(const ConeSpec& cone, double a, double r_max) {
    TargetLeaf out;
    if (a < 0.0) throw Error(ErrKind::config, "leaf_for_coefficient: a must be >= 0");
    if (a == 0.0) {
        out.leaf = make_cone_line_leaf(cone, r_max * std::hypot(1.0, cone.slope) * 1.05);
        out.lambda = 0.0;
        return out;
    }
    LeafCurve unit = solve_leaf(cone, '+', 1.0, 66.0);
    AsymptoticFit unit_fit = leaf_asymptotics(unit, 20.0, 60.0);
    out.unit_coeff = unit_fit.coefficients[0];
    double alpha = indicial_roots(cone).first;
    out.lambda = std::pow(a / out.unit_coeff, 1.0 / (1.0 - alpha));
    out.leaf = solve_leaf(cone, '+', out.lambda, r_max);
    double fit_hi = std::min(0.9 * out.leaf.x_max(), 60.0 * std::max(1.0, out.lambda));
    AsymptoticFit check = leaf_asymptotics(out.leaf, fit_hi / 3.0, fit_hi);
    out.coeff = check.coefficients[0];
    return out;
}

FoliationReport foliation_check(std::span<const LeafCurve> leaves) {
    FoliationReport rep;
    for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b) {
            const LeafCurve &la = leaves[a], &lb = leaves[b];
            FoliationPair pair;
            pair.a = a;
            pair.b = b;
            if (la.side != lb.side) {
                // opposite sides: both strictly on their side of the cone line
                auto ok_side = [](const LeafCurve& lf) {
                    for (std::size_t k = 0; k < lf.size(); ++k) {
                        double gap = lf.s_of(k) - lf.cone.slope * lf.r_of(k);
                        if (lf.side == '+' && gap <= 0.0 && lf.r_of(k) > 0.0) return false;
                        if (lf.side == '-' && gap >= 0.0 && lf.s_of(k) > 0.0) return false;
                    }
                    return true;
                };
                pair.status = (ok_side(la) && ok_side(lb))
                                  ? FoliationPair::Status::separated_by_cone
                                  : FoliationPair::Status::intersecting;
                pair.min_gap = 0.0;
            } else {
                double x_lo = std::max(la.x0, lb.x0);
                double x_hi = std::min(la.x_max(), lb.x_max());
                double min_gap = 1e300, max_abs = 0.0;
                bool pos = false, neg = false;
                const int n_probe = 2000;
                for (int k = 0; k <= n_probe; ++k) {
                    double x = x_lo + (x_hi - x_lo) * k / n_probe;
                    double diff = la.g_at(x) - lb.g_at(x);
                    if (diff > 1e-9) pos = true;
                    if (diff < -1e-9) neg = true;
                    min_gap = std::min(min_gap, std::abs(diff));
                    max_abs = std::max(max_abs, std::abs(diff));
                }
                if (pos && neg)
                    pair.status = FoliationPair::Status::intersecting;
                else if (max_abs < 1e-9)
                    pair.status = FoliationPair::Status::coincident;
                else
                    pair.status = FoliationPair::Status::disjoint;
                pair.min_gap = min_gap;
            }
            if (pair.status == FoliationPair::Status::intersecting) rep.clean = false;
            rep.pairs.push_back(pair);
        }
    return rep;
}

AsymptoticFit curvature_decay_check(const LeafCurve& leaf, double ra, double rb) {
    std::vector<double> r(leaf.size()), a3(leaf.size());
    for (std::size_t k = 0; k < leaf.size(); ++k) {
        r[k] = leaf.r_of(k);
        a3[k] = leaf.a3(k);
    }
    return fit_loglog_slope(r, a3, ra, rb);
}

double mean_curvature_residual(const LeafCurve& leaf) {
    // curvatures rebuilt from the samples alone (4th-order differences), so
    // the check is independent of the ODE identity used to integrate
    const std::size_t n = leaf.size();
    if (n < 9) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 4; k + 4 < n; ++k) {
        double p = (-leaf.g[k + 2] + 8.0 * leaf.g[k + 1] - 8.0 * leaf.g[k - 1] + leaf.g[k - 2]) /
                   (12.0 * leaf.dx);
        double gpp = (-leaf.g[k + 2] + 16.0 * leaf.g[k + 1] - 30.0 * leaf.g[k] +
                      16.0 * leaf.g[k - 1] - leaf.g[k - 2]) /
                     (12.0 * leaf.dx * leaf.dx);
        double q = std::sqrt(1.0 + p * p);
        double xv = leaf.x(k), gv = leaf.g[k];
        double k1, kf, ks;
        if (leaf.side == '+') {
            k1 = gpp / (q * q * q);
            kf = p / (xv * q);
            ks = -1.0 / (gv * q);
        } else {
            k1 = -gpp / (q * q * q);
            kf = 1.0 / (gv * q);
            ks = -p / (xv * q);
        }
        double mean = k1 + (leaf.cone.i - 1) * kf + (leaf.cone.j - 1) * ks;
        worst = std::max(worst, std::abs(mean));
    }
    return worst;
}

std::string leaf_csv(const LeafCurve& leaf, std::size_t n_rows) {
    std::string out = "r,s,arclength,k1,k_top,k_bot,A2,A3\n";
    std::size_t stride = std::max<std::size_t>(1, leaf.size() / n_rows);
    for (std::size_t k = 0; k < leaf.size(); k += stride) {
        CurvatureSet c = leaf.curvatures(k);
        out += csv_row({fmt_double(leaf.r_of(k)), fmt_double(leaf.s_of(k)),
                        fmt_double(leaf.arclen[k]), fmt_double(c.k_radial),
                        fmt_double(c.k_first), fmt_double(c.k_second),
                        fmt_double(c.power_sum(2)), fmt_double(c.power_sum(3))});
    }
    return out;
}

} // namespace ac
