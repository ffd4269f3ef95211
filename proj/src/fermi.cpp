#include "ac/fermi.hpp"

#include "ac/errors.hpp"
#include "ac/io.hpp"

#include <algorithm>
#include <cmath>

namespace ac {

namespace {

struct CurvePoint {
    double r, s;     // position
    double tr, ts;   // unit tangent
    double k1;
};

CurvePoint curve_point(const LeafCurve& leaf, double x) {
    double g = leaf.g_at(x), p = leaf.dg_at(x), gpp = leaf.d2g_at(x);
    double q = std::sqrt(1.0 + p * p);
    CurvePoint c;
    if (leaf.side == '+') {
        c.r = x;
        c.s = g;
        c.tr = 1.0 / q;
        c.ts = p / q;
        c.k1 = gpp / (q * q * q);
    } else {
        c.r = g;
        c.s = x;
        c.tr = p / q;
        c.ts = 1.0 / q;
        c.k1 = -gpp / (q * q * q);
    }
    return c;
}

CurvatureSet curvature_at_x(const LeafCurve& leaf, double x) {
    double g = leaf.g_at(x), p = leaf.dg_at(x), gpp = leaf.d2g_at(x);
    double q = std::sqrt(1.0 + p * p);
    CurvatureSet c;
    c.mult_first = leaf.cone.i - 1;
    c.mult_second = leaf.cone.j - 1;
    if (leaf.side == '+') {
        c.k_radial = gpp / (q * q * q);
        c.k_first = (x > 1e-12) ? p / (x * q) : gpp;
        c.k_second = -1.0 / (g * q);
    } else {
        c.k_radial = -gpp / (q * q * q);
        c.k_first = 1.0 / (g * q);
        c.k_second = (x > 1e-12) ? -p / (x * q) : -gpp;
    }
    return c;
}

inline double lerp_at(const std::vector<double>& a, double u, std::size_t k) {
    return (1.0 - (u - static_cast<double>(k))) * a[k] + (u - static_cast<double>(k)) * a[k + 1];
}

} // namespace

FermiChart build_chart(const LeafCurve& leaf) {
    FermiChart ch;
    ch.cone = leaf.cone;
    ch.side = leaf.side;
    ch.lambda = leaf.lambda;

    const std::size_t n = leaf.size();
    ch.l0 = leaf.arclen.front();
    double l_end = leaf.arclen.back();
    ch.dl = (l_end - ch.l0) / static_cast<double>(n - 1);
    ch.r.resize(n);
    ch.s.resize(n);
    ch.tr.resize(n);
    ch.ts.resize(n);
    ch.nr.resize(n);
    ch.ns.resize(n);
    ch.k1.resize(n);
    ch.a2.resize(n);
    ch.a3.resize(n);
    ch.band.resize(n);

    // invert the cumulative arclength with a forward-moving pointer
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double l = ch.l(k);
        while (seg + 2 < n && leaf.arclen[seg + 1] < l) ++seg;
        double denom = leaf.arclen[seg + 1] - leaf.arclen[seg];
        double frac = denom > 0.0 ? (l - leaf.arclen[seg]) / denom : 0.0;
        frac = std::clamp(frac, 0.0, 1.0);
        double x = leaf.x(seg) + frac * leaf.dx;
        CurvePoint c = curve_point(leaf, x);
        ch.r[k] = c.r;
        ch.s[k] = c.s;
        ch.tr[k] = c.tr;
        ch.ts[k] = c.ts;
        ch.nr[k] = -c.ts;
        ch.ns[k] = c.tr;
        ch.k1[k] = c.k1;
        CurvatureSet cs = curvature_at_x(leaf, x);
        ch.a2[k] = cs.power_sum(2);
        ch.a3[k] = cs.power_sum(3);
        ch.band[k] = std::min(1e9, 0.9 / std::max(std::abs(c.k1), 1e-9));
    }
    return ch;
}

namespace {

struct ChartEval {
    double r, s, tr, ts, nr, ns, k1;
};

ChartEval eval_chart(const FermiChart& ch, double l) {
    double u = (l - ch.l0) / ch.dl;
    std::size_t k = 0;
    if (u > 0.0) k = std::min(static_cast<std::size_t>(u), ch.size() - 2);
    double s = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
    // Hermite for position (gamma' = tangent under arclength parametrization)
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    ChartEval e;
    e.r = h00 * ch.r[k] + h10 * ch.dl * ch.tr[k] + h01 * ch.r[k + 1] + h11 * ch.dl * ch.tr[k + 1];
    e.s = h00 * ch.s[k] + h10 * ch.dl * ch.ts[k] + h01 * ch.s[k + 1] + h11 * ch.dl * ch.ts[k + 1];
    double fr = s;
    e.tr = (1 - fr) * ch.tr[k] + fr * ch.tr[k + 1];
    e.ts = (1 - fr) * ch.ts[k] + fr * ch.ts[k + 1];
    double norm = std::hypot(e.tr, e.ts);
    e.tr /= norm;
    e.ts /= norm;
    e.nr = -e.ts;
    e.ns = e.tr;
    e.k1 = (1 - fr) * ch.k1[k] + fr * ch.k1[k + 1];
    return e;
}

} // namespace

Point2 FermiChart::point_at(double l) const {
    ChartEval e = eval_chart(*this, l);
    return {e.r, e.s};
}

Point2 FermiChart::normal_at(double l) const {
    ChartEval e = eval_chart(*this, l);
    return {e.nr, e.ns};
}

double FermiChart::band_at(double l) const {
    double u = std::clamp((l - l0) / dl, 0.0, static_cast<double>(size() - 1));
    std::size_t k = std::min(static_cast<std::size_t>(u), size() - 2);
    return lerp_at(band, u, k);
}

double FermiChart::a2_at(double l) const {
    double u = std::clamp((l - l0) / dl, 0.0, static_cast<double>(size() - 1));
    std::size_t k = std::min(static_cast<std::size_t>(u), size() - 2);
    return lerp_at(a2, u, k);
}

double FermiChart::k1_at(double l) const {
    double u = std::clamp((l - l0) / dl, 0.0, static_cast<double>(size() - 1));
    std::size_t k = std::min(static_cast<std::size_t>(u), size() - 2);
    return lerp_at(k1, u, k);
}

Point2 from_fermi(const FermiChart& chart, double l, double t) {
    if (l < chart.l0 - 1e-12 || l > chart.l_max() + 1e-12)
        throw Error(ErrKind::validity, "from_fermi: l outside the sampled range");
    if (std::abs(t) > chart.band_at(l))
        throw Error(ErrKind::validity, "from_fermi: |t| exceeds the validity band");
    ChartEval e = eval_chart(chart, l);
    return {e.r + t * e.nr, e.s + t * e.ns};
}

namespace {

// Newton polish of the foot equation phi(l) = (P - gamma(l)) . tau(l) = 0,
// using phi'(l) = -1 + k1 (P - gamma) . nu.
bool polish_foot(const FermiChart& ch, Point2 p, double& l) {
    for (int it = 0; it < 50; ++it) {
        ChartEval e = eval_chart(ch, l);
        double dr = p.r - e.r, ds = p.s - e.s;
        double phi = dr * e.tr + ds * e.ts;
        double dphi = -1.0 + e.k1 * (dr * e.nr + ds * e.ns);
        if (std::abs(dphi) < 1e-300) return false;
        double step = phi / dphi;
        l -= step;
        if (l < ch.l0) l = ch.l0;
        if (l > ch.l_max()) l = ch.l_max();
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(l))) return true;
    }
    return false;
}

} // namespace

FermiCoords to_fermi(const FermiChart& chart, Point2 p) {
    const std::size_t n = chart.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 1024);

    // bracketed scan of the squared distance at strided samples
    std::vector<std::size_t> probe;
    for (std::size_t k = 0; k < n; k += stride) probe.push_back(k);
    if (probe.back() != n - 1) probe.push_back(n - 1);
    std::vector<double> dist2(probe.size());
    for (std::size_t i = 0; i < probe.size(); ++i) {
        double dr = p.r - chart.r[probe[i]], ds = p.s - chart.s[probe[i]];
        dist2[i] = dr * dr + ds * ds;
    }
    std::vector<std::size_t> marks;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        bool left_ok = (i == 0) || dist2[i] <= dist2[i - 1];
        bool right_ok = (i + 1 == probe.size()) || dist2[i] <= dist2[i + 1];
        if (left_ok && right_ok) marks.push_back(probe[i]);
    }
    if (marks.empty()) marks.push_back(0);

    struct Candidate {
        double l, dist;
    };
    std::vector<Candidate> cands;
    for (std::size_t mk : marks) {
        double l = chart.l(mk);
        polish_foot(chart, p, l);
        ChartEval e = eval_chart(chart, l);
        double dist = std::hypot(p.r - e.r, p.s - e.s);
        bool dup = false;
        for (const Candidate& c : cands)
            if (std::abs(c.l - l) < 4.0 * chart.dl) dup = true;
        if (!dup) cands.push_back({l, dist});
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
    if (cands.size() >= 2 && std::abs(cands[0].dist - cands[1].dist) < 1e-6 * (1.0 + cands[0].dist))
        throw Error(ErrKind::validity, "to_fermi: ambiguous closest-point projection");

    double l = cands.front().l;
    if (l < chart.l0 + 2.0 * chart.dl || l > chart.l_max() - 2.0 * chart.dl)
        throw Error(ErrKind::validity, "to_fermi: foot point leaves the sampled range");
    ChartEval e = eval_chart(chart, l);
    double t = (p.r - e.r) * e.nr + (p.s - e.s) * e.ns;
    if (std::abs(t) > chart.band_at(l))
        throw Error(ErrKind::validity, "to_fermi: |t| exceeds the validity band");
    return {l, t};
}

ClampedCoords project_clamped(const FermiChart& chart, Point2 p) {
    // start from the projection onto the cone direction
    double m = chart.cone.slope;
    double q = std::hypot(1.0, m);
    double l = std::clamp((p.r + m * p.s) / q, chart.l0, chart.l_max());
    bool ok = polish_foot(chart, p, l);
    if (!ok) {
        // coarse rescan, then one more polish
        double best = 1e300;
        std::size_t stride = std::max<std::size_t>(1, chart.size() / 256);
        for (std::size_t k = 0; k < chart.size(); k += stride) {
            double dr = p.r - chart.r[k], ds = p.s - chart.s[k];
            double d = dr * dr + ds * ds;
            if (d < best) {
                best = d;
                l = chart.l(k);
            }
        }
        polish_foot(chart, p, l);
    }
    ClampedCoords out;
    l = std::clamp(l, chart.l0, chart.l_max());
    ChartEval e = eval_chart(chart, l);
    double t = (p.r - e.r) * e.nr + (p.s - e.s) * e.ns;
    double band = chart.band_at(l);
    out.l = l;
    out.clamped = false;
    if (t > band) {
        t = band;
        out.clamped = true;
    } else if (t < -band) {
        t = -band;
        out.clamped = true;
    }
    out.t = t;
    return out;
}

double sector_cutoff(Point2 p, double eps) {
    double theta = std::atan2(p.s, p.r);
    double theta_eps = std::atan(eps);
    auto smooth = [](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    };
    const double half_pi = 2.0 * std::atan(1.0);
    return smooth(theta / theta_eps) * smooth((half_pi - theta) / theta_eps);
}

double boundary_trace(const FermiChart& chart, const TraceParams& params, Point2 p) {
    ClampedCoords fc = project_clamped(chart, p);
    double xi = params.xi ? params.xi->eval(fc.l) : 0.0;
    double tt = fc.t - xi;
    double v = heteroclinic(tt);
    if (params.eta) {
        double rho = sector_cutoff(p, params.eps_cutoff);
        v += rho * params.eta->eval(tt) * chart.a2_at(fc.l);
    }
    return std::clamp(v, -1.0 + 1e-9, 1.0 - 1e-9);
}

std::string chart_csv(const FermiChart& chart, std::size_t n_rows) {
    std::string out = "l,r,s,nu_r,nu_s,band\n";
    std::size_t stride = std::max<std::size_t>(1, chart.size() / n_rows);
    for (std::size_t k = 0; k < chart.size(); k += stride)
        out += csv_row({fmt_double(chart.l(k)), fmt_double(chart.r[k]), fmt_double(chart.s[k]),
                        fmt_double(chart.nr[k]), fmt_double(chart.ns[k]),
                        fmt_double(chart.band[k])});
    return out;
}

} // namespace ac
