#include "ac/cone.hpp"

#include "ac/errors.hpp"
#include "ac/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ac {

std::string to_string(MinimizingClass c) {
    switch (c) {
        case MinimizingClass::minimizing: return "minimizing";
        case MinimizingClass::one_sided_minimizer: return "one_sided_minimizer";
        default: return "unstable";
    }
}

ConeSpec make_cone(int i, int j) {
    if (i < 2 || j < 2)
        throw Error(ErrKind::config, "cone dimensions must satisfy i >= 2, j >= 2");
    if (i > j) std::swap(i, j);  // C_{j,i} is the reflected cone

    ConeSpec c;
    c.i = i;
    c.j = j;
    c.n = i + j;
    c.slope = std::sqrt(static_cast<double>(j - 1) / static_cast<double>(i - 1));

    if (c.n <= 7) {
        c.minimizing_class = MinimizingClass::unstable;
        c.alpha_plus = c.alpha_minus = std::numeric_limits<double>::quiet_NaN();
    } else {
        c.minimizing_class = (i == 2 && j == 6) ? MinimizingClass::one_sided_minimizer
                                                : MinimizingClass::minimizing;
        double nm3 = static_cast<double>(c.n - 3);
        double disc = nm3 * nm3 - 4.0 * static_cast<double>(c.n - 2);
        c.alpha_plus = 0.5 * (-nm3 + std::sqrt(disc));
        c.alpha_minus = 0.5 * (-nm3 - std::sqrt(disc));
    }
    return c;
}

double CurvatureSet::sum() const {
    return k_radial + mult_first * k_first + mult_second * k_second;
}

double CurvatureSet::power_sum(int p) const {
    return std::pow(k_radial, p) + mult_first * std::pow(k_first, p) +
           mult_second * std::pow(k_second, p);
}

CurvatureSet principal_curvatures(const ConeSpec& cone, double l) {
    if (!(l > 0.0)) throw Error(ErrKind::config, "principal_curvatures: l must be positive");
    CurvatureSet c;
    c.k_radial = 0.0;
    c.k_first = cone.slope / l;
    c.k_second = -1.0 / (cone.slope * l);
    c.mult_first = cone.i - 1;
    c.mult_second = cone.j - 1;
    return c;
}

double curvature_power_sum(const ConeSpec& cone, int p, double l) {
    if (!(l > 0.0)) throw Error(ErrKind::config, "curvature_power_sum: l must be positive");
    if (p < 2) throw Error(ErrKind::config, "curvature_power_sum: p must be >= 2");
    return principal_curvatures(cone, l).power_sum(p);
}

std::pair<double, double> indicial_roots(const ConeSpec& cone) {
    if (cone.n <= 7)
        throw Error(ErrKind::config, "indicial roots are complex for n <= 7 (n = " +
                                         std::to_string(cone.n) + ")");
    return {cone.alpha_plus, cone.alpha_minus};
}

double RadialFunction::eval(double lq) const {
    if (v.empty()) return 0.0;
    if (lq <= l0) return v.front();
    if (lq >= l_max()) return v.back();
    double x = (lq - l0) / dl;
    std::size_t k = static_cast<std::size_t>(x);
    if (k >= v.size() - 1) k = v.size() - 2;
    double u = x - static_cast<double>(k);
    if (d1.size() == v.size()) {
        double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
        double h10 = u * (1 - u) * (1 - u);
        double h01 = u * u * (3 - 2 * u);
        double h11 = u * u * (u - 1);
        return h00 * v[k] + h10 * dl * d1[k] + h01 * v[k + 1] + h11 * dl * d1[k + 1];
    }
    return (1 - u) * v[k] + u * v[k + 1];
}

void RadialFunction::fill_derivatives() {
    const std::size_t n = v.size();
    d1.assign(n, 0.0);
    d2.assign(n, 0.0);
    if (n < 5) return;
    for (std::size_t k = 2; k + 2 < n; ++k) {
        d1[k] = (-v[k + 2] + 8.0 * v[k + 1] - 8.0 * v[k - 1] + v[k - 2]) / (12.0 * dl);
        d2[k] = (-v[k + 2] + 16.0 * v[k + 1] - 30.0 * v[k] + 16.0 * v[k - 1] - v[k - 2]) /
                (12.0 * dl * dl);
    }
    d1[1] = (v[2] - v[0]) / (2.0 * dl);
    d2[1] = (v[2] - 2.0 * v[1] + v[0]) / (dl * dl);
    d1[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * dl);
    d2[n - 2] = (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) / (dl * dl);
    d1[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dl);
    d2[0] = d2[1];
    d1[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dl);
    d2[n - 1] = d2[n - 2];
}

RadialFunction make_radial(double l0, double l1, std::size_t n, double (*f)(double),
                           double (*f1)(double), double (*f2)(double)) {
    RadialFunction r;
    r.l0 = l0;
    r.dl = (l1 - l0) / static_cast<double>(n - 1);
    r.v.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.v[k] = f(r.l(k));
    if (f1 && f2) {
        r.d1.resize(n);
        r.d2.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            r.d1[k] = f1(r.l(k));
            r.d2[k] = f2(r.l(k));
        }
    } else {
        r.fill_derivatives();
    }
    return r;
}

RadialFunction jacobi_radial(const ConeSpec& cone, const RadialFunction& h) {
    if (h.l0 <= 0.0)
        throw Error(ErrKind::config, "jacobi_radial: grid must stay off the singular point l = 0");
    RadialFunction out;
    out.l0 = h.l0;
    out.dl = h.dl;
    out.v.resize(h.size());
    const RadialFunction* src = &h;
    RadialFunction tmp;
    if (h.d1.size() != h.size() || h.d2.size() != h.size()) {
        tmp = h;
        tmp.fill_derivatives();
        src = &tmp;
    }
    double nm2 = static_cast<double>(cone.n - 2);
    for (std::size_t k = 0; k < h.size(); ++k) {
        double l = h.l(k);
        out.v[k] = src->d2[k] + nm2 / l * src->d1[k] + nm2 / (l * l) * src->v[k];
    }
    return out;
}

namespace {

// Tridiagonal solve of h'' + (n-2)/l h' + (n-2)/l^2 h = rhs with Dirichlet
// values at both ends.
std::vector<double> jacobi_tridiag(int n_dim, double l0, double dl, std::size_t n,
                                   const std::vector<double>& rhs, double left, double right) {
    double nm2 = static_cast<double>(n_dim - 2);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    c[0] = 0.0;
    d[0] = left;
    for (std::size_t k = 1; k < n; ++k) {
        bool last = (k == n - 1);
        double l = l0 + dl * static_cast<double>(k);
        double sub = last ? 0.0 : 1.0 / (dl * dl) - nm2 / (2.0 * dl * l);
        double diag = last ? 1.0 : -2.0 / (dl * dl) + nm2 / (l * l);
        double sup = last ? 0.0 : 1.0 / (dl * dl) + nm2 / (2.0 * dl * l);
        double b = last ? right : rhs[k];
        double m = diag - sub * c[k - 1];
        if (std::abs(m) < 1e-300) throw Error(ErrKind::numeric, "jacobi bvp: singular tridiagonal");
        c[k] = sup / m;
        d[k] = (b - sub * d[k - 1]) / m;
    }
    std::vector<double> h(n, 0.0);
    h[n - 1] = d[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) h[k] = d[k] - c[k] * h[k + 1];
    return h;
}

void check_domain(double l0, double L) {
    if (!(l0 > 0.0)) throw Error(ErrKind::config, "jacobi bvp: l0 must be positive");
    if (!(L / l0 >= 10.0)) throw Error(ErrKind::config, "jacobi bvp: need L/l0 >= 10");
}

} // namespace

RadialFunction solve_jacobi_bvp(const ConeSpec& cone, std::span<const PowerTerm> rhs,
                                double inner_value, double l0, double L, std::size_t n_points) {
    check_domain(l0, L);
    double nm2 = static_cast<double>(cone.n - 2);

    // Exact particular solution: J(l^q) = [q(q-1) + (n-2)q + (n-2)] l^{q-2}.
    std::vector<PowerTerm> part;
    part.reserve(rhs.size());
    for (const PowerTerm& term : rhs) {
        double q = term.exponent + 2.0;
        double denom = q * (q - 1.0) + nm2 * q + nm2;
        if (std::abs(denom) < 1e-10)
            throw Error(ErrKind::numeric, "jacobi bvp: rhs power resonates with an indicial root");
        part.push_back({term.coeff / denom, q});
    }
    auto part_at = [&part](double l) {
        double s = 0.0;
        for (const PowerTerm& p : part) s += p.coeff * std::pow(l, p.exponent);
        return s;
    };

    RadialFunction out;
    out.l0 = l0;
    out.dl = (L - l0) / static_cast<double>(n_points - 1);
    std::vector<double> zero(n_points, 0.0);
    std::vector<double> w = jacobi_tridiag(cone.n, l0, out.dl, n_points, zero,
                                           inner_value - part_at(l0), 0.0);
    out.v.resize(n_points);
    for (std::size_t k = 0; k < n_points; ++k) out.v[k] = part_at(out.l(k)) + w[k];
    out.fill_derivatives();
    return out;
}

RadialFunction solve_jacobi_bvp(const ConeSpec& cone, const RadialFunction& rhs,
                                double inner_value) {
    check_domain(rhs.l0, rhs.l_max());
    RadialFunction out;
    out.l0 = rhs.l0;
    out.dl = rhs.dl;
    out.v = jacobi_tridiag(cone.n, rhs.l0, rhs.dl, rhs.size(), rhs.v, inner_value, 0.0);

    // Discrete residual of the computed solution against the stencil.
    double nm2 = static_cast<double>(cone.n - 2);
    double scale = 1e-300, worst = 0.0;
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        double l = out.l(k);
        double ap = (out.v[k + 1] - 2.0 * out.v[k] + out.v[k - 1]) / (out.dl * out.dl) +
                    nm2 / l * (out.v[k + 1] - out.v[k - 1]) / (2.0 * out.dl) +
                    nm2 / (l * l) * out.v[k];
        worst = std::max(worst, std::abs(ap - rhs.v[k]));
        scale = std::max(scale, std::abs(rhs.v[k]) + std::abs(out.v[k]) / (l * l));
    }
    if (worst > 1e-7 * std::max(1.0, scale))
        throw Error(ErrKind::numeric, "jacobi bvp residual " + fmt_double(worst) + " too large");
    out.fill_derivatives();
    return out;
}

std::string cone_table_csv(std::span<const ConeSpec> cones) {
    std::string out = "i,j,n,slope,alpha_plus,alpha_minus,class\n";
    for (const ConeSpec& c : cones)
        out += csv_row({std::to_string(c.i), std::to_string(c.j), std::to_string(c.n),
                        fmt_double(c.slope), fmt_double(c.alpha_plus), fmt_double(c.alpha_minus),
                        to_string(c.minimizing_class)});
    return out;
}

} // namespace ac
