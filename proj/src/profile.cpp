#include "ac/profile.hpp"

#include "ac/errors.hpp"
#include "ac/io.hpp"

#include <cmath>
#include <numeric>

namespace ac {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

double heteroclinic(double t) { return std::tanh(t / kSqrt2); }

double heteroclinic_d1(double t) {
    double h = std::tanh(t / kSqrt2);
    return (1.0 - h * h) / kSqrt2;
}

double heteroclinic_d2(double t) {
    // H'' = H^3 - H, via -sqrt(2) H H' to keep an independent rounding path
    return -kSqrt2 * heteroclinic(t) * heteroclinic_d1(t);
}

double Profile1D::eval(double tq) const {
    if (v.empty()) return 0.0;
    if (tq <= t0 || tq >= t(v.size() - 1)) return 0.0;
    double x = (tq - t0) / dt;
    std::size_t k = static_cast<std::size_t>(x);
    if (k >= v.size() - 1) k = v.size() - 2;
    double u = x - static_cast<double>(k);
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * v[k] + h10 * dt * dv[k] + h01 * v[k + 1] + h11 * dt * dv[k + 1];
}

Profile1D sample_heteroclinic(double half_width, double step) {
    Profile1D p;
    p.kind = ProfileKind::H;
    std::size_t m = static_cast<std::size_t>(std::llround(half_width / step));
    p.dt = half_width / static_cast<double>(m);
    p.t0 = -half_width;
    p.v.resize(2 * m + 1);
    p.dv.resize(2 * m + 1);
    for (std::size_t k = 0; k < p.v.size(); ++k) {
        double t = p.t(k);
        p.v[k] = heteroclinic(t);
        p.dv[k] = heteroclinic_d1(t);
    }
    return p;
}

namespace {

// Thomas solve of (-q_{k+1} + 2 q_k - q_{k-1})/dt^2 + (3H^2-1) q_k = f_k with
// identity rows q = 0 at both ends.
std::vector<double> tridiag_solve(const std::vector<double>& pot, const std::vector<double>& f,
                                  double dt) {
    const std::size_t n = f.size();
    const double off = -1.0 / (dt * dt);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    c[0] = 0.0;
    d[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        bool last = (k == n - 1);
        double sub = last ? 0.0 : off;
        double diag = last ? 1.0 : 2.0 / (dt * dt) + pot[k];
        double sup = (k + 1 < n) ? off : 0.0;
        double rhs = last ? 0.0 : f[k];
        double m = diag - sub * c[k - 1];
        if (std::abs(m) < 1e-300) throw Error(ErrKind::numeric, "corrector: singular tridiagonal");
        c[k] = sup / m;
        d[k] = (rhs - sub * d[k - 1]) / m;
    }
    std::vector<double> q(n, 0.0);
    q[n - 1] = d[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) q[k] = d[k] - c[k] * q[k + 1];
    return q;
}

} // namespace

Profile1D solve_corrector(ProfileKind kind, double half_width, double step) {
    if (kind == ProfileKind::H) throw Error(ErrKind::config, "corrector kind must be eta or eta2");
    if (half_width < 10.0) throw Error(ErrKind::config, "corrector: half_width must be >= 10");
    if (step > 0.05) throw Error(ErrKind::config, "corrector: step must be <= 0.05");

    const std::size_t m = static_cast<std::size_t>(std::llround(half_width / step));
    const double dt = half_width / static_cast<double>(m);
    const std::size_t n = 2 * m + 1;

    std::vector<double> t(n), hp(n), pot(n), trap(n);
    for (std::size_t k = 0; k < n; ++k) {
        t[k] = dt * (static_cast<double>(k) - static_cast<double>(m));
        double h = heteroclinic(t[k]);
        hp[k] = heteroclinic_d1(t[k]);
        pot[k] = 3.0 * h * h - 1.0;
        trap[k] = (k == 0 || k == n - 1) ? 0.5 * dt : dt;
    }

    // The operator has a near-zero eigenvector v0 = H' + O(dt^2); a right
    // side with any v0 component gets amplified into an O(1) kernel-direction
    // error. Inverse iteration pins v0 so the eta2 right side can be made
    // exactly orthogonal to it (the eta right side is odd, v0 even).
    std::vector<double> v0(n);
    for (std::size_t k = 0; k < n; ++k) v0[k] = hp[k];
    v0[0] = v0[n - 1] = 0.0;
    for (int it = 0; it < 3; ++it) {
        v0 = tridiag_solve(pot, v0, dt);
        double norm = 0.0;
        for (double x : v0) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v0) x /= norm;
    }

    std::vector<double> f(n);
    if (kind == ProfileKind::eta) {
        for (std::size_t k = 0; k < n; ++k) f[k] = -t[k] * hp[k];
    } else {
        // c* chosen against the discrete kernel direction; differs from the
        // quadrature value by O(dt^2)
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            num += v0[k] * t[k] * t[k] * hp[k];
            den += v0[k] * hp[k];
        }
        double cs = num / den;
        for (std::size_t k = 0; k < n; ++k) f[k] = (t[k] * t[k] - cs) * hp[k];
    }

    // Solve, then subtract the discrete projection onto H' to enforce the
    // orthogonality; the stencil nearly annihilates H', so the projection
    // costs only O(dt^2 * c) residual.
    std::vector<double> x1 = tridiag_solve(pot, f, dt);
    double proj_num = 0.0, proj_den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        proj_num += trap[k] * hp[k] * x1[k];
        proj_den += trap[k] * hp[k] * hp[k];
    }
    double c = proj_num / proj_den;

    Profile1D p;
    p.kind = kind;
    p.t0 = -half_width;
    p.dt = dt;
    p.v.resize(n);
    for (std::size_t k = 0; k < n; ++k) p.v[k] = x1[k] - c * hp[k];

    double resid = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double lap = (-p.v[k + 1] + 2.0 * p.v[k] - p.v[k - 1]) / (dt * dt);
        resid = std::max(resid, std::abs(lap + pot[k] * p.v[k] - f[k]));
    }
    if (resid > 1e-7)
        throw Error(ErrKind::numeric,
                    "corrector residual " + fmt_double(resid) + " exceeds 1e-7");

    double orth = 0.0;
    for (std::size_t k = 0; k < n; ++k) orth += trap[k] * p.v[k] * hp[k];
    if (std::abs(orth) > 1e-8)
        throw Error(ErrKind::numeric,
                    "corrector orthogonality defect " + fmt_double(orth) + " exceeds 1e-8");

    // 4th-order interior differences for the derivative samples
    p.dv.assign(n, 0.0);
    for (std::size_t k = 2; k + 2 < n; ++k)
        p.dv[k] = (-p.v[k + 2] + 8.0 * p.v[k + 1] - 8.0 * p.v[k - 1] + p.v[k - 2]) / (12.0 * dt);
    p.dv[0] = (p.v[1] - p.v[0]) / dt;
    p.dv[1] = (p.v[2] - p.v[0]) / (2.0 * dt);
    p.dv[n - 2] = (p.v[n - 1] - p.v[n - 3]) / (2.0 * dt);
    p.dv[n - 1] = (p.v[n - 1] - p.v[n - 2]) / dt;
    return p;
}

Moments moments(double step, double half_width) {
    if (half_width < 10.0) throw Error(ErrKind::config, "moments: half_width must be >= 10");
    const std::size_t m = static_cast<std::size_t>(std::llround(half_width / step));
    const double dt = half_width / static_cast<double>(m);
    const std::size_t n = 2 * m + 1;
    double s0 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double t = dt * (static_cast<double>(k) - static_cast<double>(m));
        double hp = heteroclinic_d1(t);
        double wgt = (k == 0 || k == n - 1) ? 0.5 * dt : dt;
        s0 += wgt * hp * hp;
        s2 += wgt * t * t * hp * hp;
    }
    return {s0, s2 / s0};
}

std::string profile_csv(const Profile1D& p) {
    std::string out = "t,value,derivative\n";
    for (std::size_t k = 0; k < p.size(); ++k)
        out += csv_row({fmt_double(p.t(k)), fmt_double(p.v[k]), fmt_double(p.dv[k])});
    return out;
}

} // namespace ac
