#include "ac/fit.hpp"

#include "ac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ac {

namespace {

// Normal-equations solve for a small column count, with the condition number
// of the weighted design from the Gram eigenvalues.
struct SmallLsq {
    std::vector<double> coeff;
    double condition = 0.0;
    double residual_rms = 0.0;
};

SmallLsq solve_lsq(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
    const std::size_t nc = cols.size();
    const std::size_t n = y.size();
    std::vector<double> gram(nc * nc, 0.0), rhs(nc, 0.0);
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = a; b < nc; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += cols[a][k] * cols[b][k];
            gram[a * nc + b] = gram[b * nc + a] = s;
        }
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += cols[a][k] * y[k];
        rhs[a] = s;
    }

    // Jacobi eigenvalue sweep on the Gram matrix (symmetric, tiny).
    std::vector<double> g = gram;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < nc; ++p)
            for (std::size_t q = p + 1; q < nc; ++q) off += std::abs(g[p * nc + q]);
        if (off < 1e-300) break;
        for (std::size_t p = 0; p < nc; ++p)
            for (std::size_t q = p + 1; q < nc; ++q) {
                double apq = g[p * nc + q];
                if (std::abs(apq) < 1e-300) continue;
                double app = g[p * nc + p], aqq = g[q * nc + q];
                double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
                double c = std::cos(phi), s = std::sin(phi);
                for (std::size_t k = 0; k < nc; ++k) {
                    double gkp = g[k * nc + p], gkq = g[k * nc + q];
                    g[k * nc + p] = c * gkp - s * gkq;
                    g[k * nc + q] = s * gkp + c * gkq;
                }
                for (std::size_t k = 0; k < nc; ++k) {
                    double gpk = g[p * nc + k], gqk = g[q * nc + k];
                    g[p * nc + k] = c * gpk - s * gqk;
                    g[q * nc + k] = s * gpk + c * gqk;
                }
            }
    }
    double lmax = 0.0, lmin = 0.0;
    for (std::size_t p = 0; p < nc; ++p) {
        double ev = g[p * nc + p];
        if (p == 0) lmax = lmin = ev;
        lmax = std::max(lmax, ev);
        lmin = std::min(lmin, ev);
    }

    SmallLsq out;
    out.condition = (lmin <= 0.0) ? 1e300 : std::sqrt(lmax / lmin);

    // Gaussian elimination with partial pivoting on the normal equations.
    std::vector<double> m = gram, b = rhs;
    std::vector<std::size_t> perm(nc);
    for (std::size_t k = 0; k < nc; ++k) perm[k] = k;
    for (std::size_t k = 0; k < nc; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < nc; ++r)
            if (std::abs(m[r * nc + k]) > std::abs(m[piv * nc + k])) piv = r;
        if (piv != k) {
            for (std::size_t c = 0; c < nc; ++c) std::swap(m[k * nc + c], m[piv * nc + c]);
            std::swap(b[k], b[piv]);
        }
        double diag = m[k * nc + k];
        if (std::abs(diag) < 1e-300) throw Error(ErrKind::fit, "singular fit design");
        for (std::size_t r = k + 1; r < nc; ++r) {
            double f = m[r * nc + k] / diag;
            for (std::size_t c = k; c < nc; ++c) m[r * nc + c] -= f * m[k * nc + c];
            b[r] -= f * b[k];
        }
    }
    out.coeff.assign(nc, 0.0);
    for (std::size_t k = nc; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < nc; ++c) s -= m[k * nc + c] * out.coeff[c];
        out.coeff[k] = s / m[k * nc + k];
    }

    double rss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double fit = 0.0;
        for (std::size_t a = 0; a < nc; ++a) fit += out.coeff[a] * cols[a][k];
        rss += (y[k] - fit) * (y[k] - fit);
    }
    out.residual_rms = std::sqrt(rss / static_cast<double>(n));
    return out;
}

struct WindowData {
    std::vector<double> x, y;
};

WindowData select_window(std::span<const double> x, std::span<const double> y, double lo,
                         double hi) {
    WindowData w;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] >= lo && x[k] <= hi) {
            w.x.push_back(x[k]);
            w.y.push_back(y[k]);
        }
    return w;
}

SmallLsq power_lsq(const WindowData& w, const std::vector<double>& exponents,
                   double weight_exponent) {
    std::vector<std::vector<double>> cols(exponents.size());
    std::vector<double> target(w.x.size());
    for (std::size_t a = 0; a < exponents.size(); ++a) cols[a].resize(w.x.size());
    for (std::size_t k = 0; k < w.x.size(); ++k) {
        double wgt = std::pow(w.x[k], weight_exponent);
        target[k] = wgt * w.y[k];
        for (std::size_t a = 0; a < exponents.size(); ++a)
            cols[a][k] = wgt * std::pow(w.x[k], exponents[a]);
    }
    return solve_lsq(cols, target);
}

} // namespace

AsymptoticFit fit_power_series(std::span<const double> x, std::span<const double> y,
                               std::vector<double> exponents, double lo, double hi,
                               double weight_exponent) {
    if (x.size() != y.size() || x.empty())
        throw Error(ErrKind::config, "fit: mismatched or empty samples");
    if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrKind::config, "fit: bad window");
    if (hi / lo < 2.0) throw Error(ErrKind::config, "fit: window ratio must be >= 2");
    if (lo < x.front() - 1e-12 || hi > x.back() + 1e-12)
        throw Error(ErrKind::config, "fit: window outside sampled range");

    WindowData w = select_window(x, y, lo, hi);
    if (w.x.size() < exponents.size() + 4)
        throw Error(ErrKind::config, "fit: too few samples in window");

    SmallLsq full = power_lsq(w, exponents, weight_exponent);
    if (full.condition > 1e8)
        throw Error(ErrKind::fit, "fit ill-conditioned (condition " +
                                      std::to_string(full.condition) + "); widen the window");

    AsymptoticFit out;
    out.exponents = exponents;
    out.coefficients = full.coeff;
    out.condition = full.condition;
    out.residual_rms = full.residual_rms;
    out.window_lo = lo;
    out.window_hi = hi;
    out.n_samples = w.x.size();

    // Leading-coefficient drift between the two window halves.
    double mid = std::sqrt(lo * hi);
    WindowData wa = select_window(x, y, lo, mid), wb = select_window(x, y, mid, hi);
    if (wa.x.size() >= exponents.size() + 2 && wb.x.size() >= exponents.size() + 2) {
        SmallLsq fa = power_lsq(wa, exponents, weight_exponent);
        SmallLsq fb = power_lsq(wb, exponents, weight_exponent);
        double scale = std::max(std::abs(full.coeff[0]), 1e-300);
        out.drift = std::abs(fa.coeff[0] - fb.coeff[0]) / scale;
        out.flagged = out.drift > 0.25;
    }
    return out;
}

AsymptoticFit fit_loglog_slope(std::span<const double> x, std::span<const double> y, double lo,
                               double hi, double floor_value) {
    if (x.size() != y.size() || x.empty())
        throw Error(ErrKind::config, "fit: mismatched or empty samples");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] < lo || x[k] > hi) continue;
        if (std::abs(y[k]) <= floor_value) continue;
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(std::abs(y[k])));
    }
    AsymptoticFit out;
    out.window_lo = lo;
    out.window_hi = hi;
    if (lx.size() < 4) {
        out.identically_zero = true;
        out.exponents = {0.0};
        out.coefficients = {0.0};
        return out;
    }
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sx += lx[k];
        sy += ly[k];
        sxx += lx[k] * lx[k];
        sxy += lx[k] * ly[k];
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw Error(ErrKind::fit, "log-log fit degenerate");
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        double e = ly[k] - (slope * lx[k] + intercept);
        rss += e * e;
    }
    out.exponents = {slope};
    out.coefficients = {std::exp(intercept)};
    out.residual_rms = std::sqrt(rss / n);
    out.n_samples = lx.size();
    return out;
}

} // namespace ac
