#include "ac/profile.hpp"

#include "ac/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace ac;

namespace {

// Independent oracle for sigma0: adaptive Simpson quadrature of H'^2.
double simpson(double (*f)(double), double a, double b, int n) {
    double h = (b - a) / n, acc = f(a) + f(b);
    for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double hp_sq(double t) {
    double v = heteroclinic_d1(t);
    return v * v;
}

} // namespace

TEST_CASE("heteroclinic closed form") {
    CHECK(heteroclinic(0.0) == 0.0);
    CHECK(heteroclinic_d1(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    // H'' = H^3 - H identically
    for (double t : {-7.0, -1.0, 0.3, 1.0, 4.2}) {
        double h = heteroclinic(t);
        CHECK(std::abs(heteroclinic_d2(t) - (h * h * h - h)) < 1e-12);
    }

    // odd, bounded
    for (double t = 0.0; t <= 10.0; t += 0.37) {
        CHECK(heteroclinic(t) == -heteroclinic(-t));
        CHECK(std::abs(heteroclinic(t)) < 1.0);
    }
}

TEST_CASE("moments against the analytic value") {
    Moments m = moments(0.005, 12.0);
    double analytic = 2.0 * std::sqrt(2.0) / 3.0;
    CHECK(std::abs(m.sigma0 - analytic) < 1e-10);
    CHECK(m.c_star > 0.0);

    // c* = pi^2/6 - 1 in closed form (substitute t = sqrt(2) u and use the
    // sech^4 moments int sech^4 = 4/3, int u^2 sech^4 = (pi^2 - 6)/9)
    double pi = 4.0 * std::atan(1.0);
    CHECK(std::abs(m.c_star - (pi * pi / 6.0 - 1.0)) < 1e-10);

    // quadrature oracle agrees
    double oracle = simpson(hp_sq, -12.0, 12.0, 4800);
    CHECK(std::abs(oracle - analytic) < 1e-10);

    // tail convergence and step refinement
    Moments m16 = moments(0.005, 16.0);
    CHECK(std::abs(m.c_star - m16.c_star) < 1e-9);
    Moments mh = moments(0.0025, 12.0);
    CHECK(std::abs(m.sigma0 - mh.sigma0) < 1e-9);
    CHECK(std::abs(m.c_star - mh.c_star) < 1e-9);
}

TEST_CASE("eta corrector") {
    Profile1D eta = solve_corrector(ProfileKind::eta, 12.0, 0.01);
    const std::size_t n = eta.size();
    REQUIRE(n == 2401);

    // odd, zero at the origin
    std::size_t mid = n / 2;
    CHECK(std::abs(eta.v[mid]) < 1e-10);
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::abs(eta.v[k] + eta.v[n - 1 - k]) <= 1e-8);

    // discrete residual and orthogonality re-checked independently
    double resid = 0.0, orth = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double t = eta.t(k);
        double h = heteroclinic(t);
        double lap = (-eta.v[k + 1] + 2.0 * eta.v[k] - eta.v[k - 1]) / (eta.dt * eta.dt);
        resid = std::max(resid, std::abs(lap + (3.0 * h * h - 1.0) * eta.v[k] +
                                         t * heteroclinic_d1(t)));
    }
    for (std::size_t k = 0; k < n; ++k) {
        double w = (k == 0 || k == n - 1) ? 0.5 * eta.dt : eta.dt;
        orth += w * eta.v[k] * heteroclinic_d1(eta.t(k));
    }
    CHECK(resid < 1e-7);
    CHECK(std::abs(orth) < 1e-8);

    // exponential tail: fitted log-slope at most -0.9
    double t_lo = 6.0, t_hi = 10.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double t = eta.t(k);
        if (t < t_lo || t > t_hi || std::abs(eta.v[k]) < 1e-300) continue;
        double lx = t, ly = std::log(std::abs(eta.v[k]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope <= -0.9);
}

TEST_CASE("eta against a variation-of-parameters quadrature oracle") {
    // L y = f with kernel H' factorizes: y = H' phi, (H'^2 phi')' = -f H'.
    // Building eta by two cumulative quadratures is independent of the
    // tridiagonal solve route.
    Profile1D eta = solve_corrector(ProfileKind::eta, 12.0, 0.005);
    const std::size_t n = eta.size();
    const double dt = eta.dt;

    std::vector<double> hp(n), f(n);
    for (std::size_t k = 0; k < n; ++k) {
        double t = eta.t(k);
        hp[k] = heteroclinic_d1(t);
        f[k] = -t * hp[k];
    }
    // F(t) = int_{-T}^t f H'; recompute from the tail on the right half so the
    // ratio F / H'^2 stays stable where H' underflows
    std::vector<double> big_f(n, 0.0), tail(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        big_f[k] = big_f[k - 1] + 0.5 * dt * (f[k] * hp[k] + f[k - 1] * hp[k - 1]);
    for (std::size_t k = n - 1; k-- > 0;)
        tail[k] = tail[k + 1] + 0.5 * dt * (f[k] * hp[k] + f[k + 1] * hp[k + 1]);

    std::vector<double> phi_prime(n);
    for (std::size_t k = 0; k < n; ++k) {
        double ff = eta.t(k) > 0.0 ? -tail[k] : big_f[k];
        phi_prime[k] = -ff / (hp[k] * hp[k]);
    }
    std::vector<double> vp(n, 0.0);
    std::size_t mid = n / 2;
    std::vector<double> phi(n, 0.0);
    for (std::size_t k = mid + 1; k < n; ++k)
        phi[k] = phi[k - 1] + 0.5 * dt * (phi_prime[k] + phi_prime[k - 1]);
    for (std::size_t k = mid; k-- > 0;)
        phi[k] = phi[k + 1] - 0.5 * dt * (phi_prime[k] + phi_prime[k + 1]);
    for (std::size_t k = 0; k < n; ++k) vp[k] = hp[k] * phi[k];

    // project the quadrature solution onto the H'-orthogonal complement
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double w = (k == 0 || k == n - 1) ? 0.5 * dt : dt;
        num += w * vp[k] * hp[k];
        den += w * hp[k] * hp[k];
    }
    for (std::size_t k = 0; k < n; ++k) vp[k] -= (num / den) * hp[k];

    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(eta.t(k)) <= 10.0) worst = std::max(worst, std::abs(vp[k] - eta.v[k]));
    CHECK(worst < 1e-5);
}

TEST_CASE("eta2 corrector") {
    Profile1D eta2 = solve_corrector(ProfileKind::eta2, 12.0, 0.01);
    const std::size_t n = eta2.size();

    // even symmetry
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::abs(eta2.v[k] - eta2.v[n - 1 - k]) <= 1e-8);

    // the right side is orthogonal to H' by the definition of c*
    Moments m = moments(0.01, 12.0);
    double dot = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double t = eta2.t(k);
        double hp = heteroclinic_d1(t);
        double w = (k == 0 || k == n - 1) ? 0.5 * eta2.dt : eta2.dt;
        dot += w * (t * t - m.c_star) * hp * hp;
    }
    CHECK(std::abs(dot) < 1e-10);
}

TEST_CASE("corrector preconditions") {
    CHECK_THROWS_AS(solve_corrector(ProfileKind::eta, 8.0, 0.01), Error);
    CHECK_THROWS_AS(solve_corrector(ProfileKind::eta, 12.0, 0.1), Error);
}

TEST_CASE("sampled H profile invariants") {
    Profile1D h = sample_heteroclinic(12.0, 0.01);
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(std::abs(h.v[k]) < 1.0);
        CHECK(std::abs(h.t(k) + h.t(h.size() - 1 - k)) < 1e-12);
        if (k) CHECK(h.v[k] > h.v[k - 1]);
    }
}

TEST_CASE("profile csv shape") {
    Profile1D h = sample_heteroclinic(10.0, 0.5);
    std::string csv = profile_csv(h);
    CHECK(csv.rfind("t,value,derivative\n", 0) == 0);
    std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == h.size() + 1);
}
