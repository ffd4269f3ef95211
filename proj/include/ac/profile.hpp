#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ac {

// One-dimensional heteroclinic H(t) = tanh(t/sqrt(2)) and its derivatives.
double heteroclinic(double t);
double heteroclinic_d1(double t);
double heteroclinic_d2(double t);

enum class ProfileKind { H, eta, eta2 };

// A sampled profile on a uniform grid symmetric about t = 0.
struct Profile1D {
    ProfileKind kind = ProfileKind::H;
    double t0 = 0.0;   // leftmost grid point (= -T)
    double dt = 0.0;
    std::vector<double> v;
    std::vector<double> dv;

    std::size_t size() const { return v.size(); }
    double t(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    double half_width() const { return -t0; }

    // Cubic Hermite interpolation; 0 outside the grid (the correctors decay
    // exponentially, H callers use the closed form instead).
    double eval(double t) const;
};

struct Moments {
    double sigma0 = 0.0;   // int H'^2 dt
    double c_star = 0.0;   // int t^2 H'^2 dt / int H'^2 dt
};

// Sampled heteroclinic on [-T,T] (closed form, for export and tests).
Profile1D sample_heteroclinic(double half_width, double step);

// Solves the corrector BVP with decay (Dirichlet zero) ends:
//   -q'' + (3H^2-1) q = -t H'                  (eta)
//   -q'' + (3H^2-1) q = t^2 H' - c* H'         (eta2)
// and enforces the discrete orthogonality <q, H'> = 0 by deflating along the
// near-kernel direction. Throws ErrKind::numeric when the achieved residual
// misses the 1e-7 tolerance.
Profile1D solve_corrector(ProfileKind kind, double half_width = 12.0, double step = 0.01);

// Trapezoid moments of the closed-form H'.
Moments moments(double step = 0.005, double half_width = 12.0);

// CSV with columns t,value,derivative.
std::string profile_csv(const Profile1D& p);

} // namespace ac
