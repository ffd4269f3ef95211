#pragma once

#include "ac/cone.hpp"
#include "ac/leaf.hpp"
#include "ac/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ac {

struct Point2 {
    double r = 0.0;
    double s = 0.0;
};

// Fermi coordinates (l, t) with respect to a leaf: l is arclength along the
// curve, t the signed distance with the normal pointing to the upper (cone/+s)
// side. The chart resamples the leaf on a uniform arclength grid and carries
// the per-sample validity band |t| < 0.9/|k1|.
struct FermiChart {
    ConeSpec cone;
    char side = '+';
    double lambda = 0.0;

    double l0 = 0.0;
    double dl = 0.0;
    std::vector<double> r, s;      // curve
    std::vector<double> tr, ts;    // unit tangent
    std::vector<double> nr, ns;    // unit normal (left of the tangent)
    std::vector<double> k1;        // curve curvature
    std::vector<double> a2, a3;
    std::vector<double> band;

    std::size_t size() const { return r.size(); }
    double l(std::size_t k) const { return l0 + dl * static_cast<double>(k); }
    double l_max() const { return l(size() - 1); }

    Point2 point_at(double l) const;
    Point2 normal_at(double l) const;
    double band_at(double l) const;
    double a2_at(double l) const;
    double k1_at(double l) const;
};

FermiChart build_chart(const LeafCurve& leaf);

// gamma(l) + t nu(l); throws ErrKind::validity outside the band or the
// sampled range.
Point2 from_fermi(const FermiChart& chart, double l, double t);

struct FermiCoords {
    double l = 0.0;
    double t = 0.0;
};

// Closest-point inversion: bracketed scan of the squared distance along the
// samples, then Newton polish of (P - gamma(l)) . gamma'(l) = 0. Throws
// ErrKind::validity when the foot leaves the sampled range, |t| exceeds the
// band, or two minima are indistinguishable.
FermiCoords to_fermi(const FermiChart& chart, Point2 p);

// Fast clamped projection used for field initialization, Dirichlet traces and
// barriers: same Newton polish without the global scan; l is clamped to the
// chart range and t saturated at the band.
struct ClampedCoords {
    double l = 0.0;
    double t = 0.0;
    bool clamped = false;
};
ClampedCoords project_clamped(const FermiChart& chart, Point2 p);

// Angular cutoff: 1 on { eps*s < r < s/eps }, 0 on the axes, quintic
// smoothstep in the angle between.
double sector_cutoff(Point2 p, double eps);

// Boundary data H(t - xi(l)) + rho(theta) eta(t - xi(l)) A2(l), clamped into
// (-1, 1); beyond the validity band the value continues constantly (t pinned
// at the band edge).
struct TraceParams {
    const Profile1D* eta = nullptr;
    const RadialFunction* xi = nullptr;   // may be null (xi = 0)
    double eps_cutoff = 0.1;
};

double boundary_trace(const FermiChart& chart, const TraceParams& params, Point2 p);

// CSV: l,r,s,nu_r,nu_s,band.
std::string chart_csv(const FermiChart& chart, std::size_t n_rows = 2400);

} // namespace ac
