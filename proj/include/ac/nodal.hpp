#pragma once

#include "ac/cone.hpp"
#include "ac/fermi.hpp"
#include "ac/field.hpp"
#include "ac/fit.hpp"

#include <string>
#include <vector>

namespace ac {

// Zero level set of a field, chained into a single curve and resampled as a
// graph s = F(r).
struct NodalCurve {
    std::vector<Point2> samples;     // ordered from the axis region outward
    std::vector<double> graph_r;     // uniform r grid
    std::vector<double> graph_s;     // F(r)
    bool monotone = true;
    int monotone_violations = 0;

    double f_at(double r) const;     // linear interpolation of the graph
    double r_min() const { return graph_r.front(); }
    double r_max() const { return graph_r.back(); }
};

// Marching-squares edge crossings chained into one polyline. Throws
// ErrKind::numeric when there is no sign change, ErrKind::geometry when the
// contour has several components (sizes listed in the message).
NodalCurve extract_nodal(const Field2D& field);

// Fermi height h(l): nodal samples mapped through to_fermi and resampled on
// a uniform l grid. Out-of-band points are dropped; more than 20% dropped is
// an error.
struct FermiHeight {
    RadialFunction h;
    std::size_t n_dropped = 0;
    std::size_t n_total = 0;
};
FermiHeight fermi_height(const FermiChart& chart, const NodalCurve& nodal);

// Weighted power fit of h over [lo,hi] against the prescribed exponents
// (weights l^{-alpha+}).
AsymptoticFit fit_asymptotics(const RadialFunction& h, std::vector<double> exponents,
                              double lo, double hi, double weight_exponent);

// F(r) - slope*r against {r^-1, r^alpha+}: (c_ij, k) estimates for general
// cones. For i = j the r^-1 coefficient should vanish.
AsymptoticFit general_cone_expansion(const ConeSpec& cone, const NodalCurve& nodal,
                                     double lo, double hi);

// Vertical-displacement fit used by the d -> infinity study: F(r) - f_a(r)
// against {r^alpha+, r^(alpha+ - 1)} over [lo,hi].
AsymptoticFit nodal_vs_leaf_fit(const ConeSpec& cone, const NodalCurve& nodal,
                                const LeafCurve& leaf, double lo, double hi);

// CSV r,s,l,t (l,t from the chart; NaN columns when a sample is out of band).
std::string nodal_csv(const NodalCurve& nodal, const FermiChart& chart);

std::string fit_json(const AsymptoticFit& fit);

} // namespace ac
