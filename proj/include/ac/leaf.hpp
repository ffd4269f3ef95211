#pragma once

#include "ac/cone.hpp"
#include "ac/fit.hpp"

#include <string>
#include <vector>

namespace ac {

// A Hardt-Simon foliation leaf in the (r,s) quadrant, stored as a graph on a
// fine uniform grid of the independent coordinate x:
//   side '+' : s = g(r), g(0) = start_height on the s-axis,
//   side '-' : r = g(s), g(0) = start_height on the r-axis.
// The degenerate "leaf" with start_height = 0 is the cone line s = slope*r
// itself, sampled from x0 > 0.
struct LeafCurve {
    ConeSpec cone;
    char side = '+';
    double start_height = 0.0;
    double lambda = 0.0;       // homothety scale relative to the unit leaf
    bool cone_line = false;

    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> g;
    std::vector<double> dg;
    std::vector<double> d2g;
    std::vector<double> arclen;  // cumulative arclength; cone line measures from the origin

    std::size_t size() const { return g.size(); }
    double x(std::size_t k) const { return x0 + dx * static_cast<double>(k); }
    double x_max() const { return x(size() - 1); }

    double r_of(std::size_t k) const { return side == '+' ? x(k) : g[k]; }
    double s_of(std::size_t k) const { return side == '+' ? g[k] : x(k); }

    // Hermite interpolation of the graph and its slope; x must be in range.
    double g_at(double x) const;
    double dg_at(double x) const;
    double d2g_at(double x) const;

    // Vertical graph s = f(r); side '+' only.
    double s_at_r(double r) const;
    double slope_at_r(double r) const;
    double arclen_at(double x) const;

    // Principal curvatures at sample k with the normal toward the cone side:
    // k1 (mult 1), k_first (mult i-1), k_second (mult j-1).
    CurvatureSet curvatures(std::size_t k) const;
    double a2(std::size_t k) const { return curvatures(k).power_sum(2); }
    double a3(std::size_t k) const { return curvatures(k).power_sum(3); }
};

struct LeafOptions {
    double max_step = 0.02;
    double rel_tol = 1e-11;
    double out_step = 0.0025;
};

// Integrates the symmetric minimal-surface graph ODE
//   g'' / (1+g'^2) + (di-1) g'/x - (dj-1)/g = 0
// from the axis (series start over the first step) out to x_max.
// Refuses unstable cones; reports where the graph would hit the axis.
LeafCurve solve_leaf(const ConeSpec& cone, char side, double start_height,
                     double x_max, const LeafOptions& opts = {});

// The cone line s = slope*r sampled on (0, l_max/sqrt(1+slope^2)].
LeafCurve make_cone_line_leaf(const ConeSpec& cone, double l_max,
                              double out_step = 0.0025);

// Least-squares fit of f(r) - slope*r against {r^a+, r^(a+-1)} on [ra, rb].
AsymptoticFit leaf_asymptotics(const LeafCurve& leaf, double ra, double rb);

// Target leaf whose vertical-graph coefficient equals a: solves the unit
// leaf, measures its coefficient, rescales by homothety.
struct TargetLeaf {
    LeafCurve leaf;
    double unit_coeff = 0.0;
    double lambda = 0.0;
    double coeff = 0.0;      // measured coefficient of the returned leaf
};
TargetLeaf leaf_for_coefficient(const ConeSpec& cone, double a, double r_max);

// Pairwise intersection / ordering report for a family of leaves.
struct FoliationPair {
    std::size_t a = 0;
    std::size_t b = 0;
    enum class Status { disjoint, coincident, intersecting, separated_by_cone } status;
    double min_gap = 0.0;
};
struct FoliationReport {
    std::vector<FoliationPair> pairs;
    bool clean = true;  // no intersecting pair
};
FoliationReport foliation_check(std::span<const LeafCurve> leaves);

// Log-log decay fit of |A3| along the leaf over [ra, rb].
AsymptoticFit curvature_decay_check(const LeafCurve& leaf, double ra, double rb);

// Mean-curvature residual of the stored samples, rebuilt with 4th-order
// finite differences (independent of the ODE identity used to integrate).
double mean_curvature_residual(const LeafCurve& leaf);

// CSV: r,s,arclength,k1,k_top,k_bot,A2,A3 (decimated to ~n_rows).
std::string leaf_csv(const LeafCurve& leaf, std::size_t n_rows = 2400);

} // namespace ac
