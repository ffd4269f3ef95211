#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ac {

enum class MinimizingClass { minimizing, one_sided_minimizer, unstable };

std::string to_string(MinimizingClass c);

// A Lawson cone C_{i,j} = { |x|^2 = (i-1)/(j-1) |y|^2 } in R^i + R^j,
// reduced to the line s = slope * r in the (r,s) quadrant.
struct ConeSpec {
    int i = 0;
    int j = 0;
    int n = 0;                 // ambient dimension i+j
    double slope = 0.0;        // sqrt((j-1)/(i-1))
    double alpha_plus = 0.0;   // indicial exponents (NaN when n < 8)
    double alpha_minus = 0.0;
    MinimizingClass minimizing_class = MinimizingClass::unstable;
};

// Canonicalizes to i <= j (C_{j,i} is the same cone with r and s swapped).
ConeSpec make_cone(int i, int j);

// Principal curvatures of the cone at distance l from the origin, with the
// unit normal pointing to the s > slope*r side.
struct CurvatureSet {
    double k_radial = 0.0;  // multiplicity 1
    double k_first = 0.0;   // multiplicity i-1
    double k_second = 0.0;  // multiplicity j-1
    int mult_first = 0;
    int mult_second = 0;

    double sum() const;             // mean curvature (vanishes on the cone)
    double power_sum(int p) const;  // A_p
};

CurvatureSet principal_curvatures(const ConeSpec& cone, double l);

// A_p = (i-1)(m/l)^p + (j-1)(-1/(m l))^p, p >= 2.
double curvature_power_sum(const ConeSpec& cone, int p, double l);

// Real roots of q(q-1) + (n-2)q + (n-2) = 0; requires n >= 8.
std::pair<double, double> indicial_roots(const ConeSpec& cone);

// A function of l on a uniform grid, with derivative samples.
struct RadialFunction {
    double l0 = 0.0;
    double dl = 0.0;
    std::vector<double> v;
    std::vector<double> d1;
    std::vector<double> d2;

    std::size_t size() const { return v.size(); }
    double l(std::size_t k) const { return l0 + dl * static_cast<double>(k); }
    double l_max() const { return l(size() - 1); }

    // Cubic Hermite inside the grid, clamped to the end values outside.
    double eval(double l) const;

    // Fills d1/d2 by centered differences (one-sided at the ends).
    void fill_derivatives();
};

RadialFunction make_radial(double l0, double l1, std::size_t n,
                           double (*f)(double), double (*f1)(double), double (*f2)(double));

// Pointwise J(h) = h'' + (n-2)/l h' + (n-2)/l^2 h on h's grid.
RadialFunction jacobi_radial(const ConeSpec& cone, const RadialFunction& h);

struct PowerTerm {
    double coeff = 0.0;
    double exponent = 0.0;
};

// Two-point BVP J(h) = rhs on [l0, L] with h(l0) = inner_value.
//
// Power-sum right sides get the exact particular solution subtracted first;
// the remainder solves J(w) = 0 with homogeneous Dirichlet data, so the outer
// truncation does not bias the leading coefficient. The sampled-rhs variant
// imposes h(L) = 0.
RadialFunction solve_jacobi_bvp(const ConeSpec& cone, std::span<const PowerTerm> rhs,
                                double inner_value, double l0, double L,
                                std::size_t n_points = 8001);
RadialFunction solve_jacobi_bvp(const ConeSpec& cone, const RadialFunction& rhs,
                                double inner_value);

// CSV table: i,j,n,slope,alpha_plus,alpha_minus,class.
std::string cone_table_csv(std::span<const ConeSpec> cones);

} // namespace ac
