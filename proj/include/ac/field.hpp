#pragma once

#include "ac/cone.hpp"
#include "ac/fermi.hpp"
#include "ac/leaf.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ac {

enum class NodeClass : std::uint8_t { exterior = 0, interior, neumann_axis, dirichlet };

// Scalar field on the axis-aligned grid covering Omega_d, with per-node
// classification and precomputed cell/face weights r^{i-1} s^{j-1} for the
// reduced energy. wi/wj are the weight exponents (the cone dimensions for
// Omega_d runs, 1/1 for unweighted slab tests).
struct Field2D {
    int nr = 0, ns = 0;       // node counts
    double delta = 0.0;
    int wi = 1, wj = 1;
    std::vector<NodeClass> cls;
    std::vector<double> u;

    std::vector<std::uint8_t> cell_active;  // (nr-1) x (ns-1)
    std::vector<double> cell_w;
    std::vector<double> wface_r;  // face (k,m)-(k+1,m)
    std::vector<double> wface_s;  // face (k,m)-(k,m+1)
    std::vector<double> mass;     // lumped node weight

    std::size_t idx(int k, int m) const { return static_cast<std::size_t>(m) * nr + k; }
    std::size_t cidx(int k, int m) const { return static_cast<std::size_t>(m) * (nr - 1) + k; }
    double r_of(int k) const { return delta * k; }
    double s_of(int m) const { return delta * m; }
    std::size_t count(NodeClass c) const;

    // rebuilds cell/face/mass weights from cls (called by the builders)
    void finalize_weights();
};

struct DomainSpec {
    ConeSpec cone;
    double d = 20.0;
    double delta = 0.1;
};

// Geometry of the cut line L_d (orthogonal to the leaf at (d, f(d))).
struct DomainGeometry {
    Point2 q;            // (d, f(d))
    Point2 tangent;      // unit leaf tangent at q
    Point2 normal;       // unit normal at q
    double l_d = 0.0;    // foot arclength of q
    Point2 axis_r;       // intersection of L_d with s = 0
    Point2 axis_s;       // intersection of L_d with r = 0
};

// Classifies nodes of the bounding box: inside nodes are interior or
// neumann_axis (r=0 / s=0); the first node layer on or beyond L_d adjacent to
// an inside node carries Dirichlet data; everything further out is exterior.
Field2D build_domain(const DomainSpec& spec, const LeafCurve& leaf, DomainGeometry* geom = nullptr);

// Rectangle [0,Lr] x [0,Ls]: Dirichlet top/bottom rows, natural (axis-class)
// side columns; used by the 1D slab tests.
Field2D build_rectangle(double len_r, double len_s, double delta, int wi, int wj);

// Discrete energy: sum over active cells of
//   [ mean of the four edge-difference gradients + mean corner potential ]
// times the midpoint weight r^{wi-1} s^{wj-1} and the cell area.
double assemble_energy(const Field2D& field);

// Continuum-scale sup-norm of the discrete Euler-Lagrange residual
// (energy gradient divided by the lumped weight) over free nodes.
double residual_inf(const Field2D& field);

// dE/du on interior and axis nodes (zero elsewhere); out is resized.
void energy_gradient(const Field2D& field, std::vector<double>& out);

struct SolveConfig {
    double tol = 1e-6;
    int max_iter = 20000;
    double dt0 = 0.25;
    double newton_threshold = 2.0;  // hand off to Newton below this residual
    int max_flow_burst = 30;        // or after this many accepted flow steps
    bool verbose = false;
};

struct SolveReport {
    std::vector<double> energy_history;  // accepted steps only
    double final_residual = 0.0;
    int iterations = 0;       // accepted gradient-flow steps
    int newton_steps = 0;
    int clip_events = 0;
    double wall_time = 0.0;   // seconds; not serialized
    bool converged = false;
};

// Semi-implicit gradient flow (implicit stiffness, explicit cubic) with
// energy-decrease acceptance, then Newton polish. Throws ErrKind::numeric on
// step collapse before the tolerance is met.
SolveReport minimize(Field2D& field, const SolveConfig& cfg = {});

// Evaluates the boundary trace on Dirichlet nodes and the same formula
// (clamped continuation) everywhere else as the initial guess.
void apply_trace_data(Field2D& field, const FermiChart& chart, const TraceParams& params,
                      bool init_interior = true);

struct ComparisonReport {
    double e1 = 0.0, e2 = 0.0, e_min = 0.0, e_max = 0.0;
    double defect = 0.0;          // |J(min)+J(max) - J(u1)-J(u2)|
    double relative_defect = 0.0;
};

// The minimum/maximum comparison identity behind the symmetry argument.
ComparisonReport comparison_check(const Field2D& u1, const Field2D& u2);

struct BarrierReport {
    double lower_violation = 0.0;         // max(B_lower - u, 0), whole domain
    double upper_violation = 0.0;         // max(u - B_upper, 0)
    double lower_violation_sector = 0.0;  // restricted to the rho = 1 sector
    double upper_violation_sector = 0.0;
    double lambda_star = 0.0;
};

// Approximate barriers H(signed distance to the lambda* leaves); the +side
// leaf bounds from below, the -side leaf from above.
BarrierReport barrier_check(const Field2D& field, const ConeSpec& cone, double lambda_star,
                            double eps_cutoff = 0.1);

// Random compactly supported bumps must not lower the energy.
struct PerturbationReport {
    double min_delta = 0.0;   // most negative energy change observed
    int n_tested = 0;
};
PerturbationReport perturbation_check(const Field2D& field, int n, double amplitude,
                                      std::uint64_t seed);

struct ContinuationReport {
    std::vector<double> d_values;
    std::vector<double> sup_differences;  // consecutive, restricted to the smallest domain
    bool decreasing = true;
    bool complete = true;
    std::string failure;  // diagnostic of the member solve that failed, if any
};

// Solves on each Omega_d and reports sup-norm Cauchy differences on the
// common region.
ContinuationReport continuation_sequence(const ConeSpec& cone, const LeafCurve& leaf,
                                         std::span<const double> d_list, double delta,
                                         const TraceParams& params, const SolveConfig& cfg,
                                         std::vector<Field2D>* fields_out = nullptr);

// CSV r,s,u over non-exterior nodes.
std::string field_csv(const Field2D& field);
// Restores values written by field_csv onto a freshly built classification.
void field_from_csv(Field2D& field, const std::string& csv);

} // namespace ac
