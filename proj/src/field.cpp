#include "ac/field.hpp"

#include "ac/errors.hpp"
#include "ac/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace ac {

std::size_t Field2D::count(NodeClass c) const {
    std::size_t n = 0;
    for (NodeClass x : cls)
        if (x == c) ++n;
    return n;
}

void Field2D::finalize_weights() {
    const int ncr = nr - 1, ncs = ns - 1;
    cell_active.assign(static_cast<std::size_t>(ncr) * ncs, 0);
    cell_w.assign(static_cast<std::size_t>(ncr) * ncs, 0.0);
    for (int m = 0; m < ncs; ++m)
        for (int k = 0; k < ncr; ++k) {
            NodeClass c00 = cls[idx(k, m)], c10 = cls[idx(k + 1, m)];
            NodeClass c01 = cls[idx(k, m + 1)], c11 = cls[idx(k + 1, m + 1)];
            auto inside = [](NodeClass c) {
                return c == NodeClass::interior || c == NodeClass::neumann_axis;
            };
            bool all_present = c00 != NodeClass::exterior && c10 != NodeClass::exterior &&
                               c01 != NodeClass::exterior && c11 != NodeClass::exterior;
            bool any_inside = inside(c00) || inside(c10) || inside(c01) || inside(c11);
            if (all_present && any_inside) {
                cell_active[cidx(k, m)] = 1;
                double rc = delta * (k + 0.5), sc = delta * (m + 0.5);
                cell_w[cidx(k, m)] = std::pow(rc, wi - 1) * std::pow(sc, wj - 1);
            }
        }

    auto cw = [&](int k, int m) -> double {
        if (k < 0 || m < 0 || k >= ncr || m >= ncs) return 0.0;
        return cell_active[cidx(k, m)] ? cell_w[cidx(k, m)] : 0.0;
    };

    wface_r.assign(u.size(), 0.0);
    wface_s.assign(u.size(), 0.0);
    mass.assign(u.size(), 0.0);
    for (int m = 0; m < ns; ++m)
        for (int k = 0; k < nr; ++k) {
            if (k < ncr) wface_r[idx(k, m)] = 0.5 * (cw(k, m - 1) + cw(k, m));
            if (m < ncs) wface_s[idx(k, m)] = 0.5 * (cw(k - 1, m) + cw(k, m));
            mass[idx(k, m)] = 0.25 * delta * delta *
                              (cw(k - 1, m - 1) + cw(k, m - 1) + cw(k - 1, m) + cw(k, m));
        }
}

Field2D build_domain(const DomainSpec& spec, const LeafCurve& leaf, DomainGeometry* geom_out) {
    if (spec.cone.minimizing_class == MinimizingClass::unstable)
        throw Error(ErrKind::config, "build_domain: unstable cone");
    if (!(spec.delta > 0.0) || spec.delta > 0.2)
        throw Error(ErrKind::config, "build_domain: need 0 < delta <= 0.2");
    double a_scale = std::max(1.0, leaf.lambda);
    if (spec.d < 10.0 * a_scale)
        throw Error(ErrKind::config, "build_domain: need d >= 10 * max(1, leaf scale)");
    if (spec.d > leaf.x_max() - 2.0 * spec.delta)
        throw Error(ErrKind::geometry, "build_domain: leaf not sampled out to d");

    DomainGeometry geom;
    double fd = leaf.s_at_r(spec.d);
    double fp = leaf.slope_at_r(spec.d);
    if (!(fp > 0.0)) throw Error(ErrKind::geometry, "build_domain: leaf tangent not outward");
    double q = std::hypot(1.0, fp);
    geom.q = {spec.d, fd};
    geom.tangent = {1.0 / q, fp / q};
    geom.normal = {-fp / q, 1.0 / q};
    geom.l_d = leaf.arclen_at(spec.d);
    // L_d endpoints on the axes
    double s_at_axis = fd + spec.d / fp;     // r = 0
    double r_at_axis = spec.d + fd * fp;     // s = 0
    if (!(s_at_axis > 0.0) || !(r_at_axis > 0.0) || !std::isfinite(s_at_axis) ||
        !std::isfinite(r_at_axis))
        throw Error(ErrKind::geometry, "build_domain: L_d does not reach both axes");
    geom.axis_s = {0.0, s_at_axis};
    geom.axis_r = {r_at_axis, 0.0};
    if (geom_out) *geom_out = geom;

    Field2D f;
    f.delta = spec.delta;
    f.wi = spec.cone.i;
    f.wj = spec.cone.j;
    f.nr = static_cast<int>(std::ceil((r_at_axis + 2.0 * spec.delta) / spec.delta)) + 1;
    f.ns = static_cast<int>(std::ceil((s_at_axis + 2.0 * spec.delta) / spec.delta)) + 1;
    f.cls.assign(static_cast<std::size_t>(f.nr) * f.ns, NodeClass::exterior);
    f.u.assign(f.cls.size(), 0.0);

    auto side_of = [&](int k, int m) {
        double xr = f.r_of(k) - geom.q.r, xs = f.s_of(m) - geom.q.s;
        return xr * geom.tangent.r + xs * geom.tangent.s;
    };
    std::vector<std::uint8_t> in(f.cls.size(), 0);
    for (int m = 0; m < f.ns; ++m)
        for (int k = 0; k < f.nr; ++k)
            in[f.idx(k, m)] = side_of(k, m) < -1e-12 ? 1 : 0;

    for (int m = 0; m < f.ns; ++m)
        for (int k = 0; k < f.nr; ++k) {
            std::size_t id = f.idx(k, m);
            if (in[id]) {
                f.cls[id] = (k == 0 || m == 0) ? NodeClass::neumann_axis : NodeClass::interior;
            } else {
                bool touches = (k > 0 && in[f.idx(k - 1, m)]) || (k + 1 < f.nr && in[f.idx(k + 1, m)]) ||
                               (m > 0 && in[f.idx(k, m - 1)]) || (m + 1 < f.ns && in[f.idx(k, m + 1)]);
                f.cls[id] = touches ? NodeClass::dirichlet : NodeClass::exterior;
            }
        }
    f.finalize_weights();
    return f;
}

Field2D build_rectangle(double len_r, double len_s, double delta, int wi, int wj) {
    Field2D f;
    f.delta = delta;
    f.wi = wi;
    f.wj = wj;
    f.nr = static_cast<int>(std::llround(len_r / delta)) + 1;
    f.ns = static_cast<int>(std::llround(len_s / delta)) + 1;
    f.cls.assign(static_cast<std::size_t>(f.nr) * f.ns, NodeClass::exterior);
    f.u.assign(f.cls.size(), 0.0);
    for (int m = 0; m < f.ns; ++m)
        for (int k = 0; k < f.nr; ++k) {
            NodeClass c;
            if (m == 0 || m == f.ns - 1)
                c = NodeClass::dirichlet;
            else if (k == 0 || k == f.nr - 1)
                c = NodeClass::neumann_axis;
            else
                c = NodeClass::interior;
            f.cls[f.idx(k, m)] = c;
        }
    f.finalize_weights();
    return f;
}

double assemble_energy(const Field2D& f) {
    long double e = 0.0L;
    const int ncr = f.nr - 1, ncs = f.ns - 1;
    const double inv4d2 = 1.0 / (4.0 * f.delta * f.delta);
    auto w_of = [](double u) {
        double q = u * u - 1.0;
        return 0.25 * q * q;
    };
    for (int m = 0; m < ncs; ++m)
        for (int k = 0; k < ncr; ++k) {
            std::size_t c = f.cidx(k, m);
            if (!f.cell_active[c]) continue;
            double u00 = f.u[f.idx(k, m)], u10 = f.u[f.idx(k + 1, m)];
            double u01 = f.u[f.idx(k, m + 1)], u11 = f.u[f.idx(k + 1, m + 1)];
            double db = u10 - u00, dt = u11 - u01, dl = u01 - u00, dr = u11 - u10;
            double grad = (db * db + dt * dt + dl * dl + dr * dr) * inv4d2;
            double pot = 0.25 * (w_of(u00) + w_of(u10) + w_of(u01) + w_of(u11));
            e += static_cast<long double>(f.cell_w[c]) * f.delta * f.delta * (grad + pot);
        }
    return static_cast<double>(e);
}

namespace {

struct Ops {
    const Field2D* f;
    std::vector<std::uint32_t> free_idx;
    std::vector<std::uint8_t> is_free;

    explicit Ops(const Field2D& field) : f(&field) {
        is_free.assign(field.u.size(), 0);
        for (int m = 0; m < field.ns; ++m)
            for (int k = 0; k < field.nr; ++k) {
                std::size_t id = field.idx(k, m);
                NodeClass c = field.cls[id];
                if ((c == NodeClass::interior || c == NodeClass::neumann_axis) &&
                    field.mass[id] > 0.0) {
                    is_free[id] = 1;
                    free_idx.push_back(static_cast<std::uint32_t>(id));
                }
            }
    }

    // (K x)_i = sum_faces wface (x_i - x_nbr), output on free rows only
    void apply_stiffness(const std::vector<double>& x, std::vector<double>& out) const {
        const Field2D& fd = *f;
        std::fill(out.begin(), out.end(), 0.0);
        for (int m = 0; m < fd.ns; ++m)
            for (int k = 0; k < fd.nr; ++k) {
                std::size_t id = fd.idx(k, m);
                if (!is_free[id]) continue;
                double acc = 0.0, xi = x[id];
                if (k > 0) acc += fd.wface_r[fd.idx(k - 1, m)] * (xi - x[id - 1]);
                if (k + 1 < fd.nr) acc += fd.wface_r[id] * (xi - x[id + 1]);
                if (m > 0) acc += fd.wface_s[fd.idx(k, m - 1)] * (xi - x[id - fd.nr]);
                if (m + 1 < fd.ns) acc += fd.wface_s[id] * (xi - x[id + fd.nr]);
                out[id] = acc;
            }
    }

    double stiffness_diag(std::size_t id, int k, int m) const {
        const Field2D& fd = *f;
        double acc = 0.0;
        if (k > 0) acc += fd.wface_r[fd.idx(k - 1, m)];
        if (k + 1 < fd.nr) acc += fd.wface_r[id];
        if (m > 0) acc += fd.wface_s[fd.idx(k, m - 1)];
        if (m + 1 < fd.ns) acc += fd.wface_s[id];
        return acc;
    }

    // gradient of the discrete energy on free rows
    void gradient(std::vector<double>& out) const {
        apply_stiffness(f->u, out);
        for (std::uint32_t id : free_idx) {
            double u = f->u[id];
            out[id] += f->mass[id] * (u * u * u - u);
        }
    }

    double residual_inf() const {
        std::vector<double> g(f->u.size());
        gradient(g);
        double worst = 0.0;
        for (std::uint32_t id : free_idx) worst = std::max(worst, std::abs(g[id]) / f->mass[id]);
        return worst;
    }
};

// Jacobi-preconditioned CG on the free nodes. apply() must write free rows
// only. Returns achieved relative residual; sets neg_curv on an indefinite
// direction.
template <typename Apply>
double cg_solve(const Ops& ops, Apply&& apply, const std::vector<double>& b,
                std::vector<double>& x, const std::vector<double>& diag, double rtol, int maxit,
                bool* neg_curv) {
    const std::size_t n = b.size();
    std::vector<double> r(n, 0.0), z(n, 0.0), p(n, 0.0), ap(n, 0.0);
    apply(x, ap);
    double bnorm = 0.0;
    for (std::uint32_t id : ops.free_idx) {
        r[id] = b[id] - ap[id];
        bnorm += b[id] * b[id];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return 0.0;
    double rz = 0.0, rnorm = 0.0;
    for (std::uint32_t id : ops.free_idx) {
        z[id] = r[id] / diag[id];
        p[id] = z[id];
        rz += r[id] * z[id];
        rnorm += r[id] * r[id];
    }
    rnorm = std::sqrt(rnorm);
    if (neg_curv) *neg_curv = false;
    for (int it = 0; it < maxit && rnorm > rtol * bnorm; ++it) {
        apply(p, ap);
        double pap = 0.0;
        for (std::uint32_t id : ops.free_idx) pap += p[id] * ap[id];
        if (pap <= 0.0) {
            if (neg_curv) *neg_curv = true;
            break;
        }
        double alpha = rz / pap;
        double rz_new = 0.0;
        rnorm = 0.0;
        for (std::uint32_t id : ops.free_idx) {
            x[id] += alpha * p[id];
            r[id] -= alpha * ap[id];
            z[id] = r[id] / diag[id];
            rz_new += r[id] * z[id];
            rnorm += r[id] * r[id];
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm <= rtol * bnorm || rz_new <= 0.0) break;
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::uint32_t id : ops.free_idx) p[id] = z[id] + beta * p[id];
    }
    return rnorm / bnorm;
}

} // namespace

double residual_inf(const Field2D& field) {
    Ops ops(field);
    return ops.residual_inf();
}

void energy_gradient(const Field2D& field, std::vector<double>& out) {
    Ops ops(field);
    out.assign(field.u.size(), 0.0);
    ops.gradient(out);
}

SolveReport minimize(Field2D& field, const SolveConfig& cfg) {
    auto t_start = std::chrono::steady_clock::now();
    Ops ops(field);
    const std::size_t n = field.u.size();

    SolveReport rep;
    double energy = assemble_energy(field);
    rep.energy_history.push_back(energy);
    double resid = ops.residual_inf();

    double dt = cfg.dt0;
    std::vector<double> rhs(n, 0.0), cand(n, 0.0), diag(n, 1.0), delta(n, 0.0), grad(n, 0.0);

    auto clip_candidate = [&](std::vector<double>& v) {
        double overshoot = 0.0;
        for (std::uint32_t id : ops.free_idx) overshoot = std::max(overshoot, std::abs(v[id]) - 1.0);
        if (overshoot > 1e-6) {
            for (std::uint32_t id : ops.free_idx) v[id] = std::clamp(v[id], -1.0, 1.0);
            ++rep.clip_events;
        }
    };

    int flow_fallbacks = 0;
    int flow_burst = 0;
    bool newton_phase = false;
    while (resid > cfg.tol) {
        if (rep.iterations + rep.newton_steps > cfg.max_iter)
            throw Error(ErrKind::numeric, "minimize: iteration budget exhausted at residual " +
                                              fmt_double(resid));

        if (!newton_phase) {
            // semi-implicit step: (M/dt + K) v = M (u/dt + u - u^3)
            for (std::uint32_t id : ops.free_idx) {
                double u = field.u[id];
                rhs[id] = field.mass[id] * (u / dt + u - u * u * u);
            }
            auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
                ops.apply_stiffness(x, out);
                for (std::uint32_t id : ops.free_idx) out[id] += field.mass[id] / dt * x[id];
            };
            for (int mm = 0; mm < field.ns; ++mm)
                for (int k = 0; k < field.nr; ++k) {
                    std::size_t id = field.idx(k, mm);
                    if (ops.is_free[id])
                        diag[id] = field.mass[id] / dt + ops.stiffness_diag(id, k, mm);
                }
            cand = field.u;
            cg_solve(ops, apply, rhs, cand, diag, 1e-5, 250, nullptr);
            clip_candidate(cand);
            std::swap(field.u, cand);
            double e_new = assemble_energy(field);
            if (e_new <= energy) {
                energy = e_new;
                rep.energy_history.push_back(energy);
                ++rep.iterations;
                ++flow_burst;
                dt = std::min(dt * 1.4, 16.0);
                resid = ops.residual_inf();
                if (resid <= cfg.newton_threshold || flow_burst >= cfg.max_flow_burst) {
                    newton_phase = true;
                    flow_burst = 0;
                }
            } else {
                std::swap(field.u, cand);  // reject
                dt *= 0.5;
                if (dt < 1e-7)
                    throw Error(ErrKind::numeric,
                                "minimize: gradient-flow step collapse at residual " +
                                    fmt_double(resid));
            }
        } else {
            // Newton polish on K u + M (u^3 - u) = 0
            ops.gradient(grad);
            for (std::uint32_t id : ops.free_idx) rhs[id] = -grad[id];
            auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
                ops.apply_stiffness(x, out);
                for (std::uint32_t id : ops.free_idx) {
                    double u = field.u[id];
                    out[id] += field.mass[id] * (3.0 * u * u - 1.0) * x[id];
                }
            };
            for (int mm = 0; mm < field.ns; ++mm)
                for (int k = 0; k < field.nr; ++k) {
                    std::size_t id = field.idx(k, mm);
                    if (!ops.is_free[id]) continue;
                    double u = field.u[id];
                    double d = ops.stiffness_diag(id, k, mm) +
                               field.mass[id] * (3.0 * u * u - 1.0);
                    diag[id] = std::max(d, 1e-12 + 0.05 * ops.stiffness_diag(id, k, mm));
                }
            std::fill(delta.begin(), delta.end(), 0.0);
            bool neg = false;
            double cg_rtol = std::clamp(1e-3 * resid, 1e-10, 1e-5);
            cg_solve(ops, apply, rhs, delta, diag, cg_rtol, 3000, &neg);

            bool accepted = false;
            double alpha = 1.0;
            cand.assign(field.u.begin(), field.u.end());
            for (int ls = 0; ls < 30; ++ls) {
                for (std::uint32_t id : ops.free_idx)
                    field.u[id] = cand[id] + alpha * delta[id];
                clip_candidate(field.u);
                double e_new = assemble_energy(field);
                if (e_new <= energy) {
                    energy = e_new;
                    rep.energy_history.push_back(energy);
                    ++rep.newton_steps;
                    resid = ops.residual_inf();
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                field.u = cand;  // restore
                newton_phase = false;
                dt = std::max(cfg.dt0 * 0.25, 1e-4);
                if (++flow_fallbacks > 6)
                    throw Error(ErrKind::numeric,
                                "minimize: Newton stalled at residual " + fmt_double(resid));
            }
        }
    }

    rep.final_residual = resid;
    rep.converged = true;
    rep.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

void apply_trace_data(Field2D& field, const FermiChart& chart, const TraceParams& params,
                      bool init_interior) {
    for (int m = 0; m < field.ns; ++m)
        for (int k = 0; k < field.nr; ++k) {
            std::size_t id = field.idx(k, m);
            NodeClass c = field.cls[id];
            if (c == NodeClass::exterior) continue;
            if (c != NodeClass::dirichlet && !init_interior) continue;
            field.u[id] = boundary_trace(chart, params, {field.r_of(k), field.s_of(m)});
        }
}

ComparisonReport comparison_check(const Field2D& u1, const Field2D& u2) {
    if (u1.nr != u2.nr || u1.ns != u2.ns || u1.delta != u2.delta || u1.wi != u2.wi ||
        u1.wj != u2.wj || u1.cls != u2.cls)
        throw Error(ErrKind::config, "comparison_check: grid mismatch");
    for (std::size_t id = 0; id < u1.u.size(); ++id)
        if (u1.cls[id] == NodeClass::dirichlet && u1.u[id] != u2.u[id])
            throw Error(ErrKind::config, "comparison_check: Dirichlet data differs");

    Field2D lo = u1, hi = u1;
    for (std::size_t id = 0; id < u1.u.size(); ++id) {
        lo.u[id] = std::min(u1.u[id], u2.u[id]);
        hi.u[id] = std::max(u1.u[id], u2.u[id]);
    }
    ComparisonReport rep;
    rep.e1 = assemble_energy(u1);
    rep.e2 = assemble_energy(u2);
    rep.e_min = assemble_energy(lo);
    rep.e_max = assemble_energy(hi);
    rep.defect = std::abs(rep.e_min + rep.e_max - rep.e1 - rep.e2);
    double scale = std::max({std::abs(rep.e1), std::abs(rep.e2), 1e-300});
    rep.relative_defect = rep.defect / scale;
    return rep;
}

BarrierReport barrier_check(const Field2D& field, const ConeSpec& cone, double lambda_star,
                            double eps_cutoff) {
    if (!(lambda_star > 0.0)) throw Error(ErrKind::config, "barrier_check: lambda_star > 0 required");
    double r_extent = field.delta * (field.nr - 1) * 1.05 + 5.0;
    double s_extent = field.delta * (field.ns - 1) * 1.05 + 5.0;
    LeafCurve gp = solve_leaf(cone, '+', lambda_star, r_extent);
    LeafCurve gm = solve_leaf(cone, '-', lambda_star, s_extent);
    FermiChart cp = build_chart(gp);
    FermiChart cm = build_chart(gm);

    BarrierReport rep;
    rep.lambda_star = lambda_star;
    for (int m = 0; m < field.ns; ++m)
        for (int k = 0; k < field.nr; ++k) {
            std::size_t id = field.idx(k, m);
            if (field.cls[id] == NodeClass::exterior) continue;
            Point2 p{field.r_of(k), field.s_of(m)};
            // +side leaf lies above the nodal set: H(dist) bounds from below;
            // -side leaf bounds from above
            double b_lo = heteroclinic(project_clamped(cp, p).t);
            double b_hi = heteroclinic(project_clamped(cm, p).t);
            double v_lo = std::max(b_lo - field.u[id], 0.0);
            double v_hi = std::max(field.u[id] - b_hi, 0.0);
            rep.lower_violation = std::max(rep.lower_violation, v_lo);
            rep.upper_violation = std::max(rep.upper_violation, v_hi);
            if (sector_cutoff(p, eps_cutoff) >= 0.999) {
                rep.lower_violation_sector = std::max(rep.lower_violation_sector, v_lo);
                rep.upper_violation_sector = std::max(rep.upper_violation_sector, v_hi);
            }
        }
    return rep;
}

PerturbationReport perturbation_check(const Field2D& field, int n, double amplitude,
                                      std::uint64_t seed) {
    Ops ops(field);
    std::mt19937_64 rng(seed);
    double e0 = assemble_energy(field);
    Field2D work = field;

    const int rad = 6;
    const double radius = rad * field.delta;
    std::uniform_int_distribution<std::size_t> pick(0, ops.free_idx.size() - 1);

    PerturbationReport rep;
    rep.min_delta = 0.0;
    for (int trial = 0; trial < n; ++trial) {
        int kc = 0, mc = 0;
        bool found = false;
        for (int attempt = 0; attempt < 400 && !found; ++attempt) {
            std::size_t id = ops.free_idx[pick(rng)];
            kc = static_cast<int>(id % field.nr);
            mc = static_cast<int>(id / field.nr);
            found = true;
            for (int dm = -rad - 1; dm <= rad + 1 && found; ++dm)
                for (int dk = -rad - 1; dk <= rad + 1 && found; ++dk) {
                    int k = kc + dk, m = mc + dm;
                    if (k < 0 || m < 0 || k >= field.nr || m >= field.ns) {
                        if (dk * dk + dm * dm <= rad * rad) found = false;
                        continue;
                    }
                    NodeClass c = field.cls[field.idx(k, m)];
                    if (dk * dk + dm * dm <= rad * rad &&
                        (c == NodeClass::dirichlet || c == NodeClass::exterior))
                        found = false;
                }
        }
        if (!found) continue;
        work.u = field.u;
        for (int dm = -rad; dm <= rad; ++dm)
            for (int dk = -rad; dk <= rad; ++dk) {
                int k = kc + dk, m = mc + dm;
                if (k < 0 || m < 0 || k >= field.nr || m >= field.ns) continue;
                double rho2 = (dk * dk + dm * dm) * field.delta * field.delta / (radius * radius);
                if (rho2 >= 1.0) continue;
                std::size_t id = field.idx(k, m);
                if (!ops.is_free[id]) continue;
                double bump = (1.0 - rho2) * (1.0 - rho2);
                work.u[id] += amplitude * bump;
            }
        double de = assemble_energy(work) - e0;
        rep.min_delta = std::min(rep.min_delta, de);
        ++rep.n_tested;
    }
    return rep;
}

ContinuationReport continuation_sequence(const ConeSpec& cone, const LeafCurve& leaf,
                                         std::span<const double> d_list, double delta,
                                         const TraceParams& params, const SolveConfig& cfg,
                                         std::vector<Field2D>* fields_out) {
    ContinuationReport rep;
    for (std::size_t k = 1; k < d_list.size(); ++k)
        if (!(d_list[k] > d_list[k - 1]))
            throw Error(ErrKind::config, "continuation: d_list must be increasing");

    FermiChart chart = build_chart(leaf);
    std::vector<Field2D> fields;
    for (double d : d_list) {
        rep.d_values.push_back(d);
        try {
            Field2D f = build_domain({cone, d, delta}, leaf);
            apply_trace_data(f, chart, params, true);
            minimize(f, cfg);
            fields.push_back(std::move(f));
        } catch (const Error& e) {
            rep.complete = false;
            rep.failure = e.what();
            break;
        }
    }
    if (fields.size() >= 2) {
        const Field2D& base = fields.front();
        for (std::size_t k = 0; k + 1 < fields.size(); ++k) {
            double sup = 0.0;
            for (int m = 0; m < base.ns; ++m)
                for (int kk = 0; kk < base.nr; ++kk) {
                    std::size_t id = base.idx(kk, m);
                    NodeClass c = base.cls[id];
                    if (c != NodeClass::interior && c != NodeClass::neumann_axis) continue;
                    double a = fields[k].u[fields[k].idx(kk, m)];
                    double b = fields[k + 1].u[fields[k + 1].idx(kk, m)];
                    sup = std::max(sup, std::abs(a - b));
                }
            rep.sup_differences.push_back(sup);
        }
    }
    for (std::size_t k = 1; k < rep.sup_differences.size(); ++k)
        if (!(rep.sup_differences[k] < rep.sup_differences[k - 1])) rep.decreasing = false;
    if (fields_out) *fields_out = std::move(fields);
    return rep;
}

std::string field_csv(const Field2D& field) {
    std::string out = "r,s,u\n";
    for (int m = 0; m < field.ns; ++m)
        for (int k = 0; k < field.nr; ++k) {
            std::size_t id = field.idx(k, m);
            if (field.cls[id] == NodeClass::exterior) continue;
            out += csv_row({fmt_double(field.r_of(k)), fmt_double(field.s_of(m)),
                            fmt_double(field.u[id])});
        }
    return out;
}

void field_from_csv(Field2D& field, const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "r,s,u")
        throw Error(ErrKind::config, "field_from_csv: bad header");
    for (int m = 0; m < field.ns; ++m)
        for (int k = 0; k < field.nr; ++k) {
            std::size_t id = field.idx(k, m);
            if (field.cls[id] == NodeClass::exterior) continue;
            if (!std::getline(in, line))
                throw Error(ErrKind::config, "field_from_csv: too few rows");
            double r, s, u;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &s, &u) != 3)
                throw Error(ErrKind::config, "field_from_csv: bad row: " + line);
            if (std::abs(r - field.r_of(k)) > 1e-9 || std::abs(s - field.s_of(m)) > 1e-9)
                throw Error(ErrKind::config, "field_from_csv: grid mismatch at row: " + line);
            field.u[id] = u;
        }
    if (std::getline(in, line) && !line.empty())
        throw Error(ErrKind::config, "field_from_csv: trailing rows");
}

} // namespace ac
