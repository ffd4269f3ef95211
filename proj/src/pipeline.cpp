#include "ac/pipeline.hpp"

#include "ac/cone.hpp"
#include "ac/errors.hpp"
#include "ac/fermi.hpp"
#include "ac/field.hpp"
#include "ac/io.hpp"
#include "ac/leaf.hpp"
#include "ac/nodal.hpp"
#include "ac/profile.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

using json = nlohmann::json;

namespace ac {

ArtifactWriter::ArtifactWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {}

void ArtifactWriter::add(const std::string& rel_path, const std::string& bytes) {
    std::string full = out_dir_ + "/" + rel_path;
    write_file(full, bytes);
    entries_.push_back({rel_path, sha256_hex(bytes), bytes.size()});
}

void ArtifactWriter::write_manifest(const RunConfig& config, const std::string& status,
                                    const std::string& error_kind,
                                    const std::string& error_message) {
    json manifest;
    manifest["command"] = to_string(config.command);
    manifest["config"] = config.raw;
    manifest["status"] = status;
    if (!error_kind.empty())
        manifest["error"] = {{"kind", error_kind}, {"message", error_message}};
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.path < b.path; });
    json files = json::array();
    for (const Entry& e : entries_)
        files.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    manifest["files"] = files;
    write_file(out_dir_ + "/manifest.json", manifest.dump(2) + "\n");
}

namespace {

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

double a3_l3(const ConeSpec& cone) {
    double m = cone.slope;
    return (cone.i - 1) * m * m * m - (cone.j - 1) / (m * m * m);
}

// Nodal displacement forced by the cubic curvature sum: J(xi) = -c* A3 with
// the chart normal pointing to the s-rich side (the sign follows from
// Delta t = -sum k_i/(1 - t k_i) in that orientation). Exact power solution
// -(c* A3_coeff / 2) / l. Null for balanced cones.
std::optional<RadialFunction> make_xi(const ConeSpec& cone, double l_max) {
    double coeff = a3_l3(cone);
    if (std::abs(coeff) < 1e-14) return std::nullopt;
    double cs = moments().c_star;
    PowerTerm rhs{-cs * coeff, -3.0};
    double l0 = 2.0;
    double hi = std::max(30.0, l_max * 1.2);
    return solve_jacobi_bvp(cone, std::span<const PowerTerm>(&rhs, 1),
                            -(cs * coeff / 2.0) / l0, l0, hi);
}

json report_json(const RunConfig& cfg, const SolveReport& rep) {
    json r;
    r["energy_history"] = rep.energy_history;
    r["final_residual"] = rep.final_residual;
    r["iterations"] = rep.iterations;
    r["newton_steps"] = rep.newton_steps;
    r["clip_events"] = rep.clip_events;
    r["converged"] = rep.converged;
    r["config"] = cfg.raw;
    return r;
}

struct CaseResult {
    double c1 = 0.0;            // leading coefficient of F - f_a
    double c1_drift = 0.0;
    double lambda = 0.0;
};

CaseResult run_solve_case(const RunConfig& cfg, double a, ArtifactWriter& writer,
                          const std::string& prefix, bool do_solve) {
    ConeSpec cone = make_cone(cfg.i, cfg.j);
    Profile1D eta = solve_corrector(ProfileKind::eta);

    double r_need = (1.0 + cone.slope * cone.slope) * cfg.d * 1.1 + 10.0;
    TargetLeaf target = leaf_for_coefficient(cone, a, r_need);
    FermiChart chart = build_chart(target.leaf);

    std::optional<RadialFunction> xi = make_xi(cone, chart.l_max());
    TraceParams params{&eta, xi ? &*xi : nullptr, cfg.epsilon_cutoff};

    DomainGeometry geom;
    Field2D field = build_domain({cone, cfg.d, cfg.delta}, target.leaf, &geom);
    apply_trace_data(field, chart, params, true);

    writer.add(prefix + "leaf.csv", leaf_csv(target.leaf));

    json rep_js;
    if (do_solve) {
        SolveConfig scfg;
        scfg.tol = cfg.tol;
        scfg.max_iter = cfg.max_iter;
        SolveReport rep = minimize(field, scfg);
        std::cout << "solve: d=" << cfg.d << " a=" << a << " residual=" << rep.final_residual
                  << " flow=" << rep.iterations << " newton=" << rep.newton_steps << "\n";
        rep_js = report_json(cfg, rep);
        PerturbationReport pert = perturbation_check(field, 20, 0.1, cfg.seed);
        rep_js["perturbation_min_delta"] = pert.min_delta;
        rep_js["perturbation_tested"] = pert.n_tested;

        BarrierReport bar = barrier_check(field, cone, cfg.lambda_star, cfg.epsilon_cutoff);
        json bar_js;
        bar_js["lambda_star"] = bar.lambda_star;
        bar_js["lower_violation"] = bar.lower_violation;
        bar_js["upper_violation"] = bar.upper_violation;
        bar_js["lower_violation_sector"] = bar.lower_violation_sector;
        bar_js["upper_violation_sector"] = bar.upper_violation_sector;
        writer.add(prefix + "barrier.json", bar_js.dump(2) + "\n");
    } else {
        field_from_csv(field, read_file(writer.out_dir() + "/" + prefix + "field.csv"));
    }

    NodalCurve nodal = extract_nodal(field);
    writer.add(prefix + "nodal.csv", nodal_csv(nodal, chart));

    double wlo = cfg.window_lo(), whi = cfg.window_hi();
    json fits;
    fits["a"] = a;
    fits["lambda"] = target.lambda;
    fits["unit_coeff"] = target.unit_coeff;
    fits["leaf_coeff"] = target.coeff;
    CaseResult result;
    result.lambda = target.lambda;
    {
        AsymptoticFit f = nodal_vs_leaf_fit(cone, nodal, target.leaf, wlo, whi);
        fits["nodal_vs_leaf"] = json::parse(fit_json(f));
        result.c1 = f.coefficients[0];
        result.c1_drift = f.drift;
    }
    {
        AsymptoticFit f = general_cone_expansion(cone, nodal, wlo, whi);
        fits["general_expansion"] = json::parse(fit_json(f));
    }
    try {
        FermiHeight fh = fermi_height(chart, nodal);
        double scale = std::hypot(1.0, cone.slope);
        double llo = std::max(wlo * scale, fh.h.l0 * 1.02);
        double lhi = std::min(whi * scale, fh.h.l_max() * 0.98);
        if (lhi / llo >= 2.0) {
            auto roots = indicial_roots(cone);
            AsymptoticFit f = fit_asymptotics(fh.h, {roots.first, roots.first - 1.0}, llo, lhi,
                                              -roots.first);
            fits["fermi_height"] = json::parse(fit_json(f));
        }
        fits["fermi_height_dropped"] = fh.n_dropped;
    } catch (const Error& e) {
        fits["fermi_height_error"] = e.what();
    }

    if (do_solve) writer.add(prefix + "report.json", rep_js.dump(2) + "\n");
    writer.add(prefix + "field.csv", field_csv(field));
    writer.add(prefix + "fit.json", fits.dump(2) + "\n");
    return result;
}

void run_cone_info(const RunConfig& cfg, ArtifactWriter& writer) {
    ConeSpec cone = make_cone(cfg.i, cfg.j);
    writer.add("cone.csv", cone_table_csv(std::span<const ConeSpec>(&cone, 1)));
    json js;
    js["i"] = cone.i;
    js["j"] = cone.j;
    js["n"] = cone.n;
    js["slope"] = cone.slope;
    js["class"] = to_string(cone.minimizing_class);
    if (cone.n >= 8) {
        js["alpha_plus"] = cone.alpha_plus;
        js["alpha_minus"] = cone.alpha_minus;
    }
    js["a2_times_l2"] = cone.n - 2;  // A2 = (n-2)/l^2 for every Lawson cone
    js["a3_times_l3"] = a3_l3(cone);
    writer.add("cone.json", js.dump(2) + "\n");
    std::cout << "C_{" << cone.i << "," << cone.j << "}: n=" << cone.n << " slope=" << cone.slope
              << " class=" << to_string(cone.minimizing_class) << " A2*l^2=" << cone.n - 2
              << "\n";
}

void run_profile(ArtifactWriter& writer) {
    Profile1D h = sample_heteroclinic(12.0, 0.01);
    Profile1D eta = solve_corrector(ProfileKind::eta);
    Profile1D eta2 = solve_corrector(ProfileKind::eta2);
    Moments mom = moments();
    writer.add("H.csv", profile_csv(h));
    writer.add("eta.csv", profile_csv(eta));
    writer.add("eta2.csv", profile_csv(eta2));
    json js;
    js["sigma0"] = mom.sigma0;
    js["c_star"] = mom.c_star;
    js["sigma0_analytic"] = 2.0 * std::sqrt(2.0) / 3.0;
    writer.add("moments.json", js.dump(2) + "\n");
}

void run_leaf(const RunConfig& cfg, ArtifactWriter& writer) {
    ConeSpec cone = make_cone(cfg.i, cfg.j);
    double a = cfg.a();
    double r_max = 66.0 * std::max(1.0, std::cbrt(std::max(a, 1.0)));
    TargetLeaf target = leaf_for_coefficient(cone, a, r_max);
    writer.add("leaf.csv", leaf_csv(target.leaf));
    writer.add("chart.csv", chart_csv(build_chart(target.leaf)));
    json js;
    js["a"] = a;
    js["lambda"] = target.lambda;
    js["unit_coeff"] = target.unit_coeff;
    js["leaf_coeff"] = target.coeff;
    if (!target.leaf.cone_line) {
        double scale = std::max(1.0, target.lambda);
        AsymptoticFit fit = leaf_asymptotics(target.leaf, 20.0 * scale,
                                             std::min(60.0 * scale, 0.95 * target.leaf.x_max()));
        js["fit"] = json::parse(fit_json(fit));
        js["mean_curvature_residual"] = mean_curvature_residual(target.leaf);
    }
    writer.add("leaf_fit.json", js.dump(2) + "\n");
}

void run_sweep(const RunConfig& cfg, ArtifactWriter& writer) {
    json summary;
    summary["a"] = json::array();
    summary["c1"] = json::array();
    summary["lambda"] = json::array();
    for (double a : cfg.a_list) {
        std::string prefix = "a_" + trim_number(a) + "/";
        RunConfig member = cfg;
        member.a_list = {a};
        CaseResult res = run_solve_case(member, a, writer, prefix, true);
        summary["a"].push_back(a);
        summary["c1"].push_back(res.c1);
        summary["lambda"].push_back(res.lambda);
    }
    writer.add("summary.json", summary.dump(2) + "\n");
}

} // namespace

int run_pipeline(const RunConfig& config, const std::string& out_dir) {
    ArtifactWriter writer(out_dir);
    try {
        switch (config.command) {
            case Command::cone_info: run_cone_info(config, writer); break;
            case Command::profile: run_profile(writer); break;
            case Command::leaf: run_leaf(config, writer); break;
            case Command::solve: run_solve_case(config, config.a(), writer, "", true); break;
            case Command::analyze: run_solve_case(config, config.a(), writer, "", false); break;
            case Command::sweep: run_sweep(config, writer); break;
        }
        writer.write_manifest(config, "ok");
        return 0;
    } catch (const Error& e) {
        const char* kind = e.kind == ErrKind::config ? "config"
                           : e.kind == ErrKind::numeric ? "numeric"
                           : e.kind == ErrKind::geometry ? "geometry"
                           : e.kind == ErrKind::validity ? "validity"
                                                         : "fit";
        std::cerr << "error (" << kind << "): " << e.what() << "\n";
        try {
            writer.write_manifest(config, "error", kind, e.what());
        } catch (const std::exception&) {
            // output directory itself unusable; the stderr diagnostic stands
        }
        return exit_code_for(e.kind);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            writer.write_manifest(config, "error", "internal", e.what());
        } catch (const std::exception&) {
        }
        return 1;
    }
}

} // namespace ac
