#include "ac/nodal.hpp"

#include "ac/errors.hpp"
#include "ac/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ac {

double NodalCurve::f_at(double r) const {
    if (graph_r.empty()) throw Error(ErrKind::config, "nodal graph empty");
    if (r <= graph_r.front()) return graph_s.front();
    if (r >= graph_r.back()) return graph_s.back();
    std::size_t lo = 0, hi = graph_r.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (graph_r[mid] <= r ? lo : hi) = mid;
    }
    double w = (r - graph_r[lo]) / (graph_r[lo + 1] - graph_r[lo]);
    return (1 - w) * graph_s[lo] + w * graph_s[lo + 1];
}

namespace {

// Grid edge key: horizontal edges (node -> node+east) get even ids,
// vertical edges odd ids.
inline std::uint64_t edge_key(int k, int m, bool vertical, int nr) {
    return (static_cast<std::uint64_t>(m) * nr + k) * 2 + (vertical ? 1 : 0);
}

struct Crossing {
    Point2 p;
};

} // namespace

NodalCurve extract_nodal(const Field2D& field) {
    const int nr = field.nr, ns = field.ns;
    auto sign_of = [&](std::size_t id) { return field.u[id] >= 0.0; };

    std::map<std::uint64_t, Crossing> crossings;
    auto cross_point = [&](int k0, int m0, int k1, int m1) {
        double u0 = field.u[field.idx(k0, m0)], u1 = field.u[field.idx(k1, m1)];
        double w = u0 / (u0 - u1);
        return Point2{field.r_of(k0) + w * (field.r_of(k1) - field.r_of(k0)),
                      field.s_of(m0) + w * (field.s_of(m1) - field.s_of(m0))};
    };

    // adjacency between crossed edges, one segment pair per cell
    std::map<std::uint64_t, std::vector<std::uint64_t>> adj;
    bool any_pos = false, any_neg = false;
    for (std::size_t id = 0; id < field.u.size(); ++id) {
        if (field.cls[id] == NodeClass::exterior) continue;
        (field.u[id] >= 0.0 ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg)
        throw Error(ErrKind::numeric, "extract_nodal: field has no sign change");

    for (int m = 0; m + 1 < ns; ++m)
        for (int k = 0; k + 1 < nr; ++k) {
            if (!field.cell_active[field.cidx(k, m)]) continue;
            bool s00 = sign_of(field.idx(k, m)), s10 = sign_of(field.idx(k + 1, m));
            bool s01 = sign_of(field.idx(k, m + 1)), s11 = sign_of(field.idx(k + 1, m + 1));
            int code = (s00 ? 1 : 0) | (s10 ? 2 : 0) | (s11 ? 4 : 0) | (s01 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            std::uint64_t bottom = edge_key(k, m, false, nr);
            std::uint64_t top = edge_key(k, m + 1, false, nr);
            std::uint64_t left = edge_key(k, m, true, nr);
            std::uint64_t right = edge_key(k + 1, m, true, nr);
            if (s00 != s10) crossings.emplace(bottom, Crossing{cross_point(k, m, k + 1, m)});
            if (s01 != s11) crossings.emplace(top, Crossing{cross_point(k, m + 1, k + 1, m + 1)});
            if (s00 != s01) crossings.emplace(left, Crossing{cross_point(k, m, k, m + 1)});
            if (s10 != s11) crossings.emplace(right, Crossing{cross_point(k + 1, m, k + 1, m + 1)});

            auto link = [&](std::uint64_t a, std::uint64_t b) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            };
            switch (code) {
                case 1: case 14: link(bottom, left); break;
                case 2: case 13: link(bottom, right); break;
                case 3: case 12: link(left, right); break;
                case 4: case 11: link(top, right); break;
                case 6: case 9: link(bottom, top); break;
                case 7: case 8: link(top, left); break;
                case 5: case 10: {
                    // saddle cell: split by the center average
                    double uc = 0.25 * (field.u[field.idx(k, m)] + field.u[field.idx(k + 1, m)] +
                                        field.u[field.idx(k, m + 1)] +
                                        field.u[field.idx(k + 1, m + 1)]);
                    bool center = uc >= 0.0;
                    if ((code == 5) == center) {
                        link(bottom, right);
                        link(top, left);
                    } else {
                        link(bottom, left);
                        link(top, right);
                    }
                    break;
                }
                default: break;
            }
        }

    if (crossings.empty()) throw Error(ErrKind::numeric, "extract_nodal: no crossings found");

    // walk chains
    std::map<std::uint64_t, bool> used;
    std::vector<std::vector<std::uint64_t>> chains;
    for (const auto& [key, nbrs] : adj) {
        if (used[key] || nbrs.size() != 1) continue;  // chain endpoints first
        std::vector<std::uint64_t> chain{key};
        used[key] = true;
        std::uint64_t cur = key;
        while (true) {
            const auto& nb = adj[cur];
            std::uint64_t next = 0;
            bool found = false;
            for (std::uint64_t cand : nb)
                if (!used[cand]) {
                    next = cand;
                    found = true;
                    break;
                }
            if (!found) break;
            used[next] = true;
            chain.push_back(next);
            cur = next;
        }
        chains.push_back(std::move(chain));
    }
    for (const auto& [key, nbrs] : adj) {  // leftover loops
        if (used[key]) continue;
        std::vector<std::uint64_t> chain{key};
        used[key] = true;
        std::uint64_t cur = key;
        while (true) {
            bool found = false;
            for (std::uint64_t cand : adj[cur])
                if (!used[cand]) {
                    used[cand] = true;
                    chain.push_back(cand);
                    cur = cand;
                    found = true;
                    break;
                }
            if (!found) break;
        }
        chains.push_back(std::move(chain));
    }

    if (chains.size() != 1) {
        std::string sizes;
        for (const auto& ch : chains) sizes += (sizes.empty() ? "" : ", ") + std::to_string(ch.size());
        throw Error(ErrKind::geometry,
                    "extract_nodal: " + std::to_string(chains.size()) +
                        " disconnected components (sizes " + sizes + ")");
    }

    NodalCurve nodal;
    nodal.samples.reserve(chains[0].size());
    for (std::uint64_t key : chains[0]) nodal.samples.push_back(crossings.at(key).p);
    // orient from the axis region outward
    if (!nodal.samples.empty() && nodal.samples.front().r > nodal.samples.back().r)
        std::reverse(nodal.samples.begin(), nodal.samples.end());

    // monotone resampling to the graph form s = F(r)
    std::vector<double> rs, ss;
    double prev_r = -1e300;
    for (const Point2& p : nodal.samples) {
        if (p.r <= prev_r + 1e-12) {
            if (p.r < prev_r - 1e-9) ++nodal.monotone_violations;
            continue;
        }
        rs.push_back(p.r);
        ss.push_back(p.s);
        prev_r = p.r;
    }
    if (rs.size() < 4) throw Error(ErrKind::numeric, "extract_nodal: too few graph samples");
    std::size_t n_out = rs.size();
    nodal.graph_r.resize(n_out);
    nodal.graph_s.resize(n_out);
    double r0 = rs.front(), r1 = rs.back();
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n_out; ++k) {
        double r = r0 + (r1 - r0) * static_cast<double>(k) / static_cast<double>(n_out - 1);
        while (seg + 2 < rs.size() && rs[seg + 1] < r) ++seg;
        double w = (r - rs[seg]) / (rs[seg + 1] - rs[seg]);
        w = std::clamp(w, 0.0, 1.0);
        nodal.graph_r[k] = r;
        nodal.graph_s[k] = (1 - w) * ss[seg] + w * ss[seg + 1];
    }
    for (std::size_t k = 1; k < n_out; ++k)
        if (nodal.graph_s[k] < nodal.graph_s[k - 1] - 1e-9) {
            nodal.monotone = false;
            ++nodal.monotone_violations;
        }
    return nodal;
}

FermiHeight fermi_height(const FermiChart& chart, const NodalCurve& nodal) {
    FermiHeight out;
    out.n_total = nodal.samples.size();
    std::vector<std::pair<double, double>> lt;
    for (const Point2& p : nodal.samples) {
        try {
            FermiCoords fc = to_fermi(chart, p);
            lt.emplace_back(fc.l, fc.t);
        } catch (const Error& e) {
            if (e.kind != ErrKind::validity) throw;
            ++out.n_dropped;
        }
    }
    if (out.n_total == 0 || out.n_dropped * 5 > out.n_total)
        throw Error(ErrKind::validity, "fermi_height: more than 20% of nodal points out of band (" +
                                           std::to_string(out.n_dropped) + "/" +
                                           std::to_string(out.n_total) + ")");
    std::sort(lt.begin(), lt.end());
    std::vector<double> ls, ts;
    for (auto& [l, t] : lt) {
        if (!ls.empty() && l <= ls.back() + 1e-12) continue;
        ls.push_back(l);
        ts.push_back(t);
    }
    if (ls.size() < 8) throw Error(ErrKind::numeric, "fermi_height: too few usable points");

    std::size_t n = std::clamp<std::size_t>(ls.size(), 50, 4000);
    RadialFunction h;
    h.l0 = ls.front();
    h.dl = (ls.back() - ls.front()) / static_cast<double>(n - 1);
    h.v.resize(n);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double l = h.l(k);
        while (seg + 2 < ls.size() && ls[seg + 1] < l) ++seg;
        double w = std::clamp((l - ls[seg]) / (ls[seg + 1] - ls[seg]), 0.0, 1.0);
        h.v[k] = (1 - w) * ts[seg] + w * ts[seg + 1];
    }
    h.fill_derivatives();
    out.h = std::move(h);
    return out;
}

AsymptoticFit fit_asymptotics(const RadialFunction& h, std::vector<double> exponents, double lo,
                              double hi, double weight_exponent) {
    std::vector<double> x(h.size()), y(h.v);
    for (std::size_t k = 0; k < h.size(); ++k) x[k] = h.l(k);
    return fit_power_series(x, y, std::move(exponents), lo, hi, weight_exponent);
}

AsymptoticFit general_cone_expansion(const ConeSpec& cone, const NodalCurve& nodal, double lo,
                                     double hi) {
    auto roots = indicial_roots(cone);
    std::vector<double> y(nodal.graph_r.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        y[k] = nodal.graph_s[k] - cone.slope * nodal.graph_r[k];
    return fit_power_series(nodal.graph_r, y, {-1.0, roots.first}, lo, hi, -roots.first);
}

AsymptoticFit nodal_vs_leaf_fit(const ConeSpec& cone, const NodalCurve& nodal,
                                const LeafCurve& leaf, double lo, double hi) {
    auto roots = indicial_roots(cone);
    std::vector<double> y(nodal.graph_r.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        y[k] = nodal.graph_s[k] - leaf.s_at_r(nodal.graph_r[k]);
    return fit_power_series(nodal.graph_r, y, {roots.first, roots.first - 1.0}, lo, hi,
                            -roots.first);
}

std::string nodal_csv(const NodalCurve& nodal, const FermiChart& chart) {
    std::string out = "r,s,l,t\n";
    for (const Point2& p : nodal.samples) {
        double l = std::nan(""), t = std::nan("");
        try {
            FermiCoords fc = to_fermi(chart, p);
            l = fc.l;
            t = fc.t;
        } catch (const Error& e) {
            if (e.kind != ErrKind::validity) throw;
        }
        out += csv_row({fmt_double(p.r), fmt_double(p.s), fmt_double(l), fmt_double(t)});
    }
    return out;
}

std::string fit_json(const AsymptoticFit& fit) {
    std::ostringstream js;
    js << "{";
    js << "\"exponents\":[";
    for (std::size_t k = 0; k < fit.exponents.size(); ++k)
        js << (k ? "," : "") << fmt_double(fit.exponents[k]);
    js << "],\"coefficients\":[";
    for (std::size_t k = 0; k < fit.coefficients.size(); ++k)
        js << (k ? "," : "") << fmt_double(fit.coefficients[k]);
    js << "],\"residual_rms\":" << fmt_double(fit.residual_rms);
    js << ",\"window\":[" << fmt_double(fit.window_lo) << "," << fmt_double(fit.window_hi) << "]";
    js << ",\"condition\":" << fmt_double(fit.condition);
    js << ",\"drift\":" << fmt_double(fit.drift);
    js << ",\"flagged\":" << (fit.flagged ? "true" : "false");
    js << ",\"identically_zero\":" << (fit.identically_zero ? "true" : "false");
    js << ",\"n_samples\":" << fit.n_samples;
    js << "}";
    return js.str();
}

} // namespace ac
