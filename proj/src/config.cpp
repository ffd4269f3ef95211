#include "ac/config.hpp"

#include "ac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace ac {

std::string to_string(Command c) {
    switch (c) {
        case Command::cone_info: return "cone-info";
        case Command::leaf: return "leaf";
        case Command::profile: return "profile";
        case Command::solve: return "solve";
        case Command::analyze: return "analyze";
        default: return "sweep";
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_double(const std::string& s, double& out) {
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtod(c, &end);
    return end != c && *end == '\0' && std::isfinite(out);
}

bool parse_int(const std::string& s, long long& out) {
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtoll(c, &end, 10);
    return end != c && *end == '\0';
}

const std::set<std::string> kKnownKeys = {
    "command", "i", "j", "a", "d", "delta", "tol", "max_iter", "lambda_star",
    "epsilon_cutoff", "fit_window_lo", "fit_window_hi", "seed"};

} // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult res;
    RunConfig& cfg = res.config;
    auto fail = [&](int line, const std::string& key, const std::string& msg) {
        res.errors.push_back({line, key, msg});
    };

    std::map<std::string, std::pair<std::string, int>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line;
        auto hash = stripped.find('#');
        if (hash != std::string::npos) stripped = stripped.substr(0, hash);
        stripped = trim(stripped);
        if (stripped.empty()) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail(lineno, "", "expected key=value: '" + trim(line) + "'");
            continue;
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string val = trim(stripped.substr(eq + 1));
        if (!kKnownKeys.count(key)) {
            fail(lineno, key, "unknown key");
            continue;
        }
        if (kv.count(key)) {
            fail(lineno, key, "duplicate key (first set on line " +
                                  std::to_string(kv[key].second) + ")");
            continue;
        }
        kv[key] = {val, lineno};
        cfg.raw[key] = val;
    }

    auto has = [&](const std::string& k) { return kv.count(k) > 0; };
    auto get_d = [&](const std::string& k, double& out) {
        if (!has(k)) return false;
        if (!parse_double(kv[k].first, out)) {
            fail(kv[k].second, k, "not a number: '" + kv[k].first + "'");
            return false;
        }
        return true;
    };
    auto get_i = [&](const std::string& k, long long& out) {
        if (!has(k)) return false;
        if (!parse_int(kv[k].first, out)) {
            fail(kv[k].second, k, "not an integer: '" + kv[k].first + "'");
            return false;
        }
        return true;
    };

    if (!has("command")) {
        fail(0, "command", "required key missing");
    } else {
        std::string c = kv["command"].first;
        if (c == "cone-info") cfg.command = Command::cone_info;
        else if (c == "leaf") cfg.command = Command::leaf;
        else if (c == "profile") cfg.command = Command::profile;
        else if (c == "solve") cfg.command = Command::solve;
        else if (c == "analyze") cfg.command = Command::analyze;
        else if (c == "sweep") cfg.command = Command::sweep;
        else fail(kv["command"].second, "command", "unknown command '" + c + "'");
    }

    long long iv;
    if (get_i("i", iv)) {
        if (iv < 2) fail(kv["i"].second, "i", "i >= 2 required");
        else cfg.i = static_cast<int>(iv);
    }
    if (get_i("j", iv)) {
        if (iv < 2) fail(kv["j"].second, "j", "j >= 2 required");
        else cfg.j = static_cast<int>(iv);
    }

    if (has("a")) {
        // comma list allowed for sweep only
        std::vector<double> values;
        std::stringstream ss(kv["a"].first);
        std::string tok;
        bool ok = true;
        while (std::getline(ss, tok, ',')) {
            double v;
            if (!parse_double(trim(tok), v)) {
                fail(kv["a"].second, "a", "not a number: '" + trim(tok) + "'");
                ok = false;
                break;
            }
            values.push_back(v);
        }
        if (ok && values.empty()) {
            fail(kv["a"].second, "a", "empty value");
            ok = false;
        }
        if (ok && values.size() > 1 && cfg.command != Command::sweep)
            fail(kv["a"].second, "a", "list of a values is only valid for command=sweep");
        if (ok) {
            for (double v : values)
                if (v < 0.0) fail(kv["a"].second, "a", "a >= 0 required");
            cfg.a_list = values;
        }
    }

    double dv;
    if (get_d("d", dv)) {
        if (!(dv > 0.0)) fail(kv["d"].second, "d", "d > 0 required");
        else cfg.d = dv;
    }
    if (get_d("delta", dv)) {
        if (!(dv > 0.0) || dv > 0.2)
            fail(kv["delta"].second, "delta", "0 < delta <= 0.2 required");
        else cfg.delta = dv;
    }
    if (get_d("tol", dv)) {
        if (!(dv > 0.0) || dv > 1e-2) fail(kv["tol"].second, "tol", "0 < tol <= 1e-2 required");
        else cfg.tol = dv;
    }
    if (get_i("max_iter", iv)) {
        if (iv < 1) fail(kv["max_iter"].second, "max_iter", "max_iter >= 1 required");
        else cfg.max_iter = static_cast<int>(iv);
    }
    if (get_d("lambda_star", dv)) {
        if (!(dv > 0.0)) fail(kv["lambda_star"].second, "lambda_star", "lambda_star > 0 required");
        else cfg.lambda_star = dv;
    }
    if (get_d("epsilon_cutoff", dv)) {
        if (!(dv > 0.0) || dv >= 0.5)
            fail(kv["epsilon_cutoff"].second, "epsilon_cutoff", "0 < epsilon_cutoff < 0.5 required");
        else cfg.epsilon_cutoff = dv;
    }
    if (get_d("fit_window_lo", dv)) {
        if (!(dv > 0.0)) fail(kv["fit_window_lo"].second, "fit_window_lo", "must be > 0");
        else cfg.fit_window_lo = dv;
    }
    if (get_d("fit_window_hi", dv)) {
        if (!(dv > 0.0)) fail(kv["fit_window_hi"].second, "fit_window_hi", "must be > 0");
        else cfg.fit_window_hi = dv;
    }
    if (get_i("seed", iv)) {
        if (iv < 0) fail(kv["seed"].second, "seed", "seed >= 0 required");
        else cfg.seed = static_cast<std::uint64_t>(iv);
    }

    // cross-field preconditions, checked before any compute starts
    if (res.errors.empty()) {
        bool needs_domain = cfg.command == Command::solve || cfg.command == Command::analyze ||
                            cfg.command == Command::sweep;
        if (needs_domain) {
            for (double a : cfg.a_list) {
                double scale = std::max(1.0, std::cbrt(std::max(a, 0.0)));
                if (cfg.d < 10.0 * scale)
                    fail(has("d") ? kv["d"].second : 0, "d",
                         "d >= 10*max(1, a^(1/3)) required (a = " + std::to_string(a) + ")");
                if (cfg.lambda_star > 0.0 &&
                    !(cfg.lambda_star > std::max(1.0, std::cbrt(std::max(a, 0.0)))))
                    fail(has("lambda_star") ? kv["lambda_star"].second : 0, "lambda_star",
                         "lambda_star > max(1, a^(1/3)) required for the barrier leaves");
            }
        }
        if (cfg.fit_window_lo && cfg.fit_window_hi && !(*cfg.fit_window_lo < *cfg.fit_window_hi))
            fail(kv["fit_window_lo"].second, "fit_window_lo", "fit window must satisfy lo < hi");
    }
    return res;
}

std::string format_errors(const std::vector<ConfigError>& errors) {
    std::string out;
    for (const ConfigError& e : errors) {
        out += "config error";
        if (e.line > 0) out += " (line " + std::to_string(e.line) + ")";
        if (!e.key.empty()) out += " [" + e.key + "]";
        out += ": " + e.message + "\n";
    }
    return out;
}

} // namespace ac
