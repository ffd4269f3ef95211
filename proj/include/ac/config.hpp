#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ac {

enum class Command { cone_info, leaf, profile, solve, analyze, sweep };

std::string to_string(Command c);

// Flat key=value run configuration ('#' comments). Keys:
//   command, i, j, a, d, delta, tol, max_iter, lambda_star, epsilon_cutoff,
//   fit_window_lo, fit_window_hi, seed
// `a` accepts a comma-separated list for the sweep command only.
struct RunConfig {
    Command command = Command::cone_info;
    int i = 4;
    int j = 4;
    std::vector<double> a_list{1.0};   // single entry except for sweep
    double d = 20.0;
    double delta = 0.1;
    double tol = 1e-6;
    int max_iter = 20000;
    double lambda_star = 4.0;
    double epsilon_cutoff = 0.1;
    std::optional<double> fit_window_lo;
    std::optional<double> fit_window_hi;
    std::uint64_t seed = 12345;

    std::map<std::string, std::string> raw;  // echoed into reports

    double a() const { return a_list.front(); }
    double window_lo() const { return fit_window_lo ? *fit_window_lo : 0.45 * d; }
    double window_hi() const { return fit_window_hi ? *fit_window_hi : 0.90 * d; }
};

// Parses and validates; collects every error (key, line, reason) instead of
// stopping at the first.
struct ConfigError {
    int line = 0;
    std::string key;
    std::string message;
};

struct ParseResult {
    RunConfig config;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty(); }
};

ParseResult parse_config(const std::string& text);

std::string format_errors(const std::vector<ConfigError>& errors);

} // namespace ac
