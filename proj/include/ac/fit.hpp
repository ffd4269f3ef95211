#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ac {

// Least-squares fit of sampled data against a prescribed power basis
// sum_k c_k * x^{p_k}, plus the diagnostics used to decide whether the
// fitted coefficients are trustworthy.
struct AsymptoticFit {
    std::vector<double> exponents;
    std::vector<double> coefficients;
    double residual_rms = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double condition = 0.0;     // condition number of the weighted design
    double drift = 0.0;         // relative leading-coefficient change between window halves
    bool flagged = false;       // drift above 25%
    bool identically_zero = false;
    std::size_t n_samples = 0;
};

// Weighted least squares of y(x) over [lo,hi] against the given powers.
// Each sample is weighted by x^{weight_exponent} so the columns have
// comparable scale across the window. Throws ErrKind::fit when the design
// is ill-conditioned (condition number > 1e8) and ErrKind::config when the
// window is bad (outside the data, or hi/lo < 2).
AsymptoticFit fit_power_series(std::span<const double> x, std::span<const double> y,
                               std::vector<double> exponents,
                               double lo, double hi, double weight_exponent);

// Log-log slope fit of |y| over [lo,hi]: exponents = {slope},
// coefficients = {amplitude}. Samples with |y| < floor are skipped; when all
// are below floor the fit is reported identically_zero.
AsymptoticFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                               double lo, double hi, double floor_value = 1e-14);

} // namespace ac
