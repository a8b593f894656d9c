#pragma once

// Chain diagnostics on scalar traces.

#include <span>
#include <string>
#include <vector>

namespace sbd {

/// N / (1 + 2 sum_{j=1}^{max_lag} rho_j) with the biased, mean-centred
/// autocorrelation; negative terms are kept. Clamped to (0, N].
/// Throws DegenerateTrace for a constant trace, InvalidArgument when
/// max_lag >= N.
double ess(std::span<const double> trace, std::size_t max_lag);

/// Sample autocorrelations rho_0..rho_max_lag (biased estimator).
std::vector<double> autocorrelation(std::span<const double> trace, std::size_t max_lag);

/// sum_{j=1}^{N-1} (x_j - x_{j-1})^2 / N
double msjd(std::span<const double> trace);

/// sqrt(sum_t (x_t - truth)^2 / N)
double rmse(std::span<const double> trace, double truth);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0, max = 0.0;
  double q025 = 0.0, q50 = 0.0, q975 = 0.0;
};

Summary summarize(std::span<const double> trace);
double quantile(std::vector<double> values, double q);

}  // namespace sbd
