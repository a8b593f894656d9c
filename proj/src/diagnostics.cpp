#include "sbd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "sbd/errors.hpp"
#include "sbd/fft.hpp"

namespace sbd {

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  require(n >= 2 && max_lag < n, ErrorCode::InvalidArgument, "autocorrelation needs max_lag < N");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  // zero-padded FFT: circular correlation of length >= 2N equals the linear one
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  VectorXcd buf = VectorXcd::Zero(static_cast<Index>(len));
  for (std::size_t i = 0; i < n; ++i) buf(static_cast<Index>(i)) = x[i] - mean;
  VectorXcd f = dft(buf);
  for (Index i = 0; i < f.size(); ++i) f(i) = std::norm(f(i));
  const VectorXcd acov = idft(f) * std::sqrt(static_cast<double>(len));
  const double c0 = acov(0).real();
  require(c0 > 0.0, ErrorCode::DegenerateTrace, "trace has zero variance");
  std::vector<double> rho(max_lag + 1);
  for (std::size_t j = 0; j <= max_lag; ++j) rho[j] = acov(static_cast<Index>(j)).real() / c0;
  return rho;
}

double ess(std::span<const double> x, std::size_t max_lag) {
  const double n = static_cast<double>(x.size());
  const auto rho = autocorrelation(x, max_lag);
  const double tau = 1.0 + 2.0 * std::accumulate(rho.begin() + 1, rho.end(), 0.0);
  if (tau <= 0.0) return n;
  return std::clamp(n / tau, std::numeric_limits<double>::min(), n);
}

double msjd(std::span<const double> x) {
  require(x.size() >= 2, ErrorCode::InvalidArgument, "msjd needs at least two samples");
  double acc = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) acc += (x[j] - x[j - 1]) * (x[j] - x[j - 1]);
  return acc / static_cast<double>(x.size());
}

double rmse(std::span<const double> x, double truth) {
  require(!x.empty(), ErrorCode::InvalidArgument, "rmse needs at least one sample");
  double acc = 0.0;
  for (double v : x) acc += (v - truth) * (v - truth);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double quantile(std::vector<double> v, double q) {
  require(!v.empty(), ErrorCode::InvalidArgument, "quantile of an empty trace");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Summary summarize(std::span<const double> x) {
  require(!x.empty(), ErrorCode::InvalidArgument, "summary of an empty trace");
  Summary s;
  const double n = static_cast<double>(x.size());
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.sd = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> v(x.begin(), x.end());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.q025 = quantile(v, 0.025);
  s.q50 = quantile(v, 0.5);
  s.q975 = quantile(v, 0.975);
  return s;
}

}  // namespace sbd
