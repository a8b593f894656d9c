#pragma once

#include <algorithm>

#include <Eigen/Dense>
#include <cmath>

#include "sbd/rng.hpp"

namespace sbdtest {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline sbd::Rng test_rng(std::uint32_t sub = 0) { return sbd::Rng(20240917, sbd::Stream::Test, sub); }

/// Dense circulant from its first column, written out long-hand.
inline MatrixXd dense_circ(const VectorXd& col) {
  const Index n = col.size();
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = col(((i - j) % n + n) % n);
  return m;
}

/// Dense matrix of x -> circular convolution with kernel centred at n/2:
/// (K x)_i = sum_j ker((i - j + n/2) mod n) x_j.
inline MatrixXd dense_centred_conv(const VectorXd& ker) {
  const Index n = ker.size();
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = ker(((i - j + n / 2) % n + n) % n);
  return m;
}

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline VectorXd vec(const MatrixXd& g) { return Eigen::Map<const VectorXd>(g.data(), g.size()); }

inline MatrixXd unvec(const VectorXd& v, Index rows) {
  return Eigen::Map<const MatrixXd>(v.data(), rows, v.size() / rows);
}

inline double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double rel_err(const MatrixXd& a, const MatrixXd& b) {
  const double scale = std::max(1.0, max_abs(b));
  return max_abs(a - b) / scale;
}

/// Dense correlation exp(-(h/phi)^p) with cyclic distance.
inline MatrixXd dense_correlation(Index n, double phi, double p) {
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const Index d = std::abs(i - j);
      const double h = static_cast<double>(std::min(d, n - d));
      m(i, j) = std::exp(-std::pow(h / phi, p));
    }
  return m;
}

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF and
/// its asymptotic p-value with the Stephens small-sample correction.
template <class Cdf>
std::pair<double, double> ks_test(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) p += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
  return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace sbdtest
