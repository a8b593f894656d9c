#include "sbd/gauss.hpp"

#include <cmath>
#include <numbers>

namespace sbd {

void HardConstraint::validate(Index dim) const {
  require(static_cast<Index>(selector.size()) == values.size(), ErrorCode::InvalidArgument,
          "constraint selector and values differ in length");
  for (std::size_t i = 0; i < selector.size(); ++i) {
    require(selector[i] >= 0 && selector[i] < dim, ErrorCode::InvalidArgument, "constraint index out of range");
    require(i == 0 || selector[i] > selector[i - 1], ErrorCode::InvalidArgument,
            "constraint indices must be strictly increasing");
  }
}

MatrixXd selection_matrix(const std::vector<Index>& idx, Index dim) {
  MatrixXd a = MatrixXd::Zero(static_cast<Index>(idx.size()), dim);
  for (std::size_t i = 0; i < idx.size(); ++i) a(static_cast<Index>(i), idx[i]) = 1.0;
  return a;
}

VectorXd gather(const VectorXd& x, const std::vector<Index>& idx) {
  VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = x(idx[i]);
  return out;
}

std::vector<Index> complement(const std::vector<Index>& idx, Index dim) {
  std::vector<bool> taken(static_cast<std::size_t>(dim), false);
  for (Index i : idx) taken[static_cast<std::size_t>(i)] = true;
  std::vector<Index> out;
  for (Index i = 0; i < dim; ++i)
    if (!taken[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

SpdSolver::SpdSolver(const MatrixXd& k, ErrorCode code) {
  if (k.rows() == 0) return;
  llt_.compute(k);
  if (llt_.info() == Eigen::Success) return;
  const double nugget = 1e-10 * k.trace() / static_cast<double>(k.rows());
  llt_.compute(k + nugget * MatrixXd::Identity(k.rows(), k.cols()));
  nugget_ = true;
  require(llt_.info() == Eigen::Success && nugget > 0.0, code, "matrix is not numerically positive definite");
}

double SpdSolver::logdet() const {
  if (llt_.rows() == 0) return 0.0;
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

ConditionalParams conditional_params(const VectorXd& mu, const MatrixXd& sigma, const MatrixXd& a,
                                     const MatrixXd& sigma_e, const VectorXd& y) {
  require(sigma.rows() == mu.size() && sigma.cols() == mu.size() && a.cols() == mu.size() &&
              a.rows() == y.size(),
          ErrorCode::DimensionMismatch, "conditional_params");
  if (a.rows() == 0) return {mu, sigma};
  const MatrixXd sat = sigma * a.transpose();
  MatrixXd inner = a * sat;
  if (sigma_e.size() > 0) {
    require(sigma_e.rows() == a.rows() && sigma_e.cols() == a.rows(), ErrorCode::DimensionMismatch,
            "noise covariance");
    inner += sigma_e;
  }
  Eigen::FullPivLU<MatrixXd> lu(inner);
  lu.setThreshold(1e-12);
  require(lu.isInvertible(), ErrorCode::SingularInnovation, "innovation covariance is singular");
  ConditionalParams out;
  out.mean = mu + sat * lu.solve(y - a * mu);
  out.cov = sigma - sat * lu.solve(sat.transpose());
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

ConditionalParams conditional_params(const VectorXd& mu, const MatrixXd& sigma, const HardConstraint& hc) {
  hc.validate(mu.size());
  return conditional_params(mu, sigma, selection_matrix(hc.selector, mu.size()), MatrixXd(), hc.values);
}

MatrixXd sample_fourier_gaussian(const FourierGaussian& g, Rng& rng) {
  require(g.mean_hat.rows() == g.eig_cov.rows() && g.mean_hat.cols() == g.eig_cov.cols(),
          ErrorCode::DimensionMismatch, "sample_fourier_gaussian");
  const double top = g.eig_cov.size() ? g.eig_cov.cwiseAbs().maxCoeff() : 0.0;
  require(g.eig_cov.size() == 0 || g.eig_cov.minCoeff() >= -1e-12 * top, ErrorCode::NegativeEigenvalue,
          "covariance eigenvalue is negative");
  const MatrixXd sd = g.eig_cov.cwiseMax(0.0).cwiseSqrt();
  MatrixXcd xhat = g.mean_hat;
  for (Index j = 0; j < xhat.cols(); ++j)
    for (Index i = 0; i < xhat.rows(); ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      xhat(i, j) += sd(i, j) * std::complex<double>(re, im);
    }
  return idft2(xhat).real();
}

VectorXd condition_by_kriging(const VectorXd& x, const CovarianceAction& action, const HardConstraint& hc) {
  if (hc.empty()) return x;
  return condition_by_kriging(x, action, SpdSolver(action.gram, ErrorCode::SingularConstraintGram), hc);
}

VectorXd condition_by_kriging(const VectorXd& x, const CovarianceAction& action, const SpdSolver& gram,
                              const HardConstraint& hc) {
  if (hc.empty()) return x;
  require(gram.size() == hc.size(), ErrorCode::DimensionMismatch, "kriging gram size");
  const VectorXd resid = gather(x, hc.selector) - hc.values;
  VectorXd out = x - action.sigma_at(gram.solve(resid));
  // The correction is exact in exact arithmetic; pin the fixed coordinates.
  for (Index i = 0; i < hc.size(); ++i) out(hc.selector[static_cast<std::size_t>(i)]) = hc.values(i);
  return out;
}

double gaussian_logpdf(const VectorXd& x, const VectorXd& mu, const MatrixXd& sigma) {
  const Index n = x.size();
  if (n == 0) return 0.0;
  Eigen::LLT<MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, ErrorCode::IllConditioned, "covariance is not positive definite");
  const VectorXd z = llt.matrixL().solve(x - mu);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + logdet + z.squaredNorm());
}

double constrained_logdensity(const VectorXd& x, const VectorXd& mu, const MatrixXd& sigma,
                              const std::vector<Index>& free_selector) {
  const Index n = x.size();
  require(mu.size() == n && sigma.rows() == n, ErrorCode::DimensionMismatch, "constrained_logdensity");
  for (Index i : complement(free_selector, n))
    require(std::abs(x(i) - mu(i)) <= 1e-8, ErrorCode::ConstraintViolated,
            "constrained coordinate " + std::to_string(i) + " differs from its fixed value");
  const auto k = static_cast<Index>(free_selector.size());
  MatrixXd s(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) s(a, b) = sigma(free_selector[a], free_selector[b]);
  return gaussian_logpdf(gather(x, free_selector), gather(mu, free_selector), s);
}

}  // namespace sbd
