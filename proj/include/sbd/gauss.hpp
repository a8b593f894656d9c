#pragma once

// Conditional Gaussian machinery: dense conditioning, sampling in the
// Fourier domain, conditioning by Kriging and constrained log-densities.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sbd/errors.hpp"
#include "sbd/fft.hpp"
#include "sbd/rng.hpp"

namespace sbd {

/// A x = b where A selects the coordinates in `selector`.
struct HardConstraint {
  std::vector<Index> selector;
  VectorXd values;

  Index size() const { return static_cast<Index>(selector.size()); }
  bool empty() const { return selector.empty(); }
  /// Throws InvalidArgument unless indices are strictly increasing and < dim.
  void validate(Index dim) const;
};

/// Dense selection matrix with rows e_{idx[i]}^T.
MatrixXd selection_matrix(const std::vector<Index>& idx, Index dim);
VectorXd gather(const VectorXd& x, const std::vector<Index>& idx);
/// Complement of idx in [0, dim).
std::vector<Index> complement(const std::vector<Index>& idx, Index dim);

/// Cholesky of a small SPD matrix. On failure a nugget of
/// 1e-10 * trace / n is added once; a second failure throws `code`.
class SpdSolver {
 public:
  SpdSolver() = default;
  SpdSolver(const MatrixXd& k, ErrorCode code);

  VectorXd solve(const VectorXd& b) const { return llt_.solve(b); }
  MatrixXd solve(const MatrixXd& b) const { return llt_.solve(b); }
  double logdet() const;
  /// Lower-triangular L with L L^T = K (+ nugget).
  MatrixXd matrix_l() const { return llt_.matrixL(); }
  bool used_nugget() const { return nugget_; }
  Index size() const { return llt_.rows(); }

 private:
  Eigen::LLT<MatrixXd> llt_;
  bool nugget_ = false;
};

struct ConditionalParams {
  VectorXd mean;
  MatrixXd cov;
};

/// Parameters of x | A x + e = y with x ~ N(mu, sigma), e ~ N(0, sigma_e).
/// Throws SingularInnovation when A sigma A^T + sigma_e is singular.
ConditionalParams conditional_params(const VectorXd& mu, const MatrixXd& sigma, const MatrixXd& a,
                                     const MatrixXd& sigma_e, const VectorXd& y);
ConditionalParams conditional_params(const VectorXd& mu, const MatrixXd& sigma, const HardConstraint& hc);

/// Gaussian with a circulant or BCCB covariance, held in the Fourier domain.
/// Grids are n_v x n_h; a plain vector is an n x 1 grid.
struct FourierGaussian {
  MatrixXcd mean_hat;
  MatrixXd eig_cov;
};

/// Re(idft2(mean_hat + eig_cov^{1/2} z)) with Re z, Im z iid N(0, 1).
/// Throws NegativeEigenvalue when an eigenvalue is below -1e-12 max.
MatrixXd sample_fourier_gaussian(const FourierGaussian& g, Rng& rng);

/// What conditioning by Kriging needs of the prior covariance: the gram
/// A Sigma A^T and the map y -> Sigma A^T y.
struct CovarianceAction {
  MatrixXd gram;
  std::function<VectorXd(const VectorXd&)> sigma_at;
};

/// x - Sigma A^T (A Sigma A^T)^{-1} (A x - b). Throws SingularConstraintGram.
VectorXd condition_by_kriging(const VectorXd& x, const CovarianceAction& action, const HardConstraint& hc);
/// Variant reusing a factorized gram.
VectorXd condition_by_kriging(const VectorXd& x, const CovarianceAction& action, const SpdSolver& gram,
                              const HardConstraint& hc);

/// log N(x; mu, sigma) with a Cholesky factorization.
double gaussian_logpdf(const VectorXd& x, const VectorXd& mu, const MatrixXd& sigma);

/// log density of the free coordinates of a constrained draw. Throws
/// ConstraintViolated when a fixed coordinate is more than 1e-8 from mu.
double constrained_logdensity(const VectorXd& x, const VectorXd& mu, const MatrixXd& sigma,
                              const std::vector<Index>& free_selector);

}  // namespace sbd
