#pragma once

// Brute-force dense reference for every structured computation. Matrices
// are assembled entry by entry from the model definition; no FFT is used.
// Test and acceptance use only.

#include <functional>

#include "sbd/gauss.hpp"
#include "sbd/model.hpp"

namespace sbd {

inline constexpr Index kDenseMaxDim = 4096;

MatrixXd dense_correlation(Index n, const CorrelationSpec& spec);
/// (K x)_i = sum_j ker((i - j + n/2) mod n) x_j
MatrixXd dense_centred_convolution(const VectorXd& ker);

struct DenseModel {
  MatrixXd rw, rw_tilde, r_omega;
  MatrixXd w;      // I (x) W0
  MatrixXd gamma;  // n x n_v, W c = Gamma w*
  MatrixXd b;      // n x n_v, W mu~_c = B w*
  MatrixXd sigma_c, sigma_c_tilde;
  VectorXd mu_c;
  MatrixXd sigma_d;
  MatrixXd sigma_dw;  // W Sigma~_c W^T + Sigma_d
};

/// Throws TooLarge when the lattice has more than 4096 nodes.
DenseModel build_dense_model(const Model& model, const ModelState& state);

/// Literal x | A x = b with explicit inversion. Throws TooLarge.
ConditionalParams dense_conditional(const VectorXd& mu, const MatrixXd& sigma, const std::vector<Index>& selector,
                                    const VectorXd& b);

/// w* | d from the joint of (w*, d) with the unconstrained prior.
ConditionalParams dense_blur_conditional(const Model& model, const ModelState& state, bool zero_constraint = false);
/// c | d from the joint of (c, d); optionally also given c_o.
ConditionalParams dense_image_conditional(const Model& model, const ModelState& state, bool with_constraint = false);
/// d | w*, c, d_o
ConditionalParams dense_aux_conditional(const Model& model, const ModelState& state);

/// Throws IndefiniteDense.
double dense_logdet(const MatrixXd& sigma);
double dense_quadform(const MatrixXd& sigma, const VectorXd& x);

/// U(omega) with Sigma_{d|omega} assembled explicitly.
double dense_marginal_potential(const VectorXd& omega, const Model& model, const ModelState& state);

/// Central differences with step h in [1e-7, 1e-3].
VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double h);

}  // namespace sbd
