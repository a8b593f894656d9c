#pragma once

// Convolution structure of the blur model on an n_v x n_h cyclic lattice.
//
//   P        : cyclic shift by n_v/2, ones on the +-n_v/2 diagonals
//   W0       : circ(P w*), so W0 c_j is the 1-D circular convolution of
//              column c_j with w* centred at index n_v/2
//   W        : I_{n_h} (x) W0
//   Gamma_j  : circ(P c_j), so that W c = Gamma w*
//
// With the first-column base convention of circulant.hpp this is the same
// matrix as circ_row(reverse-then-shift(w*)) under a first-row convention.

#include <Eigen/Dense>

#include "sbd/circulant.hpp"

namespace sbd {

/// P x for even-length x. Throws OddLattice on odd length.
VectorXd shift_half(const VectorXd& x);
MatrixXd shift_half_columns(const MatrixXd& grid);
MatrixXd half_shift_matrix(Index n);

/// Eigenvalues of circ(P x): sqrt(n) * dft(P x).
VectorXcd conv_eigs(const VectorXd& x);
/// Column-wise conv_eigs of a grid: column j holds Lambda_{Gamma_j}.
MatrixXcd conv_eigs_columns(const MatrixXd& grid);

struct ConvolutionOperators {
  Index nv = 0;
  Index nh = 0;
  Circulant w0;
  /// nv x nh grid, column j = eigenvalues of Gamma_j (or of B_j when built
  /// from the constrained image mean).
  MatrixXcd gamma_eigs;

  /// Eigenvalue grid of W = I (x) W0 (each column equals w0.eigs()).
  MatrixXcd w_eigs() const;
  MatrixXd apply_w(const MatrixXd& image) const;
  MatrixXd apply_w_transpose(const MatrixXd& grid) const;
  /// Gamma w for a length-nv blur vector.
  MatrixXd apply_gamma(const VectorXd& w) const;
  /// Gamma^T of a grid, a length-nv vector.
  VectorXd apply_gamma_transpose(const MatrixXd& grid) const;
};

ConvolutionOperators build_convolution_ops(const VectorXd& w_star, const MatrixXd& image);

/// Eigenvalues of Gamma^T (R_{d,h} (x) R_{d,v})^{-1} Gamma, summing over the
/// nonzero entries of the horizontal noise precision. Entries of the
/// precision below sparsity_tol * max |entry| are treated as zeros.
VectorXd gamma_precision_eigs(const MatrixXcd& gamma_eigs, const VectorXd& rdv_eigs,
                              const MatrixXd& horizontal_precision, double sparsity_tol = 1e-12);

}  // namespace sbd
