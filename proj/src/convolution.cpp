#include "sbd/convolution.hpp"

#include <cmath>

#include "sbd/errors.hpp"

namespace sbd {

VectorXd shift_half(const VectorXd& x) {
  const Index n = x.size();
  require(n % 2 == 0, ErrorCode::OddLattice, "vertical lattice size must be even, got " + std::to_string(n));
  VectorXd y(n);
  for (Index j = 0; j < n; ++j) y(j) = x((j + n / 2) % n);
  return y;
}

MatrixXd shift_half_columns(const MatrixXd& grid) {
  const Index n = grid.rows();
  require(n % 2 == 0, ErrorCode::OddLattice, "vertical lattice size must be even, got " + std::to_string(n));
  MatrixXd out(grid.rows(), grid.cols());
  out.topRows(n / 2) = grid.bottomRows(n / 2);
  out.bottomRows(n / 2) = grid.topRows(n / 2);
  return out;
}

MatrixXd half_shift_matrix(Index n) {
  require(n % 2 == 0, ErrorCode::OddLattice, "vertical lattice size must be even");
  MatrixXd p = MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) p(j, (j + n / 2) % n) = 1.0;
  return p;
}

VectorXcd conv_eigs(const VectorXd& x) {
  return std::sqrt(static_cast<double>(x.size())) * dft(shift_half(x));
}

MatrixXcd conv_eigs_columns(const MatrixXd& grid) {
  const MatrixXcd shifted = shift_half_columns(grid).cast<std::complex<double>>();
  return std::sqrt(static_cast<double>(grid.rows())) * dft_columns(shifted);
}

MatrixXcd ConvolutionOperators::w_eigs() const { return w0.eigs().replicate(1, nh); }

MatrixXd ConvolutionOperators::apply_w(const MatrixXd& image) const {
  require(image.rows() == nv && image.cols() == nh, ErrorCode::DimensionMismatch, "apply_w");
  MatrixXcd f = dft_columns(image.cast<std::complex<double>>());
  f = f.array().colwise() * w0.eigs().array();
  return idft_columns(f).real();
}

MatrixXd ConvolutionOperators::apply_w_transpose(const MatrixXd& grid) const {
  require(grid.rows() == nv && grid.cols() == nh, ErrorCode::DimensionMismatch, "apply_w_transpose");
  MatrixXcd f = dft_columns(grid.cast<std::complex<double>>());
  f = f.array().colwise() * w0.eigs().conjugate().array();
  return idft_columns(f).real();
}

MatrixXd ConvolutionOperators::apply_gamma(const VectorXd& w) const {
  require(w.size() == nv, ErrorCode::DimensionMismatch, "apply_gamma");
  const VectorXcd wh = dft(w);
  MatrixXcd f = gamma_eigs.array().colwise() * wh.array();
  return idft_columns(f).real();
}

VectorXd ConvolutionOperators::apply_gamma_transpose(const MatrixXd& grid) const {
  require(grid.rows() == nv && grid.cols() == nh, ErrorCode::DimensionMismatch, "apply_gamma_transpose");
  const MatrixXcd f = dft_columns(grid.cast<std::complex<double>>());
  const VectorXcd acc = gamma_eigs.conjugate().cwiseProduct(f).rowwise().sum();
  return idft(acc).real();
}

ConvolutionOperators build_convolution_ops(const VectorXd& w_star, const MatrixXd& image) {
  require(w_star.size() == image.rows(), ErrorCode::DimensionMismatch,
          "blur length must equal the vertical lattice size");
  ConvolutionOperators ops;
  ops.nv = image.rows();
  ops.nh = image.cols();
  ops.w0 = Circulant::from_base(shift_half(w_star));
  ops.gamma_eigs = conv_eigs_columns(image);
  return ops;
}

VectorXd gamma_precision_eigs(const MatrixXcd& gamma_eigs, const VectorXd& rdv_eigs,
                              const MatrixXd& horizontal_precision, double sparsity_tol) {
  const Index nv = gamma_eigs.rows();
  const Index nh = gamma_eigs.cols();
  require(rdv_eigs.size() == nv && horizontal_precision.rows() == nh && horizontal_precision.cols() == nh,
          ErrorCode::DimensionMismatch, "gamma_precision_eigs");
  const double cut = sparsity_tol * horizontal_precision.cwiseAbs().maxCoeff();
  // sum_{i,j} tau(i,j) conj(L_i) L_j / lambda_{R_dv}; tau symmetric so the
  // imaginary parts cancel pairwise.
  VectorXd acc = VectorXd::Zero(nv);
  for (Index i = 0; i < nh; ++i)
    for (Index j = 0; j < nh; ++j) {
      const double tau = horizontal_precision(i, j);
      if (std::abs(tau) < cut) continue;
      acc += tau * (gamma_eigs.col(i).conjugate().cwiseProduct(gamma_eigs.col(j))).real();
    }
  return acc.cwiseQuotient(rdv_eigs);
}

}  // namespace sbd
