#include "sbd/circulant.hpp"

#include <cmath>

#include "sbd/errors.hpp"

namespace sbd {
namespace {

Index wrap(Index i, Index n) {
  const Index r = i % n;
  return r < 0 ? r + n : r;
}

void check_invertible(const MatrixXcd& eigs, const char* what) {
  const double max_abs = eigs.cwiseAbs().maxCoeff();
  const double min_abs = eigs.cwiseAbs().minCoeff();
  require(max_abs > 0.0 && min_abs > kSingularTol * max_abs, ErrorCode::SingularCirculant,
          std::string(what) + " has eigenvalue modulus " + std::to_string(min_abs) +
              " below tolerance (max " + std::to_string(max_abs) + ")");
}

}  // namespace

Circulant Circulant::from_base(const VectorXd& base) {
  return from_base(VectorXcd(base.cast<std::complex<double>>()));
}

Circulant Circulant::from_base(const VectorXcd& base) {
  require(base.size() >= 1, ErrorCode::InvalidArgument, "circulant order must be positive");
  Circulant c;
  c.base_ = base;
  c.eigs_ = std::sqrt(static_cast<double>(base.size())) * dft(base);
  return c;
}

Circulant Circulant::from_eigs(const VectorXcd& eigs) {
  require(eigs.size() >= 1, ErrorCode::InvalidArgument, "circulant order must be positive");
  Circulant c;
  c.eigs_ = eigs;
  c.base_ = idft(eigs) / std::sqrt(static_cast<double>(eigs.size()));
  return c;
}

Circulant Circulant::identity(Index n) { return from_eigs(VectorXcd::Ones(n)); }

bool Circulant::has_real_eigs(double tol) const {
  const double scale = std::max(1.0, eigs_.cwiseAbs().maxCoeff());
  return eigs_.imag().cwiseAbs().maxCoeff() <= tol * scale;
}

MatrixXcd Circulant::dense_complex() const {
  const Index n = order();
  MatrixXcd m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = base_(wrap(i - j, n));
  return m;
}

MatrixXd Circulant::dense() const { return dense_complex().real(); }

VectorXcd Circulant::apply(const VectorXcd& x) const {
  require(x.size() == order(), ErrorCode::DimensionMismatch, "circulant apply");
  return idft(VectorXcd(eigs_.cwiseProduct(dft(x))));
}

VectorXd Circulant::apply(const VectorXd& x) const {
  require(x.size() == order(), ErrorCode::DimensionMismatch, "circulant apply");
  return idft(VectorXcd(eigs_.cwiseProduct(dft(x)))).real();
}

Circulant Circulant::transpose() const {
  // C^T has base b(-j); for a real base that is the conjugate spectrum.
  const Index n = order();
  VectorXcd b(n);
  for (Index j = 0; j < n; ++j) b(j) = base_(wrap(-j, n));
  return from_base(b);
}

Circulant Circulant::inverse() const {
  check_invertible(eigs_, "circulant");
  return from_eigs(eigs_.cwiseInverse());
}

Circulant operator+(const Circulant& a, const Circulant& b) {
  require(a.order() == b.order(), ErrorCode::DimensionMismatch, "circulant add");
  return Circulant::from_eigs(a.eigs_ + b.eigs_);
}

Circulant operator-(const Circulant& a, const Circulant& b) {
  require(a.order() == b.order(), ErrorCode::DimensionMismatch, "circulant subtract");
  return Circulant::from_eigs(a.eigs_ - b.eigs_);
}

Circulant operator*(const Circulant& a, const Circulant& b) {
  require(a.order() == b.order(), ErrorCode::DimensionMismatch, "circulant multiply");
  return Circulant::from_eigs(a.eigs_.cwiseProduct(b.eigs_));
}

Circulant circ_op(CircOp op, const Circulant& a, const Circulant* b) {
  switch (op) {
    case CircOp::Add:
      require(b != nullptr, ErrorCode::InvalidArgument, "add needs two operands");
      return a + *b;
    case CircOp::Mul:
      require(b != nullptr, ErrorCode::InvalidArgument, "mul needs two operands");
      return a * *b;
    case CircOp::Transpose:
      return a.transpose();
    case CircOp::Inverse:
      return a.inverse();
  }
  fail(ErrorCode::InvalidArgument, "unknown circulant op");
}

// ---------------------------------------------------------------------------

Bccb Bccb::from_base(const MatrixXd& base) { return from_base(MatrixXcd(base.cast<std::complex<double>>())); }

Bccb Bccb::from_base(const MatrixXcd& base) {
  require(base.size() >= 1, ErrorCode::InvalidArgument, "BCCB must be non-empty");
  Bccb m;
  m.base_ = base;
  m.eigs_ = std::sqrt(static_cast<double>(base.size())) * dft2(base);
  return m;
}

Bccb Bccb::from_eigs(const MatrixXcd& eigs) {
  require(eigs.size() >= 1, ErrorCode::InvalidArgument, "BCCB must be non-empty");
  Bccb m;
  m.eigs_ = eigs;
  m.base_ = idft2(eigs) / std::sqrt(static_cast<double>(eigs.size()));
  return m;
}

Bccb Bccb::kron(const Circulant& horizontal, const Circulant& vertical) {
  Bccb m;
  m.eigs_ = vertical.eigs() * horizontal.eigs().transpose();
  m.base_ = vertical.base() * horizontal.base().transpose();
  return m;
}

std::complex<double> Bccb::entry(Index p, Index q) const {
  const Index nv = block_order();
  const Index nh = num_blocks();
  return base_(wrap(p % nv - q % nv, nv), wrap(p / nv - q / nv, nh));
}

MatrixXd Bccb::dense() const {
  const Index n = size();
  MatrixXd m(n, n);
  for (Index q = 0; q < n; ++q)
    for (Index p = 0; p < n; ++p) m(p, q) = entry(p, q).real();
  return m;
}

MatrixXd Bccb::apply(const MatrixXd& x) const {
  require(x.rows() == block_order() && x.cols() == num_blocks(), ErrorCode::DimensionMismatch,
          "BCCB apply: grid shape");
  return idft2(MatrixXcd(eigs_.cwiseProduct(dft2(x)))).real();
}

VectorXd Bccb::apply(const VectorXd& x) const {
  require(x.size() == size(), ErrorCode::DimensionMismatch, "BCCB apply: vector length");
  const MatrixXd grid = x.reshaped(block_order(), num_blocks());
  return apply(grid).reshaped();
}

Bccb Bccb::transpose() const {
  const Index nv = block_order();
  const Index nh = num_blocks();
  MatrixXcd b(nv, nh);
  for (Index j = 0; j < nh; ++j)
    for (Index i = 0; i < nv; ++i) b(i, j) = base_(wrap(-i, nv), wrap(-j, nh));
  return from_base(b);
}

Bccb Bccb::inverse() const {
  check_invertible(eigs_, "BCCB");
  return from_eigs(eigs_.cwiseInverse());
}

MatrixXd bccb_block(const MatrixXd& base, const std::vector<Index>& idx) {
  const Index nv = base.rows();
  const Index nh = base.cols();
  const Index m = static_cast<Index>(idx.size());
  MatrixXd out(m, m);
  for (Index b = 0; b < m; ++b)
    for (Index a = 0; a < m; ++a) {
      const Index p = idx[a];
      const Index q = idx[b];
      out(a, b) = base(wrap(p % nv - q % nv, nv), wrap(p / nv - q / nv, nh));
    }
  return out;
}

}  // namespace sbd
