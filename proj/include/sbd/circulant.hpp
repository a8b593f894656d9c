#pragma once

// Circulant and block-circulant-with-circulant-blocks (BCCB) matrices kept
// in dual form: base and eigenvalues.
//
// Conventions (unitary transforms, see fft.hpp):
//   eigs = sqrt(n) * dft(base),   base = idft(eigs) / sqrt(n)
//   C = F^H diag(eigs) F,  so  C x = idft(eigs .* dft(x))
// The base is the first column of C: C(i, j) = base((i - j) mod n). Every
// row is the previous row cyclically shifted one position to the right.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sbd/fft.hpp"

namespace sbd {

class Circulant {
 public:
  Circulant() = default;

  static Circulant from_base(const VectorXd& base);
  static Circulant from_base(const VectorXcd& base);
  static Circulant from_eigs(const VectorXcd& eigs);
  static Circulant identity(Index n);

  Index order() const { return eigs_.size(); }
  const VectorXcd& eigs() const { return eigs_; }
  const VectorXcd& base() const { return base_; }
  /// Real part of the base; exact for real circulants.
  VectorXd real_base() const { return base_.real(); }
  /// True when all eigenvalues have negligible imaginary part.
  bool has_real_eigs(double tol = 1e-10) const;

  MatrixXd dense() const;
  MatrixXcd dense_complex() const;

  VectorXd apply(const VectorXd& x) const;
  VectorXcd apply(const VectorXcd& x) const;

  Circulant transpose() const;
  /// Throws SingularCirculant when min |eig| <= 1e-12 * max |eig|.
  Circulant inverse() const;
  Circulant scaled(double s) const { return from_eigs(eigs_ * s); }

  friend Circulant operator+(const Circulant& a, const Circulant& b);
  friend Circulant operator-(const Circulant& a, const Circulant& b);
  friend Circulant operator*(const Circulant& a, const Circulant& b);

 private:
  VectorXcd base_;
  VectorXcd eigs_;
};

enum class CircOp { Add, Mul, Transpose, Inverse };

/// Closed-under operations performed on eigenvalues.
Circulant circ_op(CircOp op, const Circulant& a, const Circulant* b = nullptr);

/// Inverse eigenvalue guard shared by circulant and BCCB inversion.
inline constexpr double kSingularTol = 1e-12;

/// Block circulant with circulant blocks of type (num_blocks, block_order),
/// stored as a block_order x num_blocks base grid and eigenvalue grid.
/// Acting on vec(X) for a column-major grid X with block_order rows.
class Bccb {
 public:
  Bccb() = default;

  static Bccb from_base(const MatrixXd& base);
  static Bccb from_base(const MatrixXcd& base);
  static Bccb from_eigs(const MatrixXcd& eigs);
  /// horizontal (x) vertical: eigs(kv, kh) = vertical.eigs(kv) * horizontal.eigs(kh).
  static Bccb kron(const Circulant& horizontal, const Circulant& vertical);

  Index block_order() const { return eigs_.rows(); }
  Index num_blocks() const { return eigs_.cols(); }
  Index size() const { return eigs_.size(); }
  const MatrixXcd& eigs() const { return eigs_; }
  const MatrixXcd& base() const { return base_; }
  MatrixXd real_base() const { return base_.real(); }

  /// Entry (p, q) of the dense matrix, p and q linear column-major indices.
  std::complex<double> entry(Index p, Index q) const;
  MatrixXd dense() const;

  /// Matrix-vector product on a grid; imaginary residue is discarded.
  MatrixXd apply(const MatrixXd& x) const;
  VectorXd apply(const VectorXd& x) const;

  Bccb transpose() const;
  Bccb inverse() const;

 private:
  MatrixXcd base_;
  MatrixXcd eigs_;
};

/// Base grid entries picked out for a set of linear indices: returns the
/// |idx| x |idx| block M(a, b) = C(idx[a], idx[b]) of a real BCCB C given its
/// real base grid.
MatrixXd bccb_block(const MatrixXd& base, const std::vector<Index>& idx);

}  // namespace sbd
