#pragma once

// Unitary discrete Fourier transforms on vectors and column-major grids.
//
// Every transform here carries the 1/sqrt(n) factor in both directions, so
// dft is the action of the Fourier matrix F_n and idft the action of F_n^H.
// A grid is an n_v x n_h matrix whose column-major storage is vec(grid);
// dft2 is then the action of F_{n_h} (x) F_{n_v} on vec(grid).

#include <Eigen/Dense>

namespace sbd {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

VectorXcd dft(const VectorXcd& x);
VectorXcd dft(const VectorXd& x);
VectorXcd idft(const VectorXcd& x);

MatrixXcd dft2(const MatrixXcd& grid);
MatrixXcd dft2(const MatrixXd& grid);
MatrixXcd idft2(const MatrixXcd& grid);

/// Unitary 1-D DFT applied independently to every column.
MatrixXcd dft_columns(const MatrixXcd& grid);
MatrixXcd idft_columns(const MatrixXcd& grid);

/// Unitary 1-D DFT applied independently to every row.
MatrixXcd dft_rows(const MatrixXcd& grid);

/// Dense unitary Fourier matrix F_n (test and oracle use only).
MatrixXcd fourier_matrix(Index n);

}  // namespace sbd
