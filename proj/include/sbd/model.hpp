#pragma once

// Hierarchical semi-blind deconvolution model on an extended cyclic lattice.
//
// Lattice: the observed n_v^o x n_h^o window sits at rows
// [m_v/2, m_v/2 + n_v^o) and columns [0, n_h^o) of the n_v x n_h lattice,
// n_v = n_v^o + m_v, n_h = n_h^o + m_h. Grids are column-major.
//
//   w* | sigma_w^2       zero outside the central k entries, omega inside
//   c  | sigma_c^2       N(0, sigma_c^2 R_c), with m exactly known pixels
//   d  | w*, c, ...      N(W c, sigma_d^2 R_d),  sigma_d^2 = psi sigma_c^2 sigma_w^2 zeta
//   sigma_c^2, sigma_w^2, zeta   inverse gamma

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sbd/circulant.hpp"
#include "sbd/gauss.hpp"

namespace sbd {

struct CorrelationSpec {
  double phi = 1.5;
  double p = 1.0;
};

/// Circulant with base[j] = exp(-(h_j / phi)^p), h_j = min(j, n - j).
Circulant build_correlation(Index n, const CorrelationSpec& spec);

struct LatticeSpec {
  Index nv_obs = 0, nh_obs = 0;
  Index mv = 0, mh = 0;
  Index nv = 0, nh = 0;
  Index k = 0;

  /// Throws OddLattice when n_v^o + m_v is odd.
  static LatticeSpec make(Index nv_obs, Index nh_obs, Index mv, Index mh, Index k);
  /// Padding m_v = ceil(n_v^o / 2), m_h = n_h^o (adjusted by one row when
  /// needed to keep n_v even).
  static LatticeSpec with_default_padding(Index nv_obs, Index nh_obs, Index k);

  Index n() const { return nv * nh; }
  Index row_offset() const { return mv / 2; }
  Index to_linear(Index row, Index col) const { return col * nv + row; }
  /// Lattice index of observed-window position (row, col).
  Index obs_to_linear(Index row, Index col) const { return to_linear(row + row_offset(), col); }
  /// Observed nodes, column-major and increasing.
  std::vector<Index> data_indices() const;
  /// Central k entries of the length-n_v blur vector.
  std::vector<Index> blur_indices() const;
  Index blur_start() const { return nv / 2 - k / 2; }
  bool fully_observed() const { return mv == 0 && mh == 0; }
};

struct HyperParams {
  double alpha_c = 2.00001, beta_c = 1.0 / 500.0;
  double alpha_w = 2.01, beta_w = 10.0;
  double alpha_z = 3.0, beta_z = 0.1;
  double psi = 1.0;
  CorrelationSpec blur{2.0, 1.98};
  CorrelationSpec image_h{1.5, 1.0}, image_v{1.5, 1.0};
  CorrelationSpec noise_h{1.5, 1.0}, noise_v{1.5, 1.0};

  void validate() const;
};

struct BlurPrior {
  Circulant rw;
  MatrixXd rw_tilde;  // n_v x n_v, rank k
  MatrixXd r_omega;   // k x k
  SpdSolver r_omega_solver;
  MatrixXd r_omega_chol;  // lower factor for prior draws
  double r_omega_logdet = 0.0;
  std::vector<Index> support;  // central k indices
  std::vector<Index> zeros;    // the n_v - k fixed-zero indices

  VectorXd lift(const VectorXd& omega) const;
  VectorXd restrict(const VectorXd& w_star) const;
};

BlurPrior build_blur_prior(const LatticeSpec& lat, const HyperParams& hp);

/// Separable view of an image constraint: the same lattice rows are known
/// in every constrained column.
struct KroneckerMask {
  std::vector<Index> rows;
  std::vector<Index> cols;
};

struct ImagePrior {
  Circulant rc_h, rc_v;
  Bccb rc;  // unit-variance correlation R_c = R_{c,h} (x) R_{c,v}
  HardConstraint constraint;  // lattice indices and c_o
  SpdSolver gram;             // A_c R_c A_c^T
  MatrixXd mu_tilde;          // constrained prior mean grid
  std::optional<KroneckerMask> kron;
  MatrixXd rstar_h, rstar_v;  // R*_{c,h}, R*_{c,v} when kron is set

  Index m() const { return constraint.size(); }
};

/// Throws MaskNotKronecker when require_kronecker is set and the mask is not
/// separable.
ImagePrior build_image_prior(const LatticeSpec& lat, const HyperParams& hp, const HardConstraint& image_constraint,
                             bool require_kronecker = false);

/// Dense Sigma~_c / sigma_c^2 from the Kronecker factors.
MatrixXd constrained_image_correlation(const ImagePrior& prior);

struct NoiseModel {
  Circulant rd_h, rd_v;
  Bccb rd;
  MatrixXd rd_h_precision;  // tau
  HardConstraint constraint;  // observed nodes and d_o
  SpdSolver gram_v, gram_h;   // A_dv R_dv A_dv^T, A_dh R_dh A_dh^T
  Index row_offset = 0, nv_obs = 0, nh_obs = 0;
};

NoiseModel build_noise_model(const LatticeSpec& lat, const HyperParams& hp, const MatrixXd& d_obs);

double sigma_d2(double sigma_c2, double sigma_w2, double zeta, double psi);

struct Model {
  LatticeSpec lattice;
  HyperParams hp;
  BlurPrior blur;
  ImagePrior image;
  NoiseModel noise;
  MatrixXd d_obs;
};

/// Image constraint positions are given in observed-window coordinates.
struct ImageObservations {
  std::vector<std::pair<Index, Index>> positions;  // (row, col)
  VectorXd values;
};

Model build_model(const LatticeSpec& lat, const HyperParams& hp, const MatrixXd& d_obs,
                  const ImageObservations& c_obs, bool require_kronecker = false);

struct ModelState {
  VectorXd omega;
  VectorXd w_star;
  MatrixXd c;
  MatrixXd d;
  double sigma_c2 = 1.0;
  double sigma_w2 = 1.0;
  double zeta = 1.0;

  double sigma_d2(double psi) const { return sbd::sigma_d2(sigma_c2, sigma_w2, zeta, psi); }
  void set_omega(const VectorXd& om, const BlurPrior& blur) {
    omega = om;
    w_star = blur.lift(om);
  }
};

/// Replaces the observed values (image values in constraint order) while
/// keeping the observation pattern and all factorizations.
void set_observations(Model& model, const VectorXd& c_values, const MatrixXd& d_obs);

/// Starting state: variances at their prior modes, omega = 0 except a unit
/// central spike, c = mu~_c, d = data placed in the lattice, zeros elsewhere.
ModelState initial_state(const Model& model);

double ig_logpdf(double x, double shape, double scale);

/// log N(x; 0, BCCB with eigenvalue grid eigs) for a real grid x.
double bccb_gaussian_logpdf(const MatrixXd& x, const MatrixXcd& eigs);

/// Sum of the log likelihood, image prior, blur prior and the three
/// inverse gamma priors. Throws NonPositiveVariance.
double log_posterior_unnorm(const ModelState& state, const Model& model);

}  // namespace sbd
