#pragma once

// Marginal HMC update of the blur. The image is integrated out, so the
// target is p(omega | d, c_o, variances) with
//   d | omega ~ N(W mu~_c, Sigma_{d|omega}),
//   Sigma_{d|omega} = W Sigma~_c W^T + Sigma_d.
// Writing A = W Sigma_c W^T + Sigma_d (BCCB) the constrained part enters
// through m x m blocks only:
//   log|Sigma| = log|Y| + sum log Lambda_A,  Y = L^T S L,  L L^T = K_c^{-1}
//   dbar^T Sigma^{-1} dbar = dbar^H Lambda_A^{-1} dbar + q^T S^{-1} q

#include <cmath>
#include <cstdint>
#include <functional>

#include "sbd/convolution.hpp"
#include "sbd/model.hpp"
#include "sbd/rng.hpp"

namespace sbd {

/// Quantities fixed during one HMC update (data, variances, constraint).
struct MarginalContext {
  const Model* model = nullptr;
  double sigma_c2 = 0.0, sigma_w2 = 0.0, sigma_d2 = 0.0;
  MatrixXd sc_eig;  // sigma_c^2 Lambda_{R_c}
  MatrixXd sd_eig;  // sigma_d^2 Lambda_{R_d}
  MatrixXcd d_hat;
  MatrixXcd mu_hat;
  MatrixXd kc_chol;  // lower G with G G^T = K_c = A_c Sigma_c A_c^T

  /// Throws MaskNotKronecker for a non-separable image constraint.
  static MarginalContext build(const ModelState& state, const Model& model);
  Index m() const { return model->image.m(); }
};

struct MarginalWorkspace {
  VectorXd omega;
  std::uint64_t generation = 0;
  VectorXcd lam_w;
  MatrixXd w2;
  MatrixXd lam_a;
  MatrixXcd dbar_hat;
  VectorXd q;
  MatrixXd s_inv;
  MatrixXcd v_hat;
  MatrixXd v;
  double logdet_a = 0.0, logdet_y = 0.0;
  double quad_a = 0.0, quad_s = 0.0;
  double value = 0.0;

  double logdet_sigma() const { return logdet_a + logdet_y; }
  double quad_form() const { return quad_a + quad_s; }
};

/// U(omega) = -log p(omega | sigma_w^2) - log p(d | omega, ...). Fills ws.
/// Throws IndefiniteY / IndefiniteS.
double potential(const VectorXd& omega, const MarginalContext& ctx, MarginalWorkspace& ws);

/// dU/domega using the workspace of the last potential() call at omega.
/// Throws StaleWorkspace when ws was filled for another omega.
VectorXd grad_potential(const VectorXd& omega, const MarginalContext& ctx, const MarginalWorkspace& ws);

/// Sigma_{d|omega}^{-1} x through the Woodbury form held in ws.
MatrixXd apply_marginal_precision(const MatrixXd& x, const MarginalContext& ctx, const MarginalWorkspace& ws);

struct LeapfrogResult {
  VectorXd omega;
  VectorXd p;
  VectorXd grad;
};

/// L steps of half kick, drift, half kick. grad0 is dU at omega. Throws
/// NonFiniteTrajectory when a state stops being finite.
LeapfrogResult leapfrog(const VectorXd& omega, const VectorXd& p, const VectorXd& grad0, double eps, int steps,
                        const std::function<VectorXd(const VectorXd&)>& grad,
                        const std::function<VectorXd(const VectorXd&)>& minv);

struct HmcConfig {
  int steps = 40;
  double eps = 0.01;
  bool adapt = true;
  double target_accept = 0.65;
  double divergence = 1000.0;

  /// Throws InvalidArgument on steps < 1, eps <= 0 or a target outside (0, 1).
  void validate() const;
};

/// Dual averaging of log step size toward a target acceptance rate.
class DualAveraging {
 public:
  DualAveraging() = default;
  DualAveraging(double eps0, double target);

  void update(double accept_prob);
  double eps() const { return std::exp(log_eps_); }
  double final_eps() const { return std::exp(log_eps_bar_); }

 private:
  double mu_ = 0.0, target_ = 0.65;
  double h_bar_ = 0.0, log_eps_ = 0.0, log_eps_bar_ = 0.0;
  double gamma_ = 0.05, t0_ = 10.0, kappa_ = 0.75;
  int m_ = 0;
};

struct HmcResult {
  bool accepted = false;
  bool divergent = false;
  double delta_h = 0.0;
  double accept_prob = 0.0;
  double eps = 0.0;
};

/// One HMC proposal with momentum p ~ N(0, M), M = (sigma_w^2 R_omega)^{-1}.
HmcResult hmc_update(ModelState& state, const Model& model, double eps, int steps, Rng& rng,
                     double divergence = 1000.0);

/// Step-size state across a chain: adapts during burn-in, then frozen.
class HmcSampler {
 public:
  explicit HmcSampler(const HmcConfig& cfg);

  HmcResult update(ModelState& state, const Model& model, Rng& rng);
  void end_adaptation();
  double eps() const { return eps_; }
  bool adapting() const { return adapting_; }
  const HmcConfig& config() const { return cfg_; }

 private:
  HmcConfig cfg_;
  DualAveraging da_;
  double eps_;
  bool adapting_;
};

}  // namespace sbd
