#pragma once

// Full conditionals of the Gibbs path: blur, image, auxiliary data and the
// three variance parameters, all evaluated in the Fourier domain.

#include <cstdint>

#include "sbd/convolution.hpp"
#include "sbd/model.hpp"
#include "sbd/rng.hpp"

namespace sbd {

/// Unconstrained blur conditional w | d, c, ...: circulant covariance with
/// eigenvalues eig_cov and mean with transform mean_hat (length n_v).
FourierGaussian blur_conditional(const ModelState& state, const Model& model);
/// Unconstrained image conditional c | d, w*, ... on the lattice grid.
FourierGaussian image_conditional(const ModelState& state, const Model& model);

/// Draws w* (zeros outside the support pinned by Kriging) and sets omega.
void sample_blur_fc(ModelState& state, const Model& model, Rng& rng);
/// Draws c with the known pixels held at c_o.
void sample_image_fc(ModelState& state, const Model& model, Rng& rng);
/// Refreshes the padding nodes of d; observed nodes stay at d_o.
void sample_aux_data_fc(ModelState& state, const Model& model, Rng& rng);

/// (d - W c)^T R_d^{-1} (d - W c)
double ssd(const ModelState& state, const Model& model);
/// omega^T R_omega^{-1} omega
double ssw(const ModelState& state, const Model& model);
/// c^T R_c^{-1} c
double ssc(const ModelState& state, const Model& model);

struct IgParams {
  double shape;
  double scale;
};

IgParams sigma_w_conditional(const ModelState& state, const Model& model);
IgParams sigma_c_conditional(const ModelState& state, const Model& model);
IgParams zeta_conditional(const ModelState& state, const Model& model);

void sample_sigma_w(ModelState& state, const Model& model, Rng& rng);
void sample_sigma_c(ModelState& state, const Model& model, Rng& rng);
void sample_zeta(ModelState& state, const Model& model, Rng& rng);

class HmcSampler;

struct SweepStats {
  std::uint64_t gibbs_blur = 0;
  std::uint64_t hmc_blur = 0;
  std::uint64_t hmc_accepted = 0;
  std::uint64_t hmc_divergent = 0;
  double last_delta_h = 0.0;
};

/// One pass of the hybrid sampler: blur (HMC with probability alpha,
/// otherwise its full conditional), image, auxiliary data, sigma_c^2,
/// sigma_w^2, zeta. `hmc` may be null only when alpha == 0.
void gibbs_sweep(ModelState& state, const Model& model, ChainRng& rng, double alpha, HmcSampler* hmc,
                 SweepStats* stats = nullptr);

}  // namespace sbd
