#pragma once

// Synthetic data generation and the two simulation studies: the
// constraint sweep on a 24 x 1 lattice and the padding sweep on 24 x 6.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbd/diagnostics.hpp"
#include "sbd/gibbs.hpp"
#include "sbd/hmc.hpp"
#include "sbd/model.hpp"

namespace sbd {

struct SimRecipe {
  Index nv_obs = 24, nh_obs = 6;
  Index k = 10;
  /// Generation lattice is gen_factor times the observed window in each
  /// direction; the window is cropped from its centre.
  Index gen_factor = 10;
  HyperParams hp;
  std::uint64_t seed = 1;
  /// Column of the window holding the exact image observations; the
  /// central column when unset.
  std::optional<Index> exact_column;
  /// Forced variances; sampled from their priors when unset.
  std::optional<double> sigma_c2, sigma_w2, zeta;

  Index gen_nv() const { return gen_factor * nv_obs; }
  Index gen_nh() const { return gen_factor * nh_obs; }
  Index column() const { return exact_column.value_or(nh_obs / 2); }
  void validate() const;
};

struct SimTruth {
  VectorXd omega;
  MatrixXd image;  // generation lattice
  MatrixXd data;   // generation lattice
  Index row0 = 0, col0 = 0;  // window origin on the generation lattice
  double sigma_c2 = 0.0, sigma_w2 = 0.0, zeta = 0.0;
};

struct Dataset {
  MatrixXd d_obs;  // n_v^o x n_h^o
  MatrixXd c_window;
  Index exact_column = 0;
  SimTruth truth;
  std::uint64_t seed = 0;

  /// Exact observations on the given window rows of the exact column.
  ImageObservations image_observations(const std::vector<Index>& rows) const;
  /// Every row of the exact column.
  ImageObservations image_observations() const;
};

Dataset simulate_dataset(const SimRecipe& recipe, Rng& rng);
Dataset simulate_dataset(const SimRecipe& recipe);

/// True image aligned with a model lattice: padding rows split above and
/// below the window, padding columns to its right. Throws InvalidArgument
/// when the lattice reaches past the generation lattice.
MatrixXd truth_on_lattice(const Dataset& data, const LatticeSpec& lat);

/// Prior draw of (variances, omega, c | c_o, d | d_o).
ModelState prior_state(const Model& model, Rng& rng);

struct ChainConfig {
  double alpha = 0.0;
  std::size_t iterations = 3000;
  /// One third of the chain when unset.
  std::optional<std::size_t> burn_in;
  std::size_t thin = 1;
  HmcConfig hmc;
  std::uint64_t seed = 1;
  std::uint32_t chain = 0;
  /// Lattice indices of c to trace.
  std::vector<Index> c_trace;

  std::size_t burn() const { return burn_in.value_or(iterations / 3); }
  void validate() const;
};

struct ChainTraces {
  MatrixXd omega;  // retained x k
  MatrixXd c;      // retained x |c_trace|
  std::vector<Index> c_indices;
  std::vector<double> sigma_c2, sigma_w2, zeta;
  std::vector<double> delta_h;  // per HMC proposal after burn-in
  SweepStats stats;
  double hmc_eps = 0.0;
  std::uint64_t hmc_accepted_post = 0, hmc_proposals_post = 0;

  std::size_t size() const { return sigma_c2.size(); }
  double acceptance() const {
    return hmc_proposals_post ? static_cast<double>(hmc_accepted_post) / static_cast<double>(hmc_proposals_post) : 0.0;
  }
};

using DrawObserver = std::function<void(std::size_t, const ModelState&)>;

/// Runs the hybrid sampler; adapts the HMC step size during burn-in.
ChainTraces run_chain(const Model& model, ModelState state, const ChainConfig& cfg,
                      const DrawObserver& observer = nullptr);

/// Number of sign changes in a trace; exact zeros keep the previous sign.
std::size_t sign_changes(std::span<const double> trace);

struct ConstraintSweepConfig {
  SimRecipe recipe;  // 24 x 1, k = 10
  std::vector<Index> m_values{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
  std::vector<double> alpha_values{0.0, 1.0};
  std::size_t post_burn_in = 45000;
  std::size_t max_lag = 1500;
  HmcConfig hmc;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ConstraintSweepRow {
  Index m = 0;
  double alpha = 0.0;
  Summary ess, msjd;  // over omega coordinates
  std::size_t mode_visits = 0;        // sign changes of omega . omega_true
  std::size_t central_sign_changes = 0;  // sign changes of the central omega coordinate
  double acceptance = 0.0, eps = 0.0;
  std::uint64_t divergent = 0;
};

/// Rows [n_v^o/2 - m/2, n_v^o/2 + m/2) of the exact column.
std::vector<Index> central_rows(Index nv_obs, Index m);

std::vector<ConstraintSweepRow> constraint_sweep(const ConstraintSweepConfig& cfg, const Dataset& data);

struct PaddingSweepConfig {
  SimRecipe recipe;  // 24 x 6
  std::vector<Index> mv_values{0, 2, 6, 12, 24, 36, 48, 72};
  std::vector<Index> mh_values{0, 6, 12};
  std::size_t post_burn_in = 40000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PaddingSweepRow {
  Index mv = 0, mh = 0;
  Summary rmse_omega, rmse_c;  // over coordinates
  double rmse_sigma_c2 = 0.0, rmse_sigma_w2 = 0.0, rmse_zeta = 0.0;
};

std::vector<PaddingSweepRow> padding_sweep(const PaddingSweepConfig& cfg, const Dataset& data);

/// Runs f(0..count-1) on up to `threads` workers; rethrows the first error.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f);

}  // namespace sbd
