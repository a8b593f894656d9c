#include "sbd/gibbs.hpp"

#include "sbd/hmc.hpp"

namespace sbd {
namespace {

MatrixXd scatter(const VectorXd& y, const std::vector<Index>& idx, Index rows, Index cols) {
  MatrixXd g = MatrixXd::Zero(rows, cols);
  for (std::size_t i = 0; i < idx.size(); ++i) g(idx[i]) = y(static_cast<Index>(i));
  return g;
}

VectorXd flat(const MatrixXd& g) { return Eigen::Map<const VectorXd>(g.data(), g.size()); }

MatrixXd lattice_residual(const ModelState& s) {
  const auto ops = build_convolution_ops(s.w_star, s.c);
  return s.d - ops.apply_w(s.c);
}

}  // namespace

FourierGaussian blur_conditional(const ModelState& s, const Model& model) {
  const double sd2 = s.sigma_d2(model.hp.psi);
  const auto ops = build_convolution_ops(s.w_star, s.c);
  const VectorXd rdv = model.noise.rd_v.eigs().real();
  const VectorXd lam_g = gamma_precision_eigs(ops.gamma_eigs, rdv, model.noise.rd_h_precision);
  const VectorXd lam_rw = model.blur.rw.eigs().real();

  FourierGaussian g;
  g.eig_cov = (1.0 / (lam_rw.array() * s.sigma_w2) + lam_g.array() / sd2).inverse().matrix();
  // Gamma^T Sigma_d^{-1} d, with Sigma_d^{-1} applied as a BCCB inverse
  const Bccb prec = Bccb::from_eigs(model.noise.rd.eigs().cwiseInverse() / sd2);
  const VectorXd rhs = ops.apply_gamma_transpose(prec.apply(s.d));
  g.mean_hat = g.eig_cov.cast<std::complex<double>>().cwiseProduct(dft(rhs));
  return g;
}

FourierGaussian image_conditional(const ModelState& s, const Model& model) {
  const double sd2 = s.sigma_d2(model.hp.psi);
  const auto ops = build_convolution_ops(s.w_star, s.c);
  const MatrixXcd lw = ops.w_eigs();
  const MatrixXd sc = model.image.rc.eigs().real() * s.sigma_c2;
  const MatrixXd sdl = model.noise.rd.eigs().real() * sd2;
  const MatrixXd w2 = lw.cwiseAbs2();
  const MatrixXd denom = (w2.array() * sc.array() + sdl.array()).matrix();

  FourierGaussian g;
  g.eig_cov = (sc.array() * sdl.array() / denom.array()).matrix();
  const MatrixXcd dh = dft2(s.d);
  g.mean_hat = (sc.cast<std::complex<double>>().array() * lw.conjugate().array() * dh.array() /
                denom.cast<std::complex<double>>().array())
                   .matrix();
  return g;
}

void sample_blur_fc(ModelState& s, const Model& model, Rng& rng) {
  const FourierGaussian g = blur_conditional(s, model);
  VectorXd w = sample_fourier_gaussian(g, rng).col(0);
  const auto& zeros = model.blur.zeros;
  if (!zeros.empty()) {
    const Circulant cov = Circulant::from_eigs(g.eig_cov.cast<std::complex<double>>());
    const VectorXd base = cov.real_base();
    const Index n = base.size();
    const auto z = static_cast<Index>(zeros.size());
    MatrixXd gram(z, z);
    for (Index a = 0; a < z; ++a)
      for (Index b = 0; b < z; ++b) gram(a, b) = base(((zeros[a] - zeros[b]) % n + n) % n);
    HardConstraint hc{zeros, VectorXd::Zero(z)};
    CovarianceAction act{gram, [&](const VectorXd& y) {
                           VectorXd full = VectorXd::Zero(n);
                           for (Index a = 0; a < z; ++a) full(zeros[a]) = y(a);
                           return cov.apply(full);
                         }};
    w = condition_by_kriging(w, act, SpdSolver(gram, ErrorCode::IllConditioned), hc);
  }
  s.omega = model.blur.restrict(w);
  s.w_star = model.blur.lift(s.omega);
}

void sample_image_fc(ModelState& s, const Model& model, Rng& rng) {
  const FourierGaussian g = image_conditional(s, model);
  MatrixXd c = sample_fourier_gaussian(g, rng);
  const auto& hc = model.image.constraint;
  if (!hc.empty()) {
    const Bccb cov = Bccb::from_eigs(g.eig_cov.cast<std::complex<double>>());
    const MatrixXd gram = bccb_block(cov.real_base(), hc.selector);
    const Index nv = c.rows(), nh = c.cols();
    CovarianceAction act{gram, [&](const VectorXd& y) { return flat(cov.apply(scatter(y, hc.selector, nv, nh))); }};
    const VectorXd out = condition_by_kriging(flat(c), act, SpdSolver(gram, ErrorCode::IllConditioned), hc);
    c = Eigen::Map<const MatrixXd>(out.data(), nv, nh);
  }
  s.c = c;
}

void sample_aux_data_fc(ModelState& s, const Model& model, Rng& rng) {
  const auto& lat = model.lattice;
  const auto& nm = model.noise;
  if (lat.fully_observed()) {
    s.d = model.d_obs;
    return;
  }
  const double sd2 = s.sigma_d2(model.hp.psi);
  const auto ops = build_convolution_ops(s.w_star, s.c);
  FourierGaussian g{dft2(ops.apply_w(s.c)), nm.rd.eigs().real() * sd2};
  MatrixXd d = sample_fourier_gaussian(g, rng);
  // Kriging correction with the separable gram (K_h (x) K_v); sigma_d^2
  // cancels between Sigma_d A^T and the gram.
  const MatrixXd e = d.block(nm.row_offset, 0, nm.nv_obs, nm.nh_obs) - model.d_obs;
  const MatrixXd y = nm.gram_h.solve(MatrixXd(nm.gram_v.solve(e).transpose())).transpose();
  MatrixXd scattered = MatrixXd::Zero(lat.nv, lat.nh);
  scattered.block(nm.row_offset, 0, nm.nv_obs, nm.nh_obs) = y;
  d -= nm.rd.apply(scattered);
  d.block(nm.row_offset, 0, nm.nv_obs, nm.nh_obs) = model.d_obs;
  s.d = d;
}

double ssd(const ModelState& s, const Model& model) {
  const MatrixXcd r = dft2(lattice_residual(s));
  return (r.cwiseAbs2().array() / model.noise.rd.eigs().real().array()).sum();
}

double ssw(const ModelState& s, const Model& model) {
  const VectorXd z = model.blur.r_omega_chol.triangularView<Eigen::Lower>().solve(s.omega);
  return z.squaredNorm();
}

double ssc(const ModelState& s, const Model& model) {
  const MatrixXcd ch = dft2(s.c);
  return (ch.cwiseAbs2().array() / model.image.rc.eigs().real().array()).sum();
}

IgParams sigma_w_conditional(const ModelState& s, const Model& model) {
  const auto& hp = model.hp;
  const double n = static_cast<double>(model.lattice.n());
  const double k = static_cast<double>(model.lattice.k);
  return {hp.alpha_w + 0.5 * (n + k),
          hp.beta_w + 0.5 * (ssd(s, model) / (hp.psi * s.sigma_c2 * s.zeta) + ssw(s, model))};
}

IgParams sigma_c_conditional(const ModelState& s, const Model& model) {
  const auto& hp = model.hp;
  const double n = static_cast<double>(model.lattice.n());
  return {hp.alpha_c + n,
          hp.beta_c + ssd(s, model) / (2.0 * hp.psi * s.sigma_w2 * s.zeta) + 0.5 * ssc(s, model)};
}

IgParams zeta_conditional(const ModelState& s, const Model& model) {
  const auto& hp = model.hp;
  const double n = static_cast<double>(model.lattice.n());
  return {hp.alpha_z + 0.5 * n, hp.beta_z + ssd(s, model) / (2.0 * hp.psi * s.sigma_c2 * s.sigma_w2)};
}

namespace {

double draw_ig(const IgParams& p, Rng& rng) {
  require(p.scale > 0.0 && p.shape > 0.0, ErrorCode::NonPositiveScale, "inverse gamma scale must be positive");
  return rng.inv_gamma(p.shape, p.scale);
}

}  // namespace

void sample_sigma_w(ModelState& s, const Model& model, Rng& rng) {
  s.sigma_w2 = draw_ig(sigma_w_conditional(s, model), rng);
}

void sample_sigma_c(ModelState& s, const Model& model, Rng& rng) {
  s.sigma_c2 = draw_ig(sigma_c_conditional(s, model), rng);
}

void sample_zeta(ModelState& s, const Model& model, Rng& rng) { s.zeta = draw_ig(zeta_conditional(s, model), rng); }

void gibbs_sweep(ModelState& s, const Model& model, ChainRng& rng, double alpha, HmcSampler* hmc,
                 SweepStats* stats) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument, "HMC probability must lie in [0, 1]");
  const bool use_hmc = alpha > 0.0 && (alpha >= 1.0 || rng.selector.uniform() < alpha);
  if (use_hmc) {
    require(hmc != nullptr, ErrorCode::InvalidArgument, "HMC requested without a sampler");
    const HmcResult r = hmc->update(s, model, rng.hmc);
    if (stats) {
      ++stats->hmc_blur;
      stats->hmc_accepted += r.accepted ? 1 : 0;
      stats->hmc_divergent += r.divergent ? 1 : 0;
      stats->last_delta_h = r.delta_h;
    }
  } else {
    sample_blur_fc(s, model, rng.blur);
    if (stats) ++stats->gibbs_blur;
  }
  sample_image_fc(s, model, rng.image);
  sample_aux_data_fc(s, model, rng.aux);
  sample_sigma_c(s, model, rng.sigma_c);
  sample_sigma_w(s, model, rng.sigma_w);
  sample_zeta(s, model, rng.zeta);
}

}  // namespace sbd
