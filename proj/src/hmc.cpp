#include "sbd/hmc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sbd {
namespace {

MatrixXd scatter(const VectorXd& y, const std::vector<Index>& idx, Index rows, Index cols) {
  MatrixXd g = MatrixXd::Zero(rows, cols);
  for (std::size_t i = 0; i < idx.size(); ++i) g(idx[i]) = y(static_cast<Index>(i));
  return g;
}

// For a real spectrum f over vertical frequencies, returns the vector over
// blur coordinates i of Re sum_kv exp(-2 pi i kv j_i / n_v) conj(lam_w) f,
// j_i = i - n_v/2 mod n_v: the derivative of lam_w with respect to w*_i
// contracted against f.
VectorXd contract_dlam(const VectorXcd& lam_w, const VectorXd& f) {
  const double nv = static_cast<double>(lam_w.size());
  const VectorXcd x = lam_w.conjugate().cwiseProduct(f.cast<std::complex<double>>());
  const VectorXd r = (std::sqrt(nv) * dft(x)).real();
  return shift_half(r);
}

}  // namespace

MarginalContext MarginalContext::build(const ModelState& s, const Model& model) {
  require(s.sigma_c2 > 0.0 && s.sigma_w2 > 0.0 && s.zeta > 0.0, ErrorCode::NonPositiveVariance,
          "variances must be positive");
  require(model.image.m() == 0 || model.image.kron.has_value(), ErrorCode::MaskNotKronecker,
          "marginal HMC needs the same known rows in every constrained column");
  MarginalContext ctx;
  ctx.model = &model;
  ctx.sigma_c2 = s.sigma_c2;
  ctx.sigma_w2 = s.sigma_w2;
  ctx.sigma_d2 = s.sigma_d2(model.hp.psi);
  ctx.sc_eig = model.image.rc.eigs().real() * s.sigma_c2;
  ctx.sd_eig = model.noise.rd.eigs().real() * ctx.sigma_d2;
  ctx.d_hat = dft2(s.d);
  ctx.mu_hat = dft2(model.image.mu_tilde);
  if (model.image.m() > 0) ctx.kc_chol = std::sqrt(s.sigma_c2) * model.image.gram.matrix_l();
  return ctx;
}

double potential(const VectorXd& omega, const MarginalContext& ctx, MarginalWorkspace& ws) {
  const Model& model = *ctx.model;
  const auto& lat = model.lattice;
  const Index nv = lat.nv, nh = lat.nh;
  const double n = static_cast<double>(lat.n());
  const double k = static_cast<double>(lat.k);
  const double log2pi = std::log(2.0 * std::numbers::pi);

  ws.omega = omega;
  ++ws.generation;
  ws.lam_w = conv_eigs(model.blur.lift(omega));
  ws.w2 = ws.lam_w.cwiseAbs2().replicate(1, nh);
  ws.lam_a = (ctx.sc_eig.array() * ws.w2.array() + ctx.sd_eig.array()).matrix();
  ws.dbar_hat = ctx.d_hat - (ctx.mu_hat.array().colwise() * ws.lam_w.array()).matrix();
  ws.logdet_a = ws.lam_a.array().log().sum();
  ws.quad_a = (ws.dbar_hat.cwiseAbs2().array() / ws.lam_a.array()).sum();
  ws.v_hat = (ws.dbar_hat.array() / ws.lam_a.cast<std::complex<double>>().array()).matrix();
  ws.logdet_y = 0.0;
  ws.quad_s = 0.0;

  const Index m = ctx.m();
  if (m > 0) {
    const auto& idx = model.image.constraint.selector;
    const MatrixXd lam_z = (ctx.sc_eig.array().square() * ws.w2.array() / ws.lam_a.array()).matrix();
    const Bccb sz = Bccb::from_eigs((ctx.sc_eig - lam_z).cast<std::complex<double>>());
    const MatrixXd s_mat = bccb_block(sz.real_base(), idx);
    // Y = G^{-1} S G^{-T}
    const auto g = ctx.kc_chol.triangularView<Eigen::Lower>();
    MatrixXd y = g.solve(s_mat);
    y = g.solve(MatrixXd(y.transpose()));
    y = 0.5 * (y + y.transpose());
    Eigen::LLT<MatrixXd> y_llt(y);
    require(y_llt.info() == Eigen::Success, ErrorCode::IndefiniteY, "Y is not positive definite");
    ws.logdet_y = 2.0 * y_llt.matrixLLT().diagonal().array().log().sum();
    Eigen::LLT<MatrixXd> s_llt(s_mat);
    require(s_llt.info() == Eigen::Success, ErrorCode::IndefiniteS, "S is not positive definite");
    ws.s_inv = s_llt.solve(MatrixXd::Identity(m, m));

    const MatrixXcd bt = (ctx.sc_eig.cast<std::complex<double>>().array() *
                          (ws.dbar_hat.array().colwise() * ws.lam_w.conjugate().array()) /
                          ws.lam_a.cast<std::complex<double>>().array())
                             .matrix();
    const MatrixXd bt_grid = idft2(bt).real();
    ws.q = gather(Eigen::Map<const VectorXd>(bt_grid.data(), bt_grid.size()), idx);
    const VectorXd sq = s_llt.solve(ws.q);
    ws.quad_s = ws.q.dot(sq);
    const MatrixXcd corr = dft2(scatter(sq, idx, nv, nh));
    ws.v_hat += (ctx.sc_eig.cast<std::complex<double>>().array() * (corr.array().colwise() * ws.lam_w.array()) /
                 ws.lam_a.cast<std::complex<double>>().array())
                    .matrix();
  } else {
    ws.s_inv.resize(0, 0);
    ws.q.resize(0);
  }
  ws.v = idft2(ws.v_hat).real();

  const VectorXd z = model.blur.r_omega_chol.triangularView<Eigen::Lower>().solve(omega);
  const double prior = 0.5 * (k * (log2pi + std::log(ctx.sigma_w2)) + model.blur.r_omega_logdet +
                              z.squaredNorm() / ctx.sigma_w2);
  const double lik = 0.5 * (n * log2pi + ws.logdet_sigma() + ws.quad_form());
  ws.value = prior + lik;
  return ws.value;
}

VectorXd grad_potential(const VectorXd& omega, const MarginalContext& ctx, const MarginalWorkspace& ws) {
  require(ws.generation > 0 && ws.omega.size() == omega.size() && ws.omega == omega, ErrorCode::StaleWorkspace,
          "workspace was computed for a different omega");
  const Model& model = *ctx.model;
  const auto& lat = model.lattice;
  const Index nv = lat.nv, nh = lat.nh;
  const double n = static_cast<double>(lat.n());

  // sum Lambda_A' / Lambda_A
  const VectorXd a = (ctx.sc_eig.array() / ws.lam_a.array()).rowwise().sum();
  VectorXd dlogdet = 2.0 * contract_dlam(ws.lam_w, a);

  // v^T dW R_c W^T v part of v^T dSigma v
  const VectorXd b = (ws.v_hat.cwiseAbs2().array() * ctx.sc_eig.array()).rowwise().sum();
  VectorXd vdv = 2.0 * contract_dlam(ws.lam_w, b);

  const auto ops_mu = build_convolution_ops(model.blur.lift(omega), model.image.mu_tilde);
  const Index m = ctx.m();
  if (m > 0) {
    const auto& idx = model.image.constraint.selector;
    // tr(Q dK_Z) through a lag histogram of Q
    MatrixXd hist = MatrixXd::Zero(nv, nh);
    for (Index pa = 0; pa < m; ++pa) {
      const Index ra = idx[pa] % nv, ca = idx[pa] / nv;
      for (Index pb = 0; pb < m; ++pb) {
        const Index rb = idx[pb] % nv, cb = idx[pb] / nv;
        hist((ra - rb + nv) % nv, (ca - cb + nh) % nh) += ws.s_inv(pa, pb);
      }
    }
    const MatrixXcd t = idft2(hist);
    const MatrixXd gz = (ctx.sc_eig.array().square() *
                         (ws.lam_a.array().inverse() - ctx.sc_eig.array() * ws.w2.array() / ws.lam_a.array().square()))
                            .matrix();
    const VectorXd tz = (gz.cast<std::complex<double>>().array() * t.array()).real().rowwise().sum();
    dlogdet -= (2.0 / std::sqrt(n)) * contract_dlam(ws.lam_w, tz);

    // tr(dW0 N) with N = R*_v W0^T V R*_h V^T
    const MatrixXd wtv = ops_mu.apply_w_transpose(ws.v);
    const MatrixXd nmat = model.image.rstar_v * (wtv * model.image.rstar_h.transpose()) * ws.v.transpose();
    VectorXd trn(nv);
    for (Index j = 0; j < nv; ++j) {
      double acc = 0.0;
      for (Index r = 0; r < nv; ++r) acc += nmat(r, (r + j) % nv);
      trn(j) = acc;
    }
    vdv -= 2.0 * ctx.sigma_c2 * shift_half(trn);
  }

  // B^T v, the mean dependence through dbar = d - B w*
  const VectorXd btv = ops_mu.apply_gamma_transpose(ws.v);

  const VectorXd g_full = 0.5 * dlogdet - 0.5 * vdv - btv;
  VectorXd g = model.blur.restrict(g_full);
  g += model.blur.r_omega_solver.solve(omega) / ctx.sigma_w2;
  return g;
}

MatrixXd apply_marginal_precision(const MatrixXd& x, const MarginalContext& ctx, const MarginalWorkspace& ws) {
  const Model& model = *ctx.model;
  const Index nv = model.lattice.nv, nh = model.lattice.nh;
  const MatrixXcd xa = (dft2(x).array() / ws.lam_a.cast<std::complex<double>>().array()).matrix();
  MatrixXcd out = xa;
  if (ctx.m() > 0) {
    const auto& idx = model.image.constraint.selector;
    const MatrixXcd ut = (ctx.sc_eig.cast<std::complex<double>>().array() *
                          (xa.array().colwise() * ws.lam_w.conjugate().array()))
                             .matrix();
    const MatrixXd ut_grid = idft2(ut).real();
    const VectorXd y = ws.s_inv * gather(Eigen::Map<const VectorXd>(ut_grid.data(), ut_grid.size()), idx);
    const MatrixXcd corr = dft2(scatter(y, idx, nv, nh));
    out += (ctx.sc_eig.cast<std::complex<double>>().array() * (corr.array().colwise() * ws.lam_w.array()) /
            ws.lam_a.cast<std::complex<double>>().array())
               .matrix();
  }
  return idft2(out).real();
}

LeapfrogResult leapfrog(const VectorXd& omega, const VectorXd& p, const VectorXd& grad0, double eps, int steps,
                        const std::function<VectorXd(const VectorXd&)>& grad,
                        const std::function<VectorXd(const VectorXd&)>& minv) {
  require(steps >= 1, ErrorCode::InvalidArgument, "leapfrog needs at least one step");
  LeapfrogResult r{omega, p, grad0};
  for (int s = 0; s < steps; ++s) {
    r.p -= 0.5 * eps * r.grad;
    r.omega += eps * minv(r.p);
    require(r.omega.allFinite(), ErrorCode::NonFiniteTrajectory, "position left the finite range");
    r.grad = grad(r.omega);
    r.p -= 0.5 * eps * r.grad;
    require(r.p.allFinite(), ErrorCode::NonFiniteTrajectory, "momentum left the finite range");
  }
  return r;
}

void HmcConfig::validate() const {
  require(steps >= 1, ErrorCode::InvalidArgument, "HMC needs at least one leapfrog step");
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "HMC step size must be positive");
  require(target_accept > 0.0 && target_accept < 1.0, ErrorCode::InvalidArgument,
          "target acceptance must lie in (0, 1)");
  require(divergence > 0.0, ErrorCode::InvalidArgument, "divergence threshold must be positive");
}

DualAveraging::DualAveraging(double eps0, double target)
    : mu_(std::log(10.0 * eps0)), target_(target), log_eps_(std::log(eps0)), log_eps_bar_(std::log(eps0)) {}

void DualAveraging::update(double accept_prob) {
  ++m_;
  const double md = static_cast<double>(m_);
  const double w = 1.0 / (md + t0_);
  h_bar_ = (1.0 - w) * h_bar_ + w * (target_ - accept_prob);
  log_eps_ = mu_ - std::sqrt(md) / gamma_ * h_bar_;
  const double eta = std::pow(md, -kappa_);
  log_eps_bar_ = eta * log_eps_ + (1.0 - eta) * log_eps_bar_;
}

HmcResult hmc_update(ModelState& state, const Model& model, double eps, int steps, Rng& rng, double divergence) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "HMC step size must be positive");
  const MarginalContext ctx = MarginalContext::build(state, model);
  const auto& blur = model.blur;
  const double sw2 = state.sigma_w2;
  const auto chol = blur.r_omega_chol.triangularView<Eigen::Lower>();

  // p = sigma_w^{-1} G^{-T} z has covariance (sigma_w^2 G G^T)^{-1} = M
  const VectorXd z = rng.normal_vector(state.omega.size());
  const VectorXd p0 = chol.transpose().solve(z) / std::sqrt(sw2);
  auto minv = [&](const VectorXd& p) -> VectorXd { return sw2 * (blur.r_omega * p); };
  auto kinetic = [&](const VectorXd& p) { return 0.5 * p.dot(minv(p)); };

  MarginalWorkspace ws;
  const double u0 = potential(state.omega, ctx, ws);
  const VectorXd g0 = grad_potential(state.omega, ctx, ws);
  const double h0 = u0 + kinetic(p0);

  HmcResult res;
  res.eps = eps;
  double u1 = 0.0;
  LeapfrogResult lf;
  try {
    lf = leapfrog(state.omega, p0, g0, eps, steps,
                  [&](const VectorXd& om) {
                    u1 = potential(om, ctx, ws);
                    return grad_potential(om, ctx, ws);
                  },
                  minv);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFiniteTrajectory && e.code() != ErrorCode::IndefiniteY &&
        e.code() != ErrorCode::IndefiniteS)
      throw;
    res.divergent = true;
    res.delta_h = std::numeric_limits<double>::infinity();
    return res;
  }
  const double h1 = u1 + kinetic(lf.p);
  res.delta_h = h1 - h0;
  if (!std::isfinite(res.delta_h) || std::abs(res.delta_h) > divergence) {
    res.divergent = true;
    return res;
  }
  res.accept_prob = std::min(1.0, std::exp(-res.delta_h));
  if (rng.uniform() < res.accept_prob) {
    res.accepted = true;
    state.set_omega(lf.omega, blur);
  }
  return res;
}

HmcSampler::HmcSampler(const HmcConfig& cfg)
    : cfg_(cfg), da_(cfg.eps, cfg.target_accept), eps_(cfg.eps), adapting_(cfg.adapt) {
  cfg_.validate();
}

HmcResult HmcSampler::update(ModelState& state, const Model& model, Rng& rng) {
  HmcResult r = hmc_update(state, model, eps_, cfg_.steps, rng, cfg_.divergence);
  if (adapting_) {
    da_.update(r.accept_prob);
    eps_ = da_.eps();
  }
  return r;
}

void HmcSampler::end_adaptation() {
  if (!adapting_) return;
  adapting_ = false;
  eps_ = da_.final_eps();
}

}  // namespace sbd
