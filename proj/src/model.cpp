#include "sbd/model.hpp"

#include "sbd/convolution.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbd {

Circulant build_correlation(Index n, const CorrelationSpec& spec) {
  require(n >= 1, ErrorCode::InvalidArgument, "correlation order must be positive");
  require(spec.phi > 0.0 && spec.p > 0.0 && spec.p <= 2.0, ErrorCode::InvalidArgument,
          "correlation needs phi > 0 and p in (0, 2]");
  VectorXd base(n);
  for (Index j = 0; j < n; ++j) {
    const double h = static_cast<double>(std::min(j, n - j));
    base(j) = std::exp(-std::pow(h / spec.phi, spec.p));
  }
  // Symmetric real base: the spectrum is real up to rounding.
  VectorXcd eigs = std::sqrt(static_cast<double>(n)) * dft(base);
  return Circulant::from_eigs(eigs.real().cast<std::complex<double>>());
}

LatticeSpec LatticeSpec::make(Index nv_obs, Index nh_obs, Index mv, Index mh, Index k) {
  require(nv_obs >= 1 && nh_obs >= 1 && mv >= 0 && mh >= 0, ErrorCode::InvalidArgument, "lattice dimensions");
  LatticeSpec s;
  s.nv_obs = nv_obs;
  s.nh_obs = nh_obs;
  s.mv = mv;
  s.mh = mh;
  s.nv = nv_obs + mv;
  s.nh = nh_obs + mh;
  s.k = k;
  require(s.nv % 2 == 0, ErrorCode::OddLattice, "vertical lattice size n_v = " + std::to_string(s.nv) + " is odd");
  require(k >= 1 && k <= s.nv, ErrorCode::InvalidArgument, "blur length k must lie in [1, n_v]");
  return s;
}

LatticeSpec LatticeSpec::with_default_padding(Index nv_obs, Index nh_obs, Index k) {
  Index mv = (nv_obs + 1) / 2;
  if ((nv_obs + mv) % 2 != 0) ++mv;
  return make(nv_obs, nh_obs, mv, nh_obs, k);
}

std::vector<Index> LatticeSpec::data_indices() const {
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(nv_obs * nh_obs));
  for (Index j = 0; j < nh_obs; ++j)
    for (Index i = 0; i < nv_obs; ++i) idx.push_back(obs_to_linear(i, j));
  return idx;
}

std::vector<Index> LatticeSpec::blur_indices() const {
  std::vector<Index> idx;
  for (Index i = 0; i < k; ++i) idx.push_back(blur_start() + i);
  return idx;
}

void HyperParams::validate() const {
  for (double v : {alpha_c, beta_c, alpha_w, beta_w, alpha_z, beta_z})
    require(v > 0.0, ErrorCode::NonPositiveScale, "inverse gamma shapes and scales must be positive");
  require(psi > 0.0, ErrorCode::InvalidArgument, "psi must be positive");
}

VectorXd BlurPrior::lift(const VectorXd& omega) const {
  require(omega.size() == static_cast<Index>(support.size()), ErrorCode::DimensionMismatch, "omega length");
  VectorXd w = VectorXd::Zero(rw.order());
  for (std::size_t i = 0; i < support.size(); ++i) w(support[i]) = omega(static_cast<Index>(i));
  return w;
}

VectorXd BlurPrior::restrict(const VectorXd& w_star) const { return gather(w_star, support); }

namespace {

// A valid correlation on the line can fail to be positive definite once
// wrapped on a short cycle (p near 2 on small n_v).
void require_psd(const Circulant& c, const char* what) {
  const VectorXd e = c.eigs().real();
  require(e.minCoeff() > kSingularTol * e.cwiseAbs().maxCoeff(), ErrorCode::NegativeEigenvalue,
          std::string(what) + " correlation is not positive definite on this lattice");
}

}  // namespace

BlurPrior build_blur_prior(const LatticeSpec& lat, const HyperParams& hp) {
  BlurPrior b;
  b.rw = build_correlation(lat.nv, hp.blur);
  require_psd(b.rw, "blur");
  b.support = lat.blur_indices();
  b.zeros = complement(b.support, lat.nv);
  const MatrixXd rw = b.rw.dense();
  if (b.zeros.empty()) {
    b.rw_tilde = rw;
  } else {
    const MatrixXd a = selection_matrix(b.zeros, lat.nv);
    const MatrixXd rat = rw * a.transpose();
    const SpdSolver gram(a * rat, ErrorCode::IllConditioned);
    b.rw_tilde = rw - rat * gram.solve(MatrixXd(rat.transpose()));
    b.rw_tilde = 0.5 * (b.rw_tilde + b.rw_tilde.transpose());
  }
  const auto k = static_cast<Index>(b.support.size());
  b.r_omega.resize(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) b.r_omega(i, j) = b.rw_tilde(b.support[i], b.support[j]);
  b.r_omega_solver = SpdSolver(b.r_omega, ErrorCode::IllConditioned);
  b.r_omega_chol = b.r_omega_solver.matrix_l();
  b.r_omega_logdet = b.r_omega_solver.logdet();
  return b;
}

namespace {

std::optional<KroneckerMask> kronecker_view(const std::vector<Index>& idx, Index nv) {
  KroneckerMask mask;
  if (idx.empty()) return mask;
  Index current = -1;
  std::vector<Index> rows;
  bool first = true;
  for (Index p : idx) {
    const Index col = p / nv;
    if (col != current) {
      if (current >= 0) {
        if (first) mask.rows = rows;
        else if (rows != mask.rows) return std::nullopt;
        first = false;
      }
      current = col;
      rows.clear();
      mask.cols.push_back(col);
    }
    rows.push_back(p % nv);
  }
  if (first) mask.rows = rows;
  else if (rows != mask.rows) return std::nullopt;
  return mask;
}

MatrixXd projected_part(const MatrixXd& r, const std::vector<Index>& idx) {
  // R A^T (A R A^T)^{-1} A R
  if (idx.empty()) return MatrixXd::Zero(r.rows(), r.cols());
  const MatrixXd a = selection_matrix(idx, r.rows());
  const MatrixXd rat = r * a.transpose();
  const SpdSolver gram(a * rat, ErrorCode::IllConditioned);
  MatrixXd out = rat * gram.solve(MatrixXd(rat.transpose()));
  return 0.5 * (out + out.transpose());
}

void update_mu_tilde(ImagePrior& ip) {
  ip.mu_tilde.setZero();
  if (ip.m() == 0) return;
  const VectorXd y = ip.gram.solve(ip.constraint.values);
  for (Index i = 0; i < ip.m(); ++i) ip.mu_tilde(ip.constraint.selector[static_cast<std::size_t>(i)]) = y(i);
  ip.mu_tilde = ip.rc.apply(MatrixXd(ip.mu_tilde));
  for (Index i = 0; i < ip.m(); ++i)
    ip.mu_tilde(ip.constraint.selector[static_cast<std::size_t>(i)]) = ip.constraint.values(i);
}

}  // namespace

ImagePrior build_image_prior(const LatticeSpec& lat, const HyperParams& hp, const HardConstraint& image_constraint,
                             bool require_kronecker) {
  ImagePrior ip;
  ip.rc_h = build_correlation(lat.nh, hp.image_h);
  ip.rc_v = build_correlation(lat.nv, hp.image_v);
  require_psd(ip.rc_h, "horizontal image");
  require_psd(ip.rc_v, "vertical image");
  ip.rc = Bccb::kron(ip.rc_h, ip.rc_v);
  ip.constraint = image_constraint;
  ip.constraint.validate(lat.n());
  ip.mu_tilde = MatrixXd::Zero(lat.nv, lat.nh);
  ip.kron = kronecker_view(ip.constraint.selector, lat.nv);
  require(!require_kronecker || ip.kron.has_value(), ErrorCode::MaskNotKronecker,
          "image constraint rows differ between columns");
  if (ip.m() == 0) {
    ip.rstar_h = MatrixXd::Zero(lat.nh, lat.nh);
    ip.rstar_v = MatrixXd::Zero(lat.nv, lat.nv);
    return ip;
  }
  const MatrixXd base = ip.rc.real_base();
  ip.gram = SpdSolver(bccb_block(base, ip.constraint.selector), ErrorCode::IllConditioned);
  update_mu_tilde(ip);
  if (ip.kron) {
    ip.rstar_h = projected_part(ip.rc_h.dense(), ip.kron->cols);
    ip.rstar_v = projected_part(ip.rc_v.dense(), ip.kron->rows);
  }
  return ip;
}

MatrixXd constrained_image_correlation(const ImagePrior& prior) {
  require(prior.kron.has_value(), ErrorCode::MaskNotKronecker, "constrained_image_correlation");
  MatrixXd full = Eigen::kroneckerProduct(prior.rc_h.dense(), prior.rc_v.dense());
  if (prior.m() > 0) full -= Eigen::kroneckerProduct(prior.rstar_h, prior.rstar_v);
  return full;
}

NoiseModel build_noise_model(const LatticeSpec& lat, const HyperParams& hp, const MatrixXd& d_obs) {
  require(d_obs.rows() == lat.nv_obs && d_obs.cols() == lat.nh_obs, ErrorCode::DimensionMismatch,
          "observed data must be n_v^o x n_h^o");
  NoiseModel nm;
  nm.rd_h = build_correlation(lat.nh, hp.noise_h);
  nm.rd_v = build_correlation(lat.nv, hp.noise_v);
  require_psd(nm.rd_h, "horizontal noise");
  require_psd(nm.rd_v, "vertical noise");
  nm.rd = Bccb::kron(nm.rd_h, nm.rd_v);
  nm.rd_h_precision = nm.rd_h.inverse().dense();
  nm.constraint.selector = lat.data_indices();
  nm.constraint.values = Eigen::Map<const VectorXd>(d_obs.data(), d_obs.size());
  nm.row_offset = lat.row_offset();
  nm.nv_obs = lat.nv_obs;
  nm.nh_obs = lat.nh_obs;
  const MatrixXd rv = nm.rd_v.dense();
  const MatrixXd rh = nm.rd_h.dense();
  nm.gram_v = SpdSolver(rv.block(nm.row_offset, nm.row_offset, lat.nv_obs, lat.nv_obs), ErrorCode::IllConditioned);
  nm.gram_h = SpdSolver(rh.block(0, 0, lat.nh_obs, lat.nh_obs), ErrorCode::IllConditioned);
  return nm;
}

double sigma_d2(double sigma_c2, double sigma_w2, double zeta, double psi) {
  return psi * sigma_c2 * sigma_w2 * zeta;
}

Model build_model(const LatticeSpec& lat, const HyperParams& hp, const MatrixXd& d_obs,
                  const ImageObservations& c_obs, bool require_kronecker) {
  hp.validate();
  require(static_cast<Index>(c_obs.positions.size()) == c_obs.values.size(), ErrorCode::InvalidArgument,
          "image observation positions and values differ in length");
  std::vector<std::pair<Index, Index>> order;
  for (std::size_t i = 0; i < c_obs.positions.size(); ++i) {
    const auto [r, c] = c_obs.positions[i];
    require(r >= 0 && r < lat.nv_obs && c >= 0 && c < lat.nh_obs, ErrorCode::InvalidArgument,
            "image observation outside the observed window");
    order.emplace_back(lat.obs_to_linear(r, c), static_cast<Index>(i));
  }
  std::sort(order.begin(), order.end());
  HardConstraint hc;
  hc.values.resize(static_cast<Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    hc.selector.push_back(order[i].first);
    hc.values(static_cast<Index>(i)) = c_obs.values(order[i].second);
  }
  Model m;
  m.lattice = lat;
  m.hp = hp;
  m.blur = build_blur_prior(lat, hp);
  m.image = build_image_prior(lat, hp, hc, require_kronecker);
  m.noise = build_noise_model(lat, hp, d_obs);
  m.d_obs = d_obs;
  return m;
}

void set_observations(Model& model, const VectorXd& c_values, const MatrixXd& d_obs) {
  require(c_values.size() == model.image.m(), ErrorCode::DimensionMismatch, "image observation count changed");
  require(d_obs.rows() == model.d_obs.rows() && d_obs.cols() == model.d_obs.cols(), ErrorCode::DimensionMismatch,
          "observed data shape changed");
  model.image.constraint.values = c_values;
  update_mu_tilde(model.image);
  model.d_obs = d_obs;
  model.noise.constraint.values = Eigen::Map<const VectorXd>(d_obs.data(), d_obs.size());
}

ModelState initial_state(const Model& model) {
  const auto& lat = model.lattice;
  const auto& hp = model.hp;
  ModelState s;
  VectorXd omega = VectorXd::Zero(lat.k);
  omega(lat.k / 2) = 1.0;
  s.set_omega(omega, model.blur);
  s.c = model.image.mu_tilde;
  s.d = MatrixXd::Zero(lat.nv, lat.nh);
  s.d.block(lat.row_offset(), 0, lat.nv_obs, lat.nh_obs) = model.d_obs;
  s.sigma_c2 = hp.beta_c / (hp.alpha_c + 1.0);
  s.sigma_w2 = hp.beta_w / (hp.alpha_w + 1.0);
  s.zeta = hp.beta_z / (hp.alpha_z + 1.0);
  return s;
}

double ig_logpdf(double x, double shape, double scale) {
  require(x > 0.0, ErrorCode::NonPositiveVariance, "inverse gamma argument must be positive");
  return shape * std::log(scale) - boost::math::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double bccb_gaussian_logpdf(const MatrixXd& x, const MatrixXcd& eigs) {
  const MatrixXcd xh = dft2(x);
  const MatrixXd lam = eigs.real();
  const double n = static_cast<double>(x.size());
  const double quad = (xh.cwiseAbs2().array() / lam.array()).sum();
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + lam.array().log().sum() + quad);
}

double log_posterior_unnorm(const ModelState& s, const Model& model) {
  require(s.sigma_c2 > 0.0 && s.sigma_w2 > 0.0 && s.zeta > 0.0, ErrorCode::NonPositiveVariance,
          "variances must be positive");
  const auto& lat = model.lattice;
  require(s.c.rows() == lat.nv && s.c.cols() == lat.nh && s.d.rows() == lat.nv && s.d.cols() == lat.nh &&
              s.omega.size() == lat.k,
          ErrorCode::DimensionMismatch, "state does not match the lattice");
  const auto& hp = model.hp;
  const double sd2 = s.sigma_d2(hp.psi);
  const auto ops = build_convolution_ops(model.blur.lift(s.omega), s.c);
  const MatrixXd wc = ops.apply_w(s.c);
  double lp = bccb_gaussian_logpdf(s.d - wc, model.noise.rd.eigs() * sd2);
  lp += bccb_gaussian_logpdf(s.c, model.image.rc.eigs() * s.sigma_c2);
  const double k = static_cast<double>(lat.k);
  const VectorXd z = model.blur.r_omega_chol.triangularView<Eigen::Lower>().solve(s.omega);
  lp += -0.5 * (k * std::log(2.0 * std::numbers::pi * s.sigma_w2) + model.blur.r_omega_logdet +
                z.squaredNorm() / s.sigma_w2);
  lp += ig_logpdf(s.sigma_c2, hp.alpha_c, hp.beta_c);
  lp += ig_logpdf(s.sigma_w2, hp.alpha_w, hp.beta_w);
  lp += ig_logpdf(s.zeta, hp.alpha_z, hp.beta_z);
  return lp;
}

}  // namespace sbd
