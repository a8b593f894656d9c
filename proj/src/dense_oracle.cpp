#include "sbd/dense_oracle.hpp"

#include <cmath>
#include <numbers>

namespace sbd {
namespace {

void guard(Index n) {
  require(n <= kDenseMaxDim, ErrorCode::TooLarge, "dense oracle limited to 4096 dimensions, got " + std::to_string(n));
}

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

VectorXd flat(const MatrixXd& g) { return Eigen::Map<const VectorXd>(g.data(), g.size()); }

MatrixXd stacked_convolutions(const MatrixXd& grid) {
  const Index nv = grid.rows(), nh = grid.cols();
  MatrixXd g(nv * nh, nv);
  for (Index j = 0; j < nh; ++j) g.middleRows(j * nv, nv) = dense_centred_convolution(grid.col(j));
  return g;
}

MatrixXd joint(const MatrixXd& s11, const MatrixXd& s12, const MatrixXd& s22) {
  MatrixXd j(s11.rows() + s22.rows(), s11.cols() + s22.cols());
  j << s11, s12, s12.transpose(), s22;
  return j;
}

}  // namespace

MatrixXd dense_correlation(Index n, const CorrelationSpec& spec) {
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const Index d = std::abs(i - j);
      m(i, j) = std::exp(-std::pow(static_cast<double>(std::min(d, n - d)) / spec.phi, spec.p));
    }
  return m;
}

MatrixXd dense_centred_convolution(const VectorXd& ker) {
  const Index n = ker.size();
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = ker(((i - j + n / 2) % n + n) % n);
  return m;
}

DenseModel build_dense_model(const Model& model, const ModelState& state) {
  const auto& lat = model.lattice;
  const auto& hp = model.hp;
  guard(lat.n());
  DenseModel dm;
  dm.rw = dense_correlation(lat.nv, hp.blur);
  const auto zeros = complement(lat.blur_indices(), lat.nv);
  if (zeros.empty()) {
    dm.rw_tilde = dm.rw;
  } else {
    dm.rw_tilde = dense_conditional(VectorXd::Zero(lat.nv), dm.rw, zeros, VectorXd::Zero(static_cast<Index>(zeros.size()))).cov;
  }
  const auto sup = lat.blur_indices();
  dm.r_omega.resize(lat.k, lat.k);
  for (Index i = 0; i < lat.k; ++i)
    for (Index j = 0; j < lat.k; ++j) dm.r_omega(i, j) = dm.rw_tilde(sup[i], sup[j]);

  const MatrixXd rc = kron(dense_correlation(lat.nh, hp.image_h), dense_correlation(lat.nv, hp.image_v));
  dm.sigma_c = state.sigma_c2 * rc;
  const auto& hc = model.image.constraint;
  if (hc.empty()) {
    dm.mu_c = VectorXd::Zero(lat.n());
    dm.sigma_c_tilde = dm.sigma_c;
  } else {
    const auto cp = dense_conditional(VectorXd::Zero(lat.n()), dm.sigma_c, hc.selector, hc.values);
    dm.mu_c = cp.mean;
    dm.sigma_c_tilde = cp.cov;
  }
  dm.w = kron(MatrixXd::Identity(lat.nh, lat.nh), dense_centred_convolution(state.w_star));
  dm.gamma = stacked_convolutions(state.c);
  dm.b = stacked_convolutions(Eigen::Map<const MatrixXd>(dm.mu_c.data(), lat.nv, lat.nh));
  dm.sigma_d = state.sigma_d2(hp.psi) *
               kron(dense_correlation(lat.nh, hp.noise_h), dense_correlation(lat.nv, hp.noise_v));
  dm.sigma_dw = dm.w * dm.sigma_c_tilde * dm.w.transpose() + dm.sigma_d;
  return dm;
}

ConditionalParams dense_conditional(const VectorXd& mu, const MatrixXd& sigma, const std::vector<Index>& selector,
                                    const VectorXd& b) {
  guard(mu.size());
  const auto s = static_cast<Index>(selector.size());
  if (s == 0) return {mu, sigma};
  MatrixXd a = MatrixXd::Zero(s, mu.size());
  for (Index i = 0; i < s; ++i) a(i, selector[static_cast<std::size_t>(i)]) = 1.0;
  const MatrixXd inner_inv = (a * sigma * a.transpose()).inverse();
  ConditionalParams out;
  out.mean = mu + sigma * a.transpose() * inner_inv * (b - a * mu);
  out.cov = sigma - sigma * a.transpose() * inner_inv * a * sigma;
  return out;
}

ConditionalParams dense_blur_conditional(const Model& model, const ModelState& state, bool zero_constraint) {
  const auto& lat = model.lattice;
  const DenseModel dm = build_dense_model(model, state);
  const Index nv = lat.nv, n = lat.n();
  const MatrixXd sw = state.sigma_w2 * dm.rw;
  const MatrixXd cov = joint(sw, sw * dm.gamma.transpose(), dm.gamma * sw * dm.gamma.transpose() + dm.sigma_d);
  std::vector<Index> sel;
  VectorXd b(n);
  if (zero_constraint)
    for (Index i : complement(lat.blur_indices(), nv)) sel.push_back(i);
  const Index nz = static_cast<Index>(sel.size());
  for (Index i = 0; i < n; ++i) sel.push_back(nv + i);
  b.resize(nz + n);
  b.head(nz).setZero();
  b.tail(n) = flat(state.d);
  const auto cp = dense_conditional(VectorXd::Zero(nv + n), cov, sel, b);
  return {cp.mean.head(nv), cp.cov.topLeftCorner(nv, nv)};
}

ConditionalParams dense_image_conditional(const Model& model, const ModelState& state, bool with_constraint) {
  const auto& lat = model.lattice;
  const DenseModel dm = build_dense_model(model, state);
  const Index n = lat.n();
  const MatrixXd cov = joint(dm.sigma_c, dm.sigma_c * dm.w.transpose(), dm.w * dm.sigma_c * dm.w.transpose() + dm.sigma_d);
  std::vector<Index> sel;
  std::vector<double> vals;
  if (with_constraint) {
    const auto& hc = model.image.constraint;
    for (Index i = 0; i < hc.size(); ++i) {
      sel.push_back(hc.selector[static_cast<std::size_t>(i)]);
      vals.push_back(hc.values(i));
    }
  }
  for (Index i = 0; i < n; ++i) {
    sel.push_back(n + i);
    vals.push_back(state.d(i));
  }
  const auto cp = dense_conditional(VectorXd::Zero(2 * n), cov, sel, Eigen::Map<const VectorXd>(vals.data(), static_cast<Index>(vals.size())));
  return {cp.mean.head(n), cp.cov.topLeftCorner(n, n)};
}

ConditionalParams dense_aux_conditional(const Model& model, const ModelState& state) {
  const DenseModel dm = build_dense_model(model, state);
  const VectorXd mean = dm.w * flat(state.c);
  const auto& hc = model.noise.constraint;
  return dense_conditional(mean, dm.sigma_d, hc.selector, hc.values);
}

double dense_logdet(const MatrixXd& sigma) {
  guard(sigma.rows());
  Eigen::LLT<MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, ErrorCode::IndefiniteDense, "dense covariance is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double dense_quadform(const MatrixXd& sigma, const VectorXd& x) {
  guard(sigma.rows());
  Eigen::LLT<MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, ErrorCode::IndefiniteDense, "dense covariance is not positive definite");
  return x.dot(llt.solve(x));
}

double dense_marginal_potential(const VectorXd& omega, const Model& model, const ModelState& state) {
  ModelState s = state;
  s.set_omega(omega, model.blur);
  const DenseModel dm = build_dense_model(model, s);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  const double k = static_cast<double>(omega.size());
  const double n = static_cast<double>(model.lattice.n());
  const MatrixXd sw = s.sigma_w2 * dm.r_omega;
  const double prior = 0.5 * (k * log2pi + dense_logdet(sw) + dense_quadform(sw, omega));
  const VectorXd dbar = flat(s.d) - dm.w * dm.mu_c;
  const double lik = 0.5 * (n * log2pi + dense_logdet(dm.sigma_dw) + dense_quadform(dm.sigma_dw, dbar));
  return prior + lik;
}

VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double h) {
  require(h >= 1e-7 && h <= 1e-3, ErrorCode::InvalidArgument, "finite difference step must lie in [1e-7, 1e-3]");
  VectorXd g(x.size());
  VectorXd xp = x, xm = x;
  for (Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return g;
}

}  // namespace sbd
