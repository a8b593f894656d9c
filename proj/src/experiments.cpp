#include "sbd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sbd/convolution.hpp"
#include "sbd/errors.hpp"

namespace sbd {

void SimRecipe::validate() const {
  require(nv_obs > 0 && nh_obs > 0, ErrorCode::InvalidArgument, "observed window must be non-empty");
  require(gen_factor >= 2, ErrorCode::InvalidArgument, "generation lattice must strictly contain the window");
  require(gen_nv() % 2 == 0, ErrorCode::OddLattice, "generation lattice needs an even number of rows");
  require(k >= 1 && 2 * k <= gen_nv(), ErrorCode::InvalidArgument, "blur length must satisfy 1 <= k <= n_v / 2");
  require(column() >= 0 && column() < nh_obs, ErrorCode::InvalidArgument, "exact column outside the window");
  for (const auto& v : {sigma_c2, sigma_w2, zeta})
    require(!v || *v > 0.0, ErrorCode::NonPositiveVariance, "forced variances must be positive");
  hp.validate();
}

ImageObservations Dataset::image_observations(const std::vector<Index>& rows) const {
  ImageObservations obs;
  obs.values.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < c_window.rows(), ErrorCode::InvalidArgument, "observation row outside window");
    obs.positions.emplace_back(rows[i], exact_column);
    obs.values(static_cast<Index>(i)) = c_window(rows[i], exact_column);
  }
  return obs;
}

ImageObservations Dataset::image_observations() const {
  std::vector<Index> rows(static_cast<std::size_t>(c_window.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
  return image_observations(rows);
}

Dataset simulate_dataset(const SimRecipe& r, Rng& rng) {
  r.validate();
  const auto& hp = r.hp;
  const Index nv = r.gen_nv(), nh = r.gen_nh();
  const LatticeSpec gen = LatticeSpec::make(nv, nh, 0, 0, r.k);

  SimTruth t;
  t.sigma_c2 = r.sigma_c2 ? *r.sigma_c2 : rng.inv_gamma(hp.alpha_c, hp.beta_c);
  t.sigma_w2 = r.sigma_w2 ? *r.sigma_w2 : rng.inv_gamma(hp.alpha_w, hp.beta_w);
  t.zeta = r.zeta ? *r.zeta : rng.inv_gamma(hp.alpha_z, hp.beta_z);

  const BlurPrior blur = build_blur_prior(gen, hp);
  t.omega = std::sqrt(t.sigma_w2) * (blur.r_omega_chol * rng.normal_vector(r.k));

  const Bccb rc = Bccb::kron(build_correlation(nh, hp.image_h), build_correlation(nv, hp.image_v));
  const Bccb rd = Bccb::kron(build_correlation(nh, hp.noise_h), build_correlation(nv, hp.noise_v));
  const MatrixXcd zero = MatrixXcd::Zero(nv, nh);
  t.image = sample_fourier_gaussian({zero, rc.eigs().real() * t.sigma_c2}, rng);
  const double sd2 = sigma_d2(t.sigma_c2, t.sigma_w2, t.zeta, hp.psi);
  const auto ops = build_convolution_ops(blur.lift(t.omega), t.image);
  t.data = ops.apply_w(t.image) + sample_fourier_gaussian({zero, rd.eigs().real() * sd2}, rng);

  t.row0 = (nv - r.nv_obs) / 2;
  t.col0 = (nh - r.nh_obs) / 2;
  Dataset ds;
  ds.d_obs = t.data.block(t.row0, t.col0, r.nv_obs, r.nh_obs);
  ds.c_window = t.image.block(t.row0, t.col0, r.nv_obs, r.nh_obs);
  ds.exact_column = r.column();
  ds.seed = r.seed;
  ds.truth = std::move(t);
  return ds;
}

Dataset simulate_dataset(const SimRecipe& recipe) {
  Rng rng(recipe.seed, Stream::Sim);
  return simulate_dataset(recipe, rng);
}

MatrixXd truth_on_lattice(const Dataset& data, const LatticeSpec& lat) {
  const auto& t = data.truth;
  const Index r0 = t.row0 - lat.row_offset();
  require(r0 >= 0 && r0 + lat.nv <= t.image.rows() && t.col0 + lat.nh <= t.image.cols(),
          ErrorCode::InvalidArgument, "lattice reaches past the generation lattice");
  return t.image.block(r0, t.col0, lat.nv, lat.nh);
}

ModelState prior_state(const Model& model, Rng& rng) {
  const auto& hp = model.hp;
  const auto& lat = model.lattice;
  ModelState s;
  s.sigma_c2 = rng.inv_gamma(hp.alpha_c, hp.beta_c);
  s.sigma_w2 = rng.inv_gamma(hp.alpha_w, hp.beta_w);
  s.zeta = rng.inv_gamma(hp.alpha_z, hp.beta_z);
  s.set_omega(std::sqrt(s.sigma_w2) * (model.blur.r_omega_chol * rng.normal_vector(lat.k)), model.blur);

  const MatrixXcd zero = MatrixXcd::Zero(lat.nv, lat.nh);
  MatrixXd c = sample_fourier_gaussian({zero, model.image.rc.eigs().real() * s.sigma_c2}, rng);
  const auto& ip = model.image;
  if (ip.m() > 0) {
    // sigma_c^2 cancels between Sigma A^T and the gram
    CovarianceAction act;
    act.sigma_at = [&](const VectorXd& y) {
      MatrixXd g = MatrixXd::Zero(lat.nv, lat.nh);
      for (Index i = 0; i < y.size(); ++i) g(ip.constraint.selector[static_cast<std::size_t>(i)]) = y(i);
      const MatrixXd out = ip.rc.apply(g);
      return VectorXd(Eigen::Map<const VectorXd>(out.data(), out.size()));
    };
    const VectorXd flat = Eigen::Map<const VectorXd>(c.data(), c.size());
    const VectorXd out = condition_by_kriging(flat, act, ip.gram, ip.constraint);
    c = Eigen::Map<const MatrixXd>(out.data(), lat.nv, lat.nh);
  }
  s.c = c;
  s.d = MatrixXd::Zero(lat.nv, lat.nh);
  sample_aux_data_fc(s, model, rng);
  return s;
}

void ChainConfig::validate() const {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  require(iterations > burn(), ErrorCode::InvalidArgument, "burn-in must be shorter than the chain");
  require(thin >= 1, ErrorCode::InvalidArgument, "thinning must be at least 1");
  if (alpha > 0.0) hmc.validate();
}

ChainTraces run_chain(const Model& model, ModelState state, const ChainConfig& cfg, const DrawObserver& observer) {
  cfg.validate();
  const std::size_t burn = cfg.burn();
  const std::size_t kept = (cfg.iterations - burn + cfg.thin - 1) / cfg.thin;
  ChainTraces tr;
  tr.omega.resize(static_cast<Index>(kept), model.lattice.k);
  tr.c.resize(static_cast<Index>(kept), static_cast<Index>(cfg.c_trace.size()));
  tr.c_indices = cfg.c_trace;
  tr.sigma_c2.reserve(kept);
  tr.sigma_w2.reserve(kept);
  tr.zeta.reserve(kept);

  ChainRng rng(cfg.seed, cfg.chain);
  HmcSampler hmc(cfg.hmc);
  if (!cfg.hmc.adapt) hmc.end_adaptation();
  std::size_t row = 0;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    if (it == burn && hmc.adapting()) hmc.end_adaptation();
    const std::uint64_t before = tr.stats.hmc_blur, acc_before = tr.stats.hmc_accepted;
    gibbs_sweep(state, model, rng, cfg.alpha, cfg.alpha > 0.0 ? &hmc : nullptr, &tr.stats);
    if (it < burn) continue;
    if (tr.stats.hmc_blur > before) {
      ++tr.hmc_proposals_post;
      tr.hmc_accepted_post += tr.stats.hmc_accepted - acc_before;
      tr.delta_h.push_back(tr.stats.last_delta_h);
    }
    if ((it - burn) % cfg.thin != 0) continue;
    const auto r = static_cast<Index>(row++);
    tr.omega.row(r) = state.omega.transpose();
    for (std::size_t j = 0; j < cfg.c_trace.size(); ++j) tr.c(r, static_cast<Index>(j)) = state.c(cfg.c_trace[j]);
    tr.sigma_c2.push_back(state.sigma_c2);
    tr.sigma_w2.push_back(state.sigma_w2);
    tr.zeta.push_back(state.zeta);
    if (observer) observer(it, state);
  }
  tr.hmc_eps = hmc.eps();
  return tr;
}

std::size_t sign_changes(std::span<const double> x) {
  std::size_t n = 0;
  int prev = 0;
  for (double v : x) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++n;
    prev = s;
  }
  return n;
}

std::vector<Index> central_rows(Index nv_obs, Index m) {
  require(m >= 0 && m <= nv_obs, ErrorCode::InvalidArgument, "m must lie in [0, n_v^o]");
  std::vector<Index> rows;
  for (Index r = nv_obs / 2 - m / 2; r < nv_obs / 2 - m / 2 + m; ++r) rows.push_back(r);
  return rows;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f) {
  const auto workers = static_cast<std::size_t>(std::clamp<int>(threads, 1, std::max<int>(1, static_cast<int>(count))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<double> column(const MatrixXd& m, Index j) { return {m.col(j).data(), m.col(j).data() + m.rows()}; }

Summary summary_of(const std::vector<double>& v) { return v.empty() ? Summary{} : summarize(v); }

}  // namespace

std::vector<ConstraintSweepRow> constraint_sweep(const ConstraintSweepConfig& cfg, const Dataset& data) {
  const auto& r = cfg.recipe;
  require(cfg.post_burn_in >= 2, ErrorCode::InvalidArgument, "constraint sweep needs at least two draws");
  const LatticeSpec lat = LatticeSpec::make(r.nv_obs, r.nh_obs, 0, 0, r.k);
  const std::size_t cells = cfg.m_values.size() * cfg.alpha_values.size();
  std::vector<ConstraintSweepRow> rows(cells);
  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const Index m = cfg.m_values[cell / cfg.alpha_values.size()];
    const double alpha = cfg.alpha_values[cell % cfg.alpha_values.size()];
    const Model model = build_model(lat, r.hp, data.d_obs, data.image_observations(central_rows(r.nv_obs, m)), true);
    // same prior draw for every alpha at a given m
    Rng init(cfg.seed, Stream::Init, static_cast<std::uint32_t>(m));
    ChainConfig cc;
    cc.alpha = alpha;
    cc.burn_in = cfg.post_burn_in / 2;
    cc.iterations = cfg.post_burn_in + *cc.burn_in;
    cc.hmc = cfg.hmc;
    cc.seed = cfg.seed;
    cc.chain = static_cast<std::uint32_t>(m * 64 + static_cast<Index>(cell % cfg.alpha_values.size()));
    const ChainTraces tr = run_chain(model, prior_state(model, init), cc);

    ConstraintSweepRow row;
    row.m = m;
    row.alpha = alpha;
    const std::size_t lag = std::min(cfg.max_lag, tr.size() - 1);
    std::vector<double> e, j;
    for (Index c = 0; c < tr.omega.cols(); ++c) {
      const auto x = column(tr.omega, c);
      try {
        e.push_back(ess(x, lag));
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateTrace) throw;
        e.push_back(0.0);
      }
      j.push_back(msjd(x));
    }
    row.ess = summary_of(e);
    row.msjd = summary_of(j);
    const VectorXd proj = tr.omega * data.truth.omega;
    row.mode_visits = sign_changes(std::span<const double>(proj.data(), static_cast<std::size_t>(proj.size())));
    row.central_sign_changes = sign_changes(column(tr.omega, lat.k / 2));
    row.acceptance = tr.acceptance();
    row.eps = alpha > 0.0 ? tr.hmc_eps : 0.0;
    row.divergent = tr.stats.hmc_divergent;
    rows[cell] = row;
  });
  return rows;
}

std::vector<PaddingSweepRow> padding_sweep(const PaddingSweepConfig& cfg, const Dataset& data) {
  const auto& r = cfg.recipe;
  require(cfg.post_burn_in >= 1, ErrorCode::InvalidArgument, "padding sweep needs at least one draw");
  const std::size_t cells = cfg.mv_values.size() * cfg.mh_values.size();
  std::vector<PaddingSweepRow> rows(cells);
  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const Index mv = cfg.mv_values[cell / cfg.mh_values.size()];
    const Index mh = cfg.mh_values[cell % cfg.mh_values.size()];
    const LatticeSpec lat = LatticeSpec::make(r.nv_obs, r.nh_obs, mv, mh, r.k);
    const Model model = build_model(lat, r.hp, data.d_obs, data.image_observations());
    const MatrixXd c_true = truth_on_lattice(data, lat);
    const std::vector<Index> free = complement(model.image.constraint.selector, lat.n());

    VectorXd se_omega = VectorXd::Zero(lat.k), se_c = VectorXd::Zero(static_cast<Index>(free.size()));
    double se_sc = 0.0, se_sw = 0.0, se_z = 0.0;
    std::size_t n = 0;
    const auto& t = data.truth;
    auto observe = [&](std::size_t, const ModelState& s) {
      se_omega += (s.omega - t.omega).cwiseAbs2();
      for (std::size_t i = 0; i < free.size(); ++i) {
        const double e = s.c(free[i]) - c_true(free[i]);
        se_c(static_cast<Index>(i)) += e * e;
      }
      se_sc += (s.sigma_c2 - t.sigma_c2) * (s.sigma_c2 - t.sigma_c2);
      se_sw += (s.sigma_w2 - t.sigma_w2) * (s.sigma_w2 - t.sigma_w2);
      se_z += (s.zeta - t.zeta) * (s.zeta - t.zeta);
      ++n;
    };
    // streams keyed by the cell's padding so a cell replays in any grid
    const auto key = static_cast<std::uint32_t>(mv * 4096 + mh);
    Rng init(cfg.seed, Stream::Init, key);
    ChainConfig cc;
    cc.burn_in = cfg.post_burn_in / 2;
    cc.iterations = cfg.post_burn_in + *cc.burn_in;
    cc.seed = cfg.seed;
    cc.chain = key;
    (void)run_chain(model, prior_state(model, init), cc, observe);

    const double dn = static_cast<double>(n);
    auto rms = [dn](const VectorXd& se) {
      std::vector<double> v(static_cast<std::size_t>(se.size()));
      for (Index i = 0; i < se.size(); ++i) v[static_cast<std::size_t>(i)] = std::sqrt(se(i) / dn);
      return v;
    };
    PaddingSweepRow row;
    row.mv = mv;
    row.mh = mh;
    row.rmse_omega = summary_of(rms(se_omega));
    row.rmse_c = summary_of(rms(se_c));
    row.rmse_sigma_c2 = std::sqrt(se_sc / dn);
    row.rmse_sigma_w2 = std::sqrt(se_sw / dn);
    row.rmse_zeta = std::sqrt(se_z / dn);
    rows[cell] = row;
  });
  return rows;
}

}  // namespace sbd
