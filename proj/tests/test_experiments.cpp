#include <cstring>

#include "doctest.h"
#include "helpers.hpp"
#include "sbd/errors.hpp"
#include "sbd/experiments.hpp"

using namespace sbd;
using namespace sbdtest;

namespace {

SimRecipe small_recipe() {
  SimRecipe r;
  r.nv_obs = 12;
  r.nh_obs = 3;
  r.k = 6;
  r.gen_factor = 4;
  r.seed = 77;
  r.hp.blur = {2.0, 1.5};
  return r;
}

bool same_bytes(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

double triple_logpdf(const HyperParams& hp, double sc, double sw, double z) {
  return ig_logpdf(sc, hp.alpha_c, hp.beta_c) + ig_logpdf(sw, hp.alpha_w, hp.beta_w) +
         ig_logpdf(z, hp.alpha_z, hp.beta_z);
}

}  // namespace

TEST_CASE("simulate_dataset is deterministic") {
  SimRecipe r;
  const Dataset a = simulate_dataset(r);
  const Dataset b = simulate_dataset(r);
  CHECK(same_bytes(a.d_obs, b.d_obs));
  CHECK(same_bytes(a.c_window, b.c_window));
  CHECK(same_bytes(a.truth.omega, b.truth.omega));
  CHECK(a.d_obs.rows() == 24);
  CHECK(a.d_obs.cols() == 6);
  CHECK(a.truth.image.rows() == 240);
  CHECK(a.truth.image.cols() == 60);
  CHECK(a.exact_column == 3);
  r.seed = 2;
  CHECK(!same_bytes(simulate_dataset(r).d_obs, a.d_obs));
}

TEST_CASE("simulated variances are plausible under their priors") {
  const HyperParams hp;
  auto rng = test_rng(60);
  std::vector<double> lps;
  for (int i = 0; i < 100000; ++i)
    lps.push_back(triple_logpdf(hp, rng.inv_gamma(hp.alpha_c, hp.beta_c), rng.inv_gamma(hp.alpha_w, hp.beta_w),
                                rng.inv_gamma(hp.alpha_z, hp.beta_z)));
  const double q = quantile(lps, 0.001);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SimRecipe r;
    r.seed = seed;
    const auto t = simulate_dataset(r).truth;
    CHECK(triple_logpdf(hp, t.sigma_c2, t.sigma_w2, t.zeta) > q);
  }
}

TEST_CASE("snr grows as zeta shrinks") {
  SimRecipe r = small_recipe();
  r.sigma_c2 = 1.0;
  r.sigma_w2 = 1.0;
  double prev = -1.0;
  for (double z : {1.0, 0.1, 0.01}) {
    r.zeta = z;
    const Dataset ds = simulate_dataset(r);
    const auto& t = ds.truth;
    const LatticeSpec gen = LatticeSpec::make(r.gen_nv(), r.gen_nh(), 0, 0, r.k);
    const BlurPrior blur = build_blur_prior(gen, r.hp);
    const auto ops = build_convolution_ops(blur.lift(t.omega), t.image);
    const MatrixXd signal = ops.apply_w(t.image);
    const double snr = signal.squaredNorm() / (t.data - signal).squaredNorm();
    CHECK(snr > prev);
    prev = snr;
  }
}

TEST_CASE("truth alignment with a padded lattice") {
  const SimRecipe r = small_recipe();
  const Dataset ds = simulate_dataset(r);
  const MatrixXd t0 = truth_on_lattice(ds, LatticeSpec::make(12, 3, 0, 0, 6));
  CHECK(same_bytes(t0, ds.c_window));
  const LatticeSpec lat = LatticeSpec::make(12, 3, 6, 2, 6);
  const MatrixXd t = truth_on_lattice(ds, lat);
  CHECK(same_bytes(MatrixXd(t.block(lat.row_offset(), 0, 12, 3)), ds.c_window));
  CHECK_THROWS_AS(truth_on_lattice(ds, LatticeSpec::make(12, 3, 40, 2, 6)), Error);

  const Model model = build_model(lat, r.hp, ds.d_obs, ds.image_observations());
  CHECK(model.image.m() == 12);
  for (Index i = 0; i < 12; ++i)
    CHECK(model.image.constraint.values(i) == t(model.image.constraint.selector[static_cast<std::size_t>(i)]));
}

TEST_CASE("recipe validation") {
  SimRecipe r;
  r.gen_factor = 1;
  CHECK_THROWS_AS(r.validate(), Error);
  r = SimRecipe{};
  r.exact_column = 6;
  CHECK_THROWS_AS(r.validate(), Error);
  r = SimRecipe{};
  r.zeta = -1.0;
  CHECK_THROWS_AS(r.validate(), Error);
}

TEST_CASE("central rows and sign changes") {
  CHECK(central_rows(24, 0).empty());
  CHECK(central_rows(24, 2) == std::vector<Index>{11, 12});
  CHECK(central_rows(24, 24).front() == 0);
  CHECK(central_rows(24, 24).back() == 23);
  CHECK_THROWS_AS(central_rows(24, 26), Error);
  CHECK(sign_changes(std::vector<double>{1, 2, -1, 0, -3, 4}) == 2);
  CHECK(sign_changes(std::vector<double>{0, 0, 1}) == 0);
}

TEST_CASE("prior_state honours the constraints") {
  const SimRecipe r = small_recipe();
  const Dataset ds = simulate_dataset(r);
  const LatticeSpec lat = LatticeSpec::make(12, 3, 4, 1, 6);
  const Model model = build_model(lat, r.hp, ds.d_obs, ds.image_observations(central_rows(12, 4)));
  auto rng = test_rng(61);
  const ModelState s = prior_state(model, rng);
  for (Index i = 0; i < model.image.m(); ++i)
    CHECK(std::abs(s.c(model.image.constraint.selector[static_cast<std::size_t>(i)]) -
                   model.image.constraint.values(i)) < 1e-10);
  CHECK(max_abs(MatrixXd(s.d.block(lat.row_offset(), 0, 12, 3) - ds.d_obs)) < 1e-10);
  CHECK(s.sigma_c2 > 0);
  CHECK(max_abs(MatrixXd(s.w_star - model.blur.lift(s.omega))) == 0.0);
}

TEST_CASE("run_chain traces, thinning and replay") {
  const SimRecipe r = small_recipe();
  const Dataset ds = simulate_dataset(r);
  const LatticeSpec lat = LatticeSpec::make(12, 3, 4, 1, 6);
  const Model model = build_model(lat, r.hp, ds.d_obs, ds.image_observations(central_rows(12, 2)), true);
  auto rng = test_rng(62);
  const ModelState init = prior_state(model, rng);
  ChainConfig cc;
  cc.alpha = 0.5;
  cc.iterations = 90;
  cc.thin = 4;
  cc.seed = 5;
  cc.c_trace = {0, 7, 20};
  std::size_t seen = 0;
  const ChainTraces a = run_chain(model, init, cc, [&](std::size_t it, const ModelState&) {
    CHECK(it >= 30);
    CHECK((it - 30) % 4 == 0);
    ++seen;
  });
  CHECK(a.size() == 15);
  CHECK(seen == 15);
  CHECK(a.omega.rows() == 15);
  CHECK(a.c.cols() == 3);
  CHECK(a.stats.gibbs_blur + a.stats.hmc_blur == 90);
  CHECK(a.delta_h.size() == a.hmc_proposals_post);
  const ChainTraces b = run_chain(model, init, cc);
  CHECK(same_bytes(a.omega, b.omega));
  CHECK(same_bytes(a.c, b.c));
  CHECK(a.sigma_w2 == b.sigma_w2);

  cc.burn_in = 90;
  CHECK_THROWS_AS(cc.validate(), Error);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) fail(ErrorCode::InvalidArgument, "boom");
                  }),
                  Error);
}

TEST_CASE("constraint sweep table") {
  ConstraintSweepConfig cfg;
  cfg.recipe.nv_obs = 24;
  cfg.recipe.nh_obs = 1;
  cfg.recipe.seed = 3;
  cfg.m_values = {0, 2, 24};
  cfg.post_burn_in = 200;
  cfg.max_lag = 50;
  cfg.hmc.steps = 10;
  cfg.threads = 3;
  const Dataset ds = simulate_dataset(cfg.recipe);
  const auto rows = constraint_sweep(cfg, ds);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].m == cfg.m_values[i / 2]);
    CHECK(rows[i].alpha == cfg.alpha_values[i % 2]);
    CHECK(rows[i].ess.mean >= 0.0);
    CHECK(rows[i].msjd.mean >= 0.0);
  }
  cfg.threads = 1;
  const auto again = constraint_sweep(cfg, ds);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].ess.mean == rows[i].ess.mean);
    CHECK(again[i].mode_visits == rows[i].mode_visits);
  }
}

TEST_CASE("padding sweep table") {
  PaddingSweepConfig cfg;
  cfg.recipe = small_recipe();
  cfg.mv_values = {0, 2, 6};
  cfg.mh_values = {0, 2};
  cfg.post_burn_in = 60;
  cfg.threads = 2;
  const Dataset ds = simulate_dataset(cfg.recipe);
  const auto rows = padding_sweep(cfg, ds);
  REQUIRE(rows.size() == 6);
  CHECK(rows[5].mv == 6);
  CHECK(rows[5].mh == 2);
  for (const auto& r : rows) {
    CHECK(r.rmse_omega.mean > 0.0);
    CHECK(r.rmse_c.mean > 0.0);
  }
  cfg.mv_values = {6};
  cfg.mh_values = {2};
  const auto one = padding_sweep(cfg, ds);
  REQUIRE(one.size() == 1);
  CHECK(one[0].rmse_c.mean == rows[5].rmse_c.mean);
  CHECK(one[0].rmse_omega.q975 == rows[5].rmse_omega.q975);
}
