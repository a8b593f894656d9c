#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "sbd/config.hpp"
#include "sbd/diagnostics.hpp"
#include "sbd/errors.hpp"
#include "sbd/experiments.hpp"
#include "sbd/io.hpp"

#ifndef SBD_VERSION
#define SBD_VERSION "unknown"
#endif

using namespace sbd;
using nlohmann::json;

namespace {

enum class Level { Error = 0, Warn, Info, Debug };

Level log_level() {
  static const Level level = [] {
    const char* v = std::getenv("SBD_LOG");
    const std::string s = v ? v : "warn";
    if (s == "error") return Level::Error;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void log(Level level, const std::string& msg) {
  static std::mutex mu;
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard lock(mu);
  std::cerr << "[sbd " << names[static_cast<int>(level)] << "] " << msg << "\n";
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

RunConfig load(const Common& c) {
  require(!c.config.empty(), ErrorCode::ConfigError, "--config is required");
  RunConfig cfg = load_config(c.config);
  if (c.seed) cfg.override_seed(*c.seed);
  if (!c.out.empty()) cfg.io.output = c.out;
  return cfg;
}

std::string ext(const RunConfig& cfg) { return cfg.io.binary ? ".bin" : ".csv"; }

json manifest(const RunConfig& cfg, const std::string& command, double seconds) {
  json m;
  m["command"] = command;
  m["version"] = SBD_VERSION;
  m["config_hash"] = cfg.hash();
  m["config"] = cfg.source;
  m["seed"] = command == "simulate" ? cfg.simulation.seed : cfg.sampler.chain.seed;
  m["wall_seconds"] = seconds;
  return m;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MatrixXd to_column(const std::vector<double>& v) { return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size())); }

// ---- simulate

int cmd_simulate(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  const SimRecipe recipe = cfg.recipe();
  log(Level::Info, "simulating " + std::to_string(recipe.nv_obs) + "x" + std::to_string(recipe.nh_obs) + " on a " +
                       std::to_string(recipe.gen_nv()) + "x" + std::to_string(recipe.gen_nh()) + " lattice");
  const Dataset ds = simulate_dataset(recipe);
  const auto rows = central_rows(recipe.nv_obs, cfg.simulation.exact_rows.value_or(recipe.nv_obs));
  const ImageObservations obs = ds.image_observations(rows);
  MatrixXd obs_m(static_cast<Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    obs_m.row(static_cast<Index>(i)) << static_cast<double>(obs.positions[i].first),
        static_cast<double>(obs.positions[i].second), obs.values(static_cast<Index>(i));
  const auto& t = ds.truth;
  const fs::path out = cfg.io.output;
  const std::string e = ext(cfg);
  write_matrix(out / ("d_obs" + e), ds.d_obs);
  write_matrix(out / ("image_obs" + e), obs_m);
  write_matrix(out / ("truth_omega" + e), t.omega);
  write_matrix(out / ("truth_image" + e), ds.c_window);
  MatrixXd var(1, 3);
  var << t.sigma_c2, t.sigma_w2, t.zeta;
  write_matrix(out / ("truth_variances" + e), var);
  json m = manifest(cfg, "simulate", seconds_since(t0));
  m["files"] = {"d_obs" + e, "image_obs" + e, "truth_omega" + e, "truth_image" + e, "truth_variances" + e};
  write_json(out / "manifest.json", m);
  log(Level::Info, "wrote dataset to " + out.string());
  return 0;
}

// ---- sample

ImageObservations read_image_obs(const fs::path& path) {
  ImageObservations obs;
  if (path.empty()) return obs;
  const MatrixXd m = read_matrix(path);
  require(m.rows() == 0 || m.cols() == 3, ErrorCode::IoError, path.string() + ": image observations need 3 columns");
  obs.values.resize(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    obs.positions.emplace_back(static_cast<Index>(m(i, 0)), static_cast<Index>(m(i, 1)));
    obs.values(i) = m(i, 2);
  }
  return obs;
}

std::vector<Index> image_trace_indices(const Model& model, ImageTrace mode) {
  const auto& lat = model.lattice;
  std::vector<Index> idx;
  if (mode == ImageTrace::None) return idx;
  const auto free = complement(model.image.constraint.selector, lat.n());
  for (Index i : free) {
    const Index r = i % lat.nv - lat.row_offset(), col = i / lat.nv;
    if (mode == ImageTrace::All || (r >= 0 && r < lat.nv_obs && col < lat.nh_obs)) idx.push_back(i);
  }
  return idx;
}

json run_one_chain(const RunConfig& cfg, const Model& model, std::uint32_t chain, const fs::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  ChainConfig cc = cfg.sampler.chain;
  cc.chain = chain;
  cc.c_trace = image_trace_indices(model, cfg.sampler.trace_image);
  Rng init(cc.seed, Stream::Init, chain);
  const ModelState start = prior_state(model, init);

  const auto& lat = model.lattice;
  MatrixXd c_sum = MatrixXd::Zero(lat.nv, lat.nh), c_sq = c_sum, d_sum = c_sum;
  std::size_t n = 0;
  const ChainTraces tr = run_chain(model, start, cc, [&](std::size_t it, const ModelState& s) {
    c_sum += s.c;
    c_sq += s.c.cwiseAbs2();
    d_sum += s.d;
    ++n;
    if (log_level() >= Level::Debug && n % 1000 == 0) log(Level::Debug, "chain " + std::to_string(chain) + " at " + std::to_string(it));
  });
  const double dn = static_cast<double>(n);
  const MatrixXd c_mean = c_sum / dn;
  const MatrixXd c_sd = (c_sq / dn - c_mean.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();

  const std::string e = ext(cfg);
  write_matrix(dir / ("omega" + e), tr.omega);
  write_matrix(dir / ("sigma_c2" + e), to_column(tr.sigma_c2));
  write_matrix(dir / ("sigma_w2" + e), to_column(tr.sigma_w2));
  write_matrix(dir / ("zeta" + e), to_column(tr.zeta));
  std::vector<std::string> files{"omega" + e, "sigma_c2" + e, "sigma_w2" + e, "zeta" + e};
  if (!tr.c_indices.empty()) {
    write_matrix(dir / ("c" + e), tr.c);
    MatrixXd idx(static_cast<Index>(tr.c_indices.size()), 2);
    for (std::size_t i = 0; i < tr.c_indices.size(); ++i)
      idx.row(static_cast<Index>(i)) << static_cast<double>(tr.c_indices[i] % lat.nv),
          static_cast<double>(tr.c_indices[i] / lat.nv);
    write_matrix(dir / ("c_positions" + e), idx);
    files.insert(files.end(), {"c" + e, "c_positions" + e});
  }
  write_matrix(dir / ("c_mean" + e), c_mean);
  write_matrix(dir / ("c_sd" + e), c_sd);
  write_matrix(dir / ("d_mean" + e), d_sum / dn);
  write_matrix(dir / ("hmc_delta_h" + e), to_column(tr.delta_h));
  files.insert(files.end(), {"c_mean" + e, "c_sd" + e, "d_mean" + e, "hmc_delta_h" + e});

  json m = manifest(cfg, "sample", seconds_since(t0));
  m["chain"] = chain;
  m["files"] = files;
  m["retained"] = tr.size();
  m["lattice"] = {{"nv", lat.nv}, {"nh", lat.nh}, {"row_offset", lat.row_offset()}};
  m["hmc"] = {{"eps", tr.hmc_eps},
              {"proposals", tr.stats.hmc_blur},
              {"accepted", tr.stats.hmc_accepted},
              {"divergent", tr.stats.hmc_divergent},
              {"post_burn_in_acceptance", tr.acceptance()}};
  m["gibbs_blur_updates"] = tr.stats.gibbs_blur;
  write_json(dir / "manifest.json", m);
  return m;
}

int cmd_sample(const Common& c) {
  const RunConfig cfg = load(c);
  require(!cfg.io.data.empty(), ErrorCode::ConfigError, "'io.data' is required for sample");
  const MatrixXd d_obs = read_matrix(cfg.io.data);
  require(d_obs.rows() == cfg.lattice.nv_obs && d_obs.cols() == cfg.lattice.nh_obs, ErrorCode::IoError,
          cfg.io.data.string() + ": data shape does not match model.lattice");
  const ImageObservations obs = read_image_obs(cfg.io.image_obs);
  const bool needs_kron = cfg.sampler.chain.alpha > 0.0;
  const Model model = build_model(cfg.lattice, cfg.hp, d_obs, obs, needs_kron);
  const int chains = cfg.sampler.chains;
  log(Level::Info, "sampling " + std::to_string(chains) + " chain(s) of " +
                       std::to_string(cfg.sampler.chain.iterations) + " sweeps");
  parallel_for(static_cast<std::size_t>(chains), c.threads, [&](std::size_t i) {
    const fs::path dir = chains == 1 ? cfg.io.output : cfg.io.output / ("chain_" + std::to_string(i));
    const json m = run_one_chain(cfg, model, static_cast<std::uint32_t>(i), dir);
    log(Level::Info, "chain " + std::to_string(i) + " done in " + std::to_string(m["wall_seconds"].get<double>()) + " s");
  });
  return 0;
}

// ---- diagnose

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string csv() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
      s += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }
};

std::optional<fs::path> find_matrix(const fs::path& dir, const std::string& stem) {
  for (const char* e : {".csv", ".bin"})
    if (fs::exists(dir / (stem + e))) return dir / (stem + e);
  return std::nullopt;
}

int cmd_diagnose(const std::string& traces, const std::string& truth, const std::string& out, std::size_t max_lag) {
  const fs::path dir = traces;
  require(fs::is_directory(dir), ErrorCode::IoError, "trace directory " + traces + " not found");
  std::map<std::string, VectorXd> truths;
  if (!truth.empty()) {
    if (auto p = find_matrix(truth, "truth_omega")) truths["omega"] = read_matrix(*p).col(0);
    if (auto p = find_matrix(truth, "truth_variances")) {
      const MatrixXd v = read_matrix(*p);
      require(v.size() == 3, ErrorCode::IoError, "truth_variances needs three entries");
      truths["sigma_c2"] = VectorXd::Constant(1, v(0));
      truths["sigma_w2"] = VectorXd::Constant(1, v(1));
      truths["zeta"] = VectorXd::Constant(1, v(2));
    }
  }
  Table t;
  t.header = {"block", "coord", "n", "mean", "sd", "q025", "q50", "q975", "ess", "msjd", "rmse"};
  bool any = false;
  for (const std::string block : {"omega", "sigma_c2", "sigma_w2", "zeta", "c"}) {
    const auto p = find_matrix(dir, block);
    if (!p) continue;
    any = true;
    const MatrixXd m = read_matrix(*p);
    require(m.rows() >= 2, ErrorCode::IoError, p->string() + ": need at least two draws");
    // the full-length sum of biased autocorrelations telescopes to -1/2, so
    // keep the window to a tenth of the trace
    const std::size_t cap = std::max<std::size_t>(1, static_cast<std::size_t>(m.rows()) / 10);
    if (max_lag > cap && block == "omega") log(Level::Warn, "max lag capped at " + std::to_string(cap));
    const std::size_t lag = max_lag ? std::min(max_lag, cap) : cap;
    for (Index j = 0; j < m.cols(); ++j) {
      const std::vector<double> x(m.col(j).data(), m.col(j).data() + m.rows());
      const Summary s = summarize(x);
      std::string e = "nan";
      try {
        e = format_double(ess(x, lag));
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateTrace) throw;
      }
      std::string r;
      if (auto it = truths.find(block); it != truths.end() && j < it->second.size())
        r = format_double(rmse(x, it->second(j)));
      t.rows.push_back({block, std::to_string(j), std::to_string(x.size()), format_double(s.mean), format_double(s.sd),
                        format_double(s.q025), format_double(s.q50), format_double(s.q975), e, format_double(msjd(x)),
                        r});
    }
  }
  require(any, ErrorCode::IoError, "no trace files in " + traces);
  const fs::path dest = (out.empty() ? dir : fs::path(out)) / "diagnostics.csv";
  write_file_atomic(dest, t.csv());
  log(Level::Info, "wrote " + dest.string());
  return 0;
}

// ---- experiments

int cmd_constraint_sweep(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  ConstraintSweepConfig sc;
  sc.recipe = cfg.recipe();
  sc.m_values = cfg.experiment.m_values;
  sc.alpha_values = cfg.experiment.alpha_values;
  sc.post_burn_in = cfg.experiment.post_burn_in;
  sc.max_lag = cfg.experiment.max_lag;
  sc.hmc = cfg.sampler.chain.hmc;
  sc.seed = cfg.sampler.chain.seed;
  sc.threads = c.threads;
  for (Index m : sc.m_values)
    require(m >= 0 && m <= sc.recipe.nv_obs, ErrorCode::ConfigError, "'experiment.m_values' entries must lie in [0, nv_obs]");
  const Dataset ds = simulate_dataset(sc.recipe);
  log(Level::Info, "constraint sweep over " + std::to_string(sc.m_values.size() * sc.alpha_values.size()) + " cells");
  const auto rows = constraint_sweep(sc, ds);
  Table t;
  t.header = {"m", "alpha", "ess_mean", "ess_min", "ess_q025", "ess_q50", "ess_q975", "msjd_mean", "msjd_q025",
              "msjd_q50", "msjd_q975", "mode_visits", "central_sign_changes", "acceptance", "eps", "divergent"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.m), format_double(r.alpha), format_double(r.ess.mean),
                      format_double(r.ess.min), format_double(r.ess.q025), format_double(r.ess.q50),
                      format_double(r.ess.q975), format_double(r.msjd.mean), format_double(r.msjd.q025),
                      format_double(r.msjd.q50), format_double(r.msjd.q975), std::to_string(r.mode_visits),
                      std::to_string(r.central_sign_changes), format_double(r.acceptance), format_double(r.eps),
                      std::to_string(r.divergent)});
    if (r.alpha == 1.0)
      for (const auto& g : rows)
        if (g.m == r.m && g.alpha == 0.0 && r.m <= 4 && r.mode_visits < g.mode_visits)
          log(Level::Warn, "m = " + std::to_string(r.m) + ": HMC mode visits below Gibbs");
  }
  const fs::path out = cfg.io.output;
  write_file_atomic(out / "constraint_sweep.csv", t.csv());
  json m = manifest(cfg, "experiment constraint-sweep", seconds_since(t0));
  m["files"] = {"constraint_sweep.csv"};
  write_json(out / "manifest.json", m);
  return 0;
}

int cmd_padding_sweep(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  PaddingSweepConfig pc;
  pc.recipe = cfg.recipe();
  pc.mv_values = cfg.experiment.mv_values;
  pc.mh_values = cfg.experiment.mh_values;
  pc.post_burn_in = cfg.experiment.post_burn_in;
  pc.seed = cfg.sampler.chain.seed;
  pc.threads = c.threads;
  const Dataset ds = simulate_dataset(pc.recipe);
  log(Level::Info, "padding sweep over " + std::to_string(pc.mv_values.size() * pc.mh_values.size()) + " cells");
  const auto rows = padding_sweep(pc, ds);
  Table t;
  t.header = {"mv", "mh", "rmse_omega_mean", "rmse_omega_q025", "rmse_omega_q975", "rmse_c_mean", "rmse_c_q025",
              "rmse_c_q975", "rmse_sigma_c2", "rmse_sigma_w2", "rmse_zeta"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.mv), std::to_string(r.mh), format_double(r.rmse_omega.mean),
                      format_double(r.rmse_omega.q025), format_double(r.rmse_omega.q975), format_double(r.rmse_c.mean),
                      format_double(r.rmse_c.q025), format_double(r.rmse_c.q975), format_double(r.rmse_sigma_c2),
                      format_double(r.rmse_sigma_w2), format_double(r.rmse_zeta)});
  const fs::path out = cfg.io.output;
  write_file_atomic(out / "padding_sweep.csv", t.csv());
  json m = manifest(cfg, "experiment padding-sweep", seconds_since(t0));
  m["files"] = {"padding_sweep.csv"};
  write_json(out / "manifest.json", m);
  return 0;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError: return 2;
    case ErrorCode::IoError: return 3;
    default: return 4;
  }
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "run configuration (JSON)");
  app->add_option("--seed", c.seed, "seed, overrides the configuration");
  app->add_option("--out", c.out, "output directory, overrides io.output");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian semi-blind deconvolution on extended cyclic lattices"};
  app.set_version_flag("--version", SBD_VERSION);
  app.require_subcommand(1);

  Common sim_c, sample_c, exp_c;
  auto* sim = app.add_subcommand("simulate", "simulate a dataset from the model");
  add_common(sim, sim_c);
  auto* sample = app.add_subcommand("sample", "run the hybrid Gibbs/HMC sampler");
  add_common(sample, sample_c);

  std::string traces, truth, diag_out;
  std::size_t max_lag = 0;
  auto* diag = app.add_subcommand("diagnose", "ESS, MSJD and RMSE of trace files");
  diag->add_option("--traces", traces, "directory with trace files")->required();
  diag->add_option("--truth", truth, "directory with truth_* files");
  diag->add_option("--out", diag_out, "output directory (defaults to the trace directory)");
  diag->add_option("--max-lag", max_lag, "autocorrelation lags in the ESS sum (default and maximum: a tenth of the trace)");

  auto* exp = app.add_subcommand("experiment", "simulation studies");
  exp->require_subcommand(1);
  auto* cs = exp->add_subcommand("constraint-sweep", "Gibbs and HMC mixing as exact observations grow");
  add_common(cs, exp_c);
  auto* ps = exp->add_subcommand("padding-sweep", "estimation error against padding size");
  add_common(ps, exp_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(sim_c);
    if (*sample) return cmd_sample(sample_c);
    if (*diag) return cmd_diagnose(traces, truth, diag_out, max_lag);
    if (*cs) return cmd_constraint_sweep(exp_c);
    if (*ps) return cmd_padding_sweep(exp_c);
  } catch (const Error& e) {
    log(Level::Error, e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return 1;
  }
  return 0;
}
