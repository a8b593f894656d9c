#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbd/config.hpp"
#include "sbd/diagnostics.hpp"
#include "sbd/errors.hpp"
#include "sbd/experiments.hpp"
#include "sbd/gibbs.hpp"
#include "sbd/hmc.hpp"
#include "sbd/model.hpp"

namespace py = pybind11;
using namespace sbd;

namespace {

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

ImageObservations make_obs(const std::vector<std::pair<Index, Index>>& positions, const VectorXd& values) {
  ImageObservations obs;
  obs.positions = positions;
  obs.values = values;
  return obs;
}

py::dict traces_dict(const ChainTraces& t) {
  py::dict d;
  d["omega"] = t.omega;
  d["c"] = t.c;
  d["c_indices"] = t.c_indices;
  d["sigma_c2"] = t.sigma_c2;
  d["sigma_w2"] = t.sigma_w2;
  d["zeta"] = t.zeta;
  d["delta_h"] = t.delta_h;
  d["hmc_eps"] = t.hmc_eps;
  d["acceptance"] = t.acceptance();
  d["divergent"] = t.stats.hmc_divergent;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian semi-blind deconvolution on extended cyclic lattices";

  py::register_exception<Error>(m, "SbdError", PyExc_RuntimeError);

  py::class_<CorrelationSpec>(m, "CorrelationSpec")
      .def(py::init<>())
      .def(py::init([](double phi, double p) { return CorrelationSpec{phi, p}; }), py::arg("phi"), py::arg("p"))
      .def_readwrite("phi", &CorrelationSpec::phi)
      .def_readwrite("p", &CorrelationSpec::p);

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("alpha_c", &HyperParams::alpha_c)
      .def_readwrite("beta_c", &HyperParams::beta_c)
      .def_readwrite("alpha_w", &HyperParams::alpha_w)
      .def_readwrite("beta_w", &HyperParams::beta_w)
      .def_readwrite("alpha_zeta", &HyperParams::alpha_z)
      .def_readwrite("beta_zeta", &HyperParams::beta_z)
      .def_readwrite("psi", &HyperParams::psi)
      .def_readwrite("blur", &HyperParams::blur)
      .def_readwrite("image_h", &HyperParams::image_h)
      .def_readwrite("image_v", &HyperParams::image_v)
      .def_readwrite("noise_h", &HyperParams::noise_h)
      .def_readwrite("noise_v", &HyperParams::noise_v)
      .def("validate", &HyperParams::validate);

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init(&LatticeSpec::make), py::arg("nv_obs"), py::arg("nh_obs"), py::arg("mv"), py::arg("mh"), py::arg("k"))
      .def_static("with_default_padding", &LatticeSpec::with_default_padding, py::arg("nv_obs"), py::arg("nh_obs"),
                  py::arg("k"))
      .def_readonly("nv_obs", &LatticeSpec::nv_obs)
      .def_readonly("nh_obs", &LatticeSpec::nh_obs)
      .def_readonly("mv", &LatticeSpec::mv)
      .def_readonly("mh", &LatticeSpec::mh)
      .def_readonly("nv", &LatticeSpec::nv)
      .def_readonly("nh", &LatticeSpec::nh)
      .def_readonly("k", &LatticeSpec::k)
      .def_property_readonly("row_offset", &LatticeSpec::row_offset);

  py::class_<Model>(m, "Model")
      .def(py::init([](const LatticeSpec& lat, const HyperParams& hp, const MatrixXd& d_obs,
                       const std::vector<std::pair<Index, Index>>& positions, const VectorXd& values,
                       bool require_kronecker) {
             return build_model(lat, hp, d_obs, make_obs(positions, values), require_kronecker);
           }),
           py::arg("lattice"), py::arg("hp"), py::arg("d_obs"), py::arg("positions") = std::vector<std::pair<Index, Index>>{},
           py::arg("values") = VectorXd(), py::arg("require_kronecker") = false)
      .def_readonly("lattice", &Model::lattice)
      .def_readonly("hp", &Model::hp)
      .def_readonly("d_obs", &Model::d_obs)
      .def_property_readonly("m", [](const Model& mdl) { return mdl.image.m(); });

  py::class_<ModelState>(m, "ModelState")
      .def_readonly("omega", &ModelState::omega)
      .def_readonly("w_star", &ModelState::w_star)
      .def_readwrite("c", &ModelState::c)
      .def_readwrite("d", &ModelState::d)
      .def_readwrite("sigma_c2", &ModelState::sigma_c2)
      .def_readwrite("sigma_w2", &ModelState::sigma_w2)
      .def_readwrite("zeta", &ModelState::zeta)
      .def("set_omega", [](ModelState& s, const VectorXd& om, const Model& mdl) { s.set_omega(om, mdl.blur); })
      .def("copy", [](const ModelState& s) { return s; });

  m.def("initial_state", &initial_state, py::arg("model"));
  m.def("prior_state",
        [](const Model& mdl, std::uint64_t seed) {
          Rng rng(seed, Stream::Init);
          return prior_state(mdl, rng);
        },
        py::arg("model"), py::arg("seed") = 1);
  m.def("log_posterior", &log_posterior_unnorm, py::arg("state"), py::arg("model"));

  m.def("gibbs_sweeps",
        [](ModelState& s, const Model& mdl, int sweeps, std::uint64_t seed) {
          ChainRng rng(seed);
          for (int i = 0; i < sweeps; ++i) gibbs_sweep(s, mdl, rng, 0.0, nullptr);
        },
        py::arg("state"), py::arg("model"), py::arg("sweeps") = 1, py::arg("seed") = 1,
        "Full-conditional sweeps in place.");

  m.def("potential",
        [](const Model& mdl, const ModelState& s, const VectorXd& omega) {
          const auto ctx = MarginalContext::build(s, mdl);
          MarginalWorkspace ws;
          return potential(omega, ctx, ws);
        },
        py::arg("model"), py::arg("state"), py::arg("omega"));
  m.def("grad_potential",
        [](const Model& mdl, const ModelState& s, const VectorXd& omega) {
          const auto ctx = MarginalContext::build(s, mdl);
          MarginalWorkspace ws;
          potential(omega, ctx, ws);
          return grad_potential(omega, ctx, ws);
        },
        py::arg("model"), py::arg("state"), py::arg("omega"));

  py::class_<HmcConfig>(m, "HmcConfig")
      .def(py::init<>())
      .def_readwrite("steps", &HmcConfig::steps)
      .def_readwrite("eps", &HmcConfig::eps)
      .def_readwrite("adapt", &HmcConfig::adapt)
      .def_readwrite("target_accept", &HmcConfig::target_accept)
      .def_readwrite("divergence", &HmcConfig::divergence);

  m.def("run_chain",
        [](const Model& mdl, const ModelState& s, double alpha, std::size_t iterations, std::optional<std::size_t> burn_in,
           std::size_t thin, std::uint64_t seed, std::uint32_t chain, const HmcConfig& hmc,
           const std::vector<Index>& c_trace) {
          ChainConfig cfg;
          cfg.alpha = alpha;
          cfg.iterations = iterations;
          cfg.burn_in = burn_in;
          cfg.thin = thin;
          cfg.seed = seed;
          cfg.chain = chain;
          cfg.hmc = hmc;
          cfg.c_trace = c_trace;
          ChainTraces t;
          {
            py::gil_scoped_release release;
            t = run_chain(mdl, s, cfg);
          }
          return traces_dict(t);
        },
        py::arg("model"), py::arg("state"), py::arg("alpha") = 0.0, py::arg("iterations") = 3000,
        py::arg("burn_in") = std::nullopt, py::arg("thin") = 1, py::arg("seed") = 1, py::arg("chain") = 0,
        py::arg("hmc") = HmcConfig{}, py::arg("c_trace") = std::vector<Index>{});

  m.def("simulate",
        [](Index nv_obs, Index nh_obs, Index k, Index gen_factor, const HyperParams& hp, std::uint64_t seed,
           std::optional<double> sigma_c2, std::optional<double> sigma_w2, std::optional<double> zeta) {
          SimRecipe r;
          r.nv_obs = nv_obs;
          r.nh_obs = nh_obs;
          r.k = k;
          r.gen_factor = gen_factor;
          r.hp = hp;
          r.seed = seed;
          r.sigma_c2 = sigma_c2;
          r.sigma_w2 = sigma_w2;
          r.zeta = zeta;
          const Dataset data = simulate_dataset(r);
          py::dict d;
          d["d_obs"] = data.d_obs;
          d["c_window"] = data.c_window;
          d["exact_column"] = data.exact_column;
          d["omega"] = data.truth.omega;
          d["sigma_c2"] = data.truth.sigma_c2;
          d["sigma_w2"] = data.truth.sigma_w2;
          d["zeta"] = data.truth.zeta;
          return d;
        },
        py::arg("nv_obs") = 24, py::arg("nh_obs") = 6, py::arg("k") = 10, py::arg("gen_factor") = 10,
        py::arg("hp") = HyperParams{}, py::arg("seed") = 1, py::arg("sigma_c2") = std::nullopt,
        py::arg("sigma_w2") = std::nullopt, py::arg("zeta") = std::nullopt);
  m.def("central_rows", &central_rows, py::arg("nv_obs"), py::arg("m"));

  m.def("ess", [](const std::vector<double>& x, std::size_t max_lag) { return ess(as_span(x), max_lag); },
        py::arg("trace"), py::arg("max_lag"));
  m.def("autocorrelation",
        [](const std::vector<double>& x, std::size_t max_lag) { return autocorrelation(as_span(x), max_lag); },
        py::arg("trace"), py::arg("max_lag"));
  m.def("msjd", [](const std::vector<double>& x) { return msjd(as_span(x)); }, py::arg("trace"));
  m.def("rmse", [](const std::vector<double>& x, double truth) { return rmse(as_span(x), truth); }, py::arg("trace"),
        py::arg("truth"));
  m.def("sign_changes", [](const std::vector<double>& x) { return sign_changes(as_span(x)); }, py::arg("trace"));
}
