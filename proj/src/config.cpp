#include "sbd/config.hpp"

#include <cstdio>
#include <set>

#include "sbd/errors.hpp"
#include "sbd/io.hpp"

namespace sbd {

using nlohmann::json;

namespace {

// Object view that records which keys were read so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), ErrorCode::ConfigError, "'" + label() + "' must be an object");
  }
  ~Section() = default;

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  Section child(const std::string& key) {
    static const json empty = json::object();
    const json* v = find(key);
    return Section(v ? *v : empty, key_path(key));
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) out = convert<T>(*v, key);
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (const json* v = find(key)) out = convert<T>(*v, key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      require(seen_.count(it.key()) > 0, ErrorCode::ConfigError, "unknown key '" + key_path(it.key()) + "'");
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  template <class T>
  T convert(const json& v, const std::string& key) const {
    const std::string where = "'" + key_path(key) + "'";
    if constexpr (std::is_same_v<T, bool>) {
      require(v.is_boolean(), ErrorCode::ConfigError, where + " must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      require(v.is_number_integer(), ErrorCode::ConfigError, where + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        require(v.is_number_unsigned(), ErrorCode::ConfigError, where + " must be non-negative");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      require(v.is_number(), ErrorCode::ConfigError, where + " must be a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      require(v.is_string(), ErrorCode::ConfigError, where + " must be a string");
      return v.get<std::string>();
    } else {
      require(v.is_array(), ErrorCode::ConfigError, where + " must be an array");
      T out;
      for (const auto& e : v) out.push_back(convert<typename T::value_type>(e, key));
      return out;
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_correlation(Section& parent, const std::string& key, CorrelationSpec& c) {
  Section s = parent.child(key);
  s.get("phi", c.phi);
  s.get("p", c.p);
  s.finish();
}

template <class Fn>
void checked(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, e.what());
  }
}

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  cfg.source = doc;
  Section root(doc, "");

  {
    Section model = root.child("model");
    Section lat = model.child("lattice");
    Index nv_obs = 16, nh_obs = 4, k = 6;
    std::optional<Index> mv, mh;
    lat.get("nv_obs", nv_obs);
    lat.get("nh_obs", nh_obs);
    lat.get("mv", mv);
    lat.get("mh", mh);
    lat.get("k", k);
    lat.finish();
    require(mv.has_value() == mh.has_value(), ErrorCode::ConfigError,
            "'model.lattice' needs both 'mv' and 'mh' or neither");
    require(nv_obs > 0 && nh_obs > 0 && k > 0, ErrorCode::ConfigError, "'model.lattice' sizes must be positive");
    checked([&] {
      cfg.lattice = mv ? LatticeSpec::make(nv_obs, nh_obs, *mv, *mh, k)
                       : LatticeSpec::with_default_padding(nv_obs, nh_obs, k);
    });

    Section corr = model.child("correlations");
    read_correlation(corr, "blur", cfg.hp.blur);
    read_correlation(corr, "image_h", cfg.hp.image_h);
    read_correlation(corr, "image_v", cfg.hp.image_v);
    read_correlation(corr, "noise_h", cfg.hp.noise_h);
    read_correlation(corr, "noise_v", cfg.hp.noise_v);
    corr.finish();

    Section hyp = model.child("hyperparameters");
    hyp.get("alpha_c", cfg.hp.alpha_c);
    hyp.get("beta_c", cfg.hp.beta_c);
    hyp.get("alpha_w", cfg.hp.alpha_w);
    hyp.get("beta_w", cfg.hp.beta_w);
    hyp.get("alpha_zeta", cfg.hp.alpha_z);
    hyp.get("beta_zeta", cfg.hp.beta_z);
    hyp.get("psi", cfg.hp.psi);
    hyp.finish();
    model.finish();
    checked([&] { cfg.hp.validate(); });
  }

  {
    Section s = root.child("sampler");
    auto& c = cfg.sampler.chain;
    s.get("alpha", c.alpha);
    s.get("iterations", c.iterations);
    s.get("burn_in", c.burn_in);
    s.get("thin", c.thin);
    s.get("seed", c.seed);
    s.get("chains", cfg.sampler.chains);
    std::string trace = "window";
    s.get("trace_image", trace);
    if (trace == "none") cfg.sampler.trace_image = ImageTrace::None;
    else if (trace == "window") cfg.sampler.trace_image = ImageTrace::Window;
    else if (trace == "all") cfg.sampler.trace_image = ImageTrace::All;
    else fail(ErrorCode::ConfigError, "'sampler.trace_image' must be none, window or all");
    Section h = s.child("hmc");
    h.get("steps", c.hmc.steps);
    h.get("eps", c.hmc.eps);
    h.get("adapt", c.hmc.adapt);
    h.get("target_accept", c.hmc.target_accept);
    h.get("divergence", c.hmc.divergence);
    h.finish();
    s.finish();
    require(cfg.sampler.chains >= 1, ErrorCode::ConfigError, "'sampler.chains' must be at least 1");
    checked([&] {
      c.validate();
      c.hmc.validate();
    });
  }

  {
    Section s = root.child("simulation");
    auto& sim = cfg.simulation;
    s.get("gen_factor", sim.gen_factor);
    s.get("exact_column", sim.exact_column);
    s.get("exact_rows", sim.exact_rows);
    s.get("sigma_c2", sim.sigma_c2);
    s.get("sigma_w2", sim.sigma_w2);
    s.get("zeta", sim.zeta);
    s.get("seed", sim.seed);
    s.finish();
    require(!sim.exact_rows || (*sim.exact_rows >= 0 && *sim.exact_rows <= cfg.lattice.nv_obs), ErrorCode::ConfigError,
            "'simulation.exact_rows' must lie in [0, nv_obs]");
    checked([&] { cfg.recipe().validate(); });
  }

  {
    Section s = root.child("experiment");
    auto& e = cfg.experiment;
    s.get("m_values", e.m_values);
    s.get("alpha_values", e.alpha_values);
    s.get("mv_values", e.mv_values);
    s.get("mh_values", e.mh_values);
    s.get("post_burn_in", e.post_burn_in);
    s.get("max_lag", e.max_lag);
    s.finish();
    require(e.post_burn_in >= 2, ErrorCode::ConfigError, "'experiment.post_burn_in' must be at least 2");
    for (double a : e.alpha_values)
      require(a >= 0.0 && a <= 1.0, ErrorCode::ConfigError, "'experiment.alpha_values' must lie in [0, 1]");
  }

  {
    Section s = root.child("io");
    std::string data, obs, out = "out", format = "csv";
    s.get("data", data);
    s.get("image_obs", obs);
    s.get("output", out);
    s.get("format", format);
    s.finish();
    require(format == "csv" || format == "binary", ErrorCode::ConfigError, "'io.format' must be csv or binary");
    cfg.io.data = data;
    cfg.io.image_obs = obs;
    cfg.io.output = out;
    cfg.io.binary = format == "binary";
  }

  root.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  RunConfig cfg = parse_config(doc);
  const auto base = path.parent_path();
  for (auto* p : {&cfg.io.data, &cfg.io.image_obs, &cfg.io.output})
    if (!p->empty() && p->is_relative()) *p = base / *p;
  return cfg;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : source.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimRecipe RunConfig::recipe() const {
  SimRecipe r;
  r.nv_obs = lattice.nv_obs;
  r.nh_obs = lattice.nh_obs;
  r.k = lattice.k;
  r.gen_factor = simulation.gen_factor;
  r.hp = hp;
  r.seed = simulation.seed;
  r.exact_column = simulation.exact_column;
  r.sigma_c2 = simulation.sigma_c2;
  r.sigma_w2 = simulation.sigma_w2;
  r.zeta = simulation.zeta;
  return r;
}

void RunConfig::override_seed(std::uint64_t seed) {
  sampler.chain.seed = seed;
  simulation.seed = seed;
  source["seed_override"] = seed;
}

}  // namespace sbd
