#include "mkv/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mkv/error.hpp"

namespace mkv {
namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

// Typed access to one JSON object that records defaults and rejects unknown keys.
class Fields {
 public:
  Fields(const json& j, std::string path, std::vector<std::string>& defaults)
      : j_(j), path_(std::move(path)), defaults_(defaults) {
    if (!j_.is_object()) schema(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& raw(const std::string& key) { return (seen_.insert(key), j_.at(key)); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      defaults_.push_back(at(key));
      return fallback;
    }
    return convert<T>(j_.at(key), at(key));
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) schema(at(key), "required field missing");
    return convert<T>(j_.at(key), at(key));
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) return std::nullopt;
    return convert<T>(j_.at(key), at(key));
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) schema(at(key), "unknown key");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) schema(path, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) schema(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) schema(path, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (v.is_number_integer() && !v.is_number_unsigned()) schema(path, "must be a non-negative integer");
      if (!v.is_number_unsigned()) schema(path, "expected a non-negative integer");
      return static_cast<T>(v.get<std::uint64_t>());
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) schema(path, "expected an array of numbers");
      std::vector<double> out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<double>(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
      if (!v.is_array()) schema(path, "expected an array of integers");
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<std::size_t>(v[i], path + "[" + std::to_string(i) + "]"));
      }
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& defaults_;
  std::set<std::string> seen_;
};

ScalarFn default_for(ScalarFn::Kind kind) {
  switch (kind) {
    case ScalarFn::Kind::Constant: return ScalarFn::constant(1.0);
    case ScalarFn::Kind::Affine: return ScalarFn::affine(1.0, 0.0);
    case ScalarFn::Kind::Sin: return ScalarFn::sine();
    case ScalarFn::Kind::Cos: return ScalarFn::cosine();
    case ScalarFn::Kind::ExpDecay: return ScalarFn::exp_decay();
    case ScalarFn::Kind::Clip: return ScalarFn::clip();
    case ScalarFn::Kind::Gauss: return ScalarFn::gauss();
  }
  return ScalarFn::constant(1.0);
}

std::vector<double> coords_of(const json& v, const std::string& path) {
  auto out = Fields::convert<std::vector<double>>(v, path);
  if (out.empty()) schema(path, "needs at least one coordinate");
  return out;
}

InitLaw parse_init(const json& j, const std::string& path, std::vector<std::string>& defaults) {
  Fields f(j, path, defaults);
  const auto law = f.require<std::string>("law");
  InitLaw out;
  if (law == "constant") {
    out = ConstantInit{f.get<double>("level", 0.0)};
  } else if (law == "uniform") {
    UniformLevelInit u{f.get<double>("lo", 0.0), f.get<double>("hi", 1.0)};
    if (u.hi < u.lo) schema(f.at("hi"), "must be >= lo");
    out = u;
  } else if (law == "brownian") {
    BrownianSegmentInit b{f.get<double>("start", 0.0), f.get<double>("sigma", 1.0)};
    if (b.sigma < 0.0) schema(f.at("sigma"), "must be non-negative");
    out = b;
  } else {
    schema(f.at("law"), "unknown initial law '" + law + "'");
  }
  f.finish();
  return out;
}

json init_to_json(const InitLaw& law) {
  return std::visit(
      [](const auto& l) -> json {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, ConstantInit>) return {{"law", "constant"}, {"level", l.level}};
        if constexpr (std::is_same_v<L, UniformLevelInit>) return {{"law", "uniform"}, {"lo", l.lo}, {"hi", l.hi}};
        if constexpr (std::is_same_v<L, BrownianSegmentInit>) {
          return {{"law", "brownian"}, {"start", l.start}, {"sigma", l.sigma}};
        }
      },
      law);
}

MediaLaw parse_media(const json& j, const std::string& path, std::vector<std::string>& defaults) {
  Fields f(j, path, defaults);
  const auto law = f.require<std::string>("law");
  MediaLaw out;
  if (law == "point") {
    out = PointMassMedia{coords_of(f.raw("point"), f.at("point"))};
  } else if (law == "box") {
    UniformBoxMedia b{coords_of(f.raw("lo"), f.at("lo")), coords_of(f.raw("hi"), f.at("hi"))};
    if (b.lo.size() != b.hi.size()) schema(f.at("hi"), "dimension differs from lo");
    for (std::size_t k = 0; k < b.lo.size(); ++k) {
      if (b.hi[k] < b.lo[k]) schema(f.at("hi"), "must be >= lo coordinatewise");
    }
    out = b;
  } else if (law == "discrete") {
    const json& atoms = f.raw("atoms");
    if (!atoms.is_array() || atoms.empty()) schema(f.at("atoms"), "expected a non-empty array of points");
    DiscreteMedia d;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      d.atoms.push_back(coords_of(atoms[i], f.at("atoms") + "[" + std::to_string(i) + "]"));
      if (d.atoms.back().size() != d.atoms.front().size()) schema(f.at("atoms"), "atoms differ in dimension");
    }
    out = d;
  } else {
    schema(f.at("law"), "unknown media law '" + law + "'");
  }
  f.finish();
  return out;
}

json media_to_json(const MediaLaw& law) {
  return std::visit(
      [](const auto& l) -> json {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMassMedia>) return {{"law", "point"}, {"point", l.point}};
        if constexpr (std::is_same_v<L, UniformBoxMedia>) return {{"law", "box"}, {"lo", l.lo}, {"hi", l.hi}};
        if constexpr (std::is_same_v<L, DiscreteMedia>) return {{"law", "discrete"}, {"atoms", l.atoms}};
      },
      law);
}

const std::set<std::string> kModelNames{"zero", "constant", "media_drift", "local_sine", "kuramoto", "gl"};

ScalarFn fn_field(Fields& f, const std::string& key, const ScalarFn& fallback, std::vector<std::string>& defaults) {
  if (!f.has(key)) {
    defaults.push_back(f.at(key));
    return fallback;
  }
  return scalar_fn_from_json(f.raw(key), f.at(key));
}

ModelConfig parse_model(const json& j, std::vector<std::string>& defaults) {
  Fields f(j, "model", defaults);
  ModelConfig m;
  m.name = f.require<std::string>("name");
  if (!kModelNames.count(m.name)) schema("model.name", "unknown model '" + m.name + "'");
  if (m.name == "constant") m.c = f.get<double>("c", m.c);
  if (m.name == "media_drift" || m.name == "local_sine") m.gain = f.get<double>("gain", m.gain);
  if (m.name == "local_sine") m.strength = f.get<double>("strength", m.strength);
  if (m.name == "kuramoto") {
    m.kuramoto.shape = fn_field(f, "shape", m.kuramoto.shape, defaults);
    m.kuramoto.coupling = f.get<double>("coupling", m.kuramoto.coupling);
    m.kuramoto.media_gain = f.get<double>("media_gain", m.kuramoto.media_gain);
    m.kuramoto.delay_base = f.get<double>("delay_base", m.kuramoto.delay_base);
    m.kuramoto.delay_slope = f.get<double>("delay_slope", m.kuramoto.delay_slope);
  }
  if (m.name == "gl") {
    m.gl.kernel = fn_field(f, "kernel", m.gl.kernel, defaults);
    m.gl.weight = fn_field(f, "weight", m.gl.weight, defaults);
    m.gl.rate = fn_field(f, "rate", m.gl.rate, defaults);
    m.gl.window = fn_field(f, "window", m.gl.window, defaults);
  }
  if (f.has("diffusion")) {
    Fields d(f.raw("diffusion"), "model.diffusion", defaults);
    m.diffusion.base = d.get<double>("base", 1.0);
    m.diffusion.slope = d.get<double>("slope", 0.0);
    d.finish();
  } else {
    defaults.push_back("model.diffusion");
  }
  if (f.has("init")) {
    m.init = parse_init(f.raw("init"), "model.init", defaults);
  } else {
    defaults.push_back("model.init");
  }
  if (f.has("media")) {
    m.media = parse_media(f.raw("media"), "model.media", defaults);
  } else {
    defaults.push_back("model.media");
  }
  m.f_sup = f.optional<double>("f_sup");
  m.f_sl = f.optional<double>("f_sl");
  if (m.f_sup && *m.f_sup < 0.0) throw Error(ErrorCode::BoundsError, "model.f_sup: must be non-negative");
  if (m.f_sl && *m.f_sl < 0.0) throw Error(ErrorCode::BoundsError, "model.f_sl: must be non-negative");
  m.audit = f.get<bool>("audit", false);
  m.drift_atoms = f.get<std::size_t>("drift_atoms", 0);
  f.finish();
  return m;
}

json model_to_json(const ModelConfig& m) {
  json j{{"name", m.name}};
  if (m.name == "constant") j["c"] = m.c;
  if (m.name == "media_drift" || m.name == "local_sine") j["gain"] = m.gain;
  if (m.name == "local_sine") j["strength"] = m.strength;
  if (m.name == "kuramoto") {
    j["shape"] = scalar_fn_to_json(m.kuramoto.shape);
    j["coupling"] = m.kuramoto.coupling;
    j["media_gain"] = m.kuramoto.media_gain;
    j["delay_base"] = m.kuramoto.delay_base;
    j["delay_slope"] = m.kuramoto.delay_slope;
  }
  if (m.name == "gl") {
    j["kernel"] = scalar_fn_to_json(m.gl.kernel);
    j["weight"] = scalar_fn_to_json(m.gl.weight);
    j["rate"] = scalar_fn_to_json(m.gl.rate);
    j["window"] = scalar_fn_to_json(m.gl.window);
  }
  j["diffusion"] = {{"base", m.diffusion.base}, {"slope", m.diffusion.slope}};
  j["init"] = init_to_json(m.init);
  j["media"] = media_to_json(m.media);
  if (m.f_sup) j["f_sup"] = *m.f_sup;
  if (m.f_sl) j["f_sl"] = *m.f_sl;
  j["audit"] = m.audit;
  j["drift_atoms"] = m.drift_atoms;
  return j;
}

TestFunctional parse_test(const json& j, const std::string& path, std::vector<std::string>& defaults) {
  Fields f(j, path, defaults);
  TestFunctional t;
  t.name = f.require<std::string>("name");
  const auto stat = f.get<std::string>("statistic", "terminal");
  if (stat == "terminal") {
    t.statistic = TestFunctional::Statistic::Terminal;
  } else if (stat == "time_average") {
    t.statistic = TestFunctional::Statistic::TimeAverage;
  } else if (stat == "running_max") {
    t.statistic = TestFunctional::Statistic::RunningMax;
  } else {
    schema(f.at("statistic"), "unknown statistic '" + stat + "'");
  }
  t.g = fn_field(f, "g", ScalarFn::sine(), defaults);
  if (!std::isfinite(t.bl_norm())) schema(f.at("g"), "test functional must be bounded Lipschitz");
  f.finish();
  return t;
}

const char* statistic_name(TestFunctional::Statistic s) {
  switch (s) {
    case TestFunctional::Statistic::Terminal: return "terminal";
    case TestFunctional::Statistic::TimeAverage: return "time_average";
    case TestFunctional::Statistic::RunningMax: return "running_max";
  }
  return "terminal";
}

AnalysisConfig parse_analysis(const json& j, std::vector<std::string>& defaults) {
  Fields f(j, "analysis", defaults);
  AnalysisConfig a;
  a.N_list = f.get("N_list", a.N_list);
  a.replicates = f.get("replicates", a.replicates);
  a.alphas = f.get("alphas", a.alphas);
  a.checkpoints = f.get("checkpoints", a.checkpoints);
  a.samples = f.get("samples", a.samples);
  a.pilot_size = f.get("pilot_size", a.pilot_size);
  a.simulate_mode = f.get("simulate_mode", a.simulate_mode);
  a.simulate_n = f.get("simulate_n", a.simulate_n);
  a.bl_size = f.get("bl_size", a.bl_size);
  a.dictionary_size = f.get("dictionary_size", a.dictionary_size);
  a.lp_dump = f.get("lp_dump", a.lp_dump);
  a.compare_model = f.get("compare_model", a.compare_model);
  a.residual_subsample = f.get("residual_subsample", a.residual_subsample);
  a.residual_repeats = f.get("residual_repeats", a.residual_repeats);
  if (f.has("tests")) {
    const json& tests = f.raw("tests");
    if (!tests.is_array()) schema("analysis.tests", "expected an array");
    for (std::size_t i = 0; i < tests.size(); ++i) {
      a.tests.push_back(parse_test(tests[i], "analysis.tests[" + std::to_string(i) + "]", defaults));
    }
  } else {
    defaults.push_back("analysis.tests");
    a.tests = default_test_functionals();
  }
  if (f.has("pde_phis")) {
    const json& phis = f.raw("pde_phis");
    if (!phis.is_array()) schema("analysis.pde_phis", "expected an array");
    a.pde_phis.clear();
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const std::string p = "analysis.pde_phis[" + std::to_string(i) + "]";
      a.pde_phis.push_back(scalar_fn_from_json(phis[i], p));
      if (!a.pde_phis.back().smooth_bounded()) schema(p, "PDE test functions must be bounded C^2");
    }
  } else {
    defaults.push_back("analysis.pde_phis");
  }
  a.pde_times = f.get("pde_times", a.pde_times);
  a.pde_bandwidth = f.optional<double>("pde_bandwidth");
  a.sigma = f.get("sigma", a.sigma);
  f.finish();

  if (a.simulate_mode != "coupled" && a.simulate_mode != "decoupled" && a.simulate_mode != "reference") {
    schema("analysis.simulate_mode", "expected coupled, decoupled or reference");
  }
  if (!a.compare_model.empty() && !kModelNames.count(a.compare_model)) {
    schema("analysis.compare_model", "unknown model '" + a.compare_model + "'");
  }
  if (a.replicates < 3) throw Error(ErrorCode::BoundsError, "analysis.replicates: must be at least 3");
  if (a.samples < 100) throw Error(ErrorCode::BoundsError, "analysis.samples: must be at least 100");
  if (a.N_list.empty() || !std::is_sorted(a.N_list.begin(), a.N_list.end()) || a.N_list.front() == 0) {
    throw Error(ErrorCode::BoundsError, "analysis.N_list: must be ascending and positive");
  }
  if (a.pde_bandwidth && !(*a.pde_bandwidth > 0.0)) {
    throw Error(ErrorCode::BoundsError, "analysis.pde_bandwidth: must be positive");
  }
  if (!(a.sigma > 0.0)) throw Error(ErrorCode::BoundsError, "analysis.sigma: must be positive");
  for (std::size_t v : {a.pilot_size, a.simulate_n, a.bl_size, a.dictionary_size, a.residual_subsample,
                        a.residual_repeats}) {
    if (v == 0) throw Error(ErrorCode::BoundsError, "analysis: counts must be positive");
  }
  return a;
}

json analysis_to_json(const AnalysisConfig& a) {
  json tests = json::array();
  for (const auto& t : a.tests) {
    tests.push_back({{"name", t.name}, {"statistic", statistic_name(t.statistic)}, {"g", scalar_fn_to_json(t.g)}});
  }
  json phis = json::array();
  for (const auto& p : a.pde_phis) phis.push_back(scalar_fn_to_json(p));
  json j{{"N_list", a.N_list},
         {"replicates", a.replicates},
         {"alphas", a.alphas},
         {"checkpoints", a.checkpoints},
         {"samples", a.samples},
         {"pilot_size", a.pilot_size},
         {"simulate_mode", a.simulate_mode},
         {"simulate_n", a.simulate_n},
         {"bl_size", a.bl_size},
         {"dictionary_size", a.dictionary_size},
         {"lp_dump", a.lp_dump},
         {"compare_model", a.compare_model},
         {"residual_subsample", a.residual_subsample},
         {"residual_repeats", a.residual_repeats},
         {"tests", tests},
         {"pde_phis", phis},
         {"pde_times", a.pde_times},
         {"sigma", a.sigma}};
  if (a.pde_bandwidth) j["pde_bandwidth"] = *a.pde_bandwidth;
  return j;
}

}  // namespace

std::vector<TestFunctional> default_test_functionals() {
  return {{"sin_terminal", TestFunctional::Statistic::Terminal, ScalarFn::sine()},
          {"clip_average", TestFunctional::Statistic::TimeAverage, ScalarFn::clip(-1.0, 1.0)},
          {"cos_max", TestFunctional::Statistic::RunningMax, ScalarFn::cosine()}};
}

json scalar_fn_to_json(const ScalarFn& f) {
  return {{"kind", f.kind_name()}, {"slope", f.slope}, {"offset", f.offset},
          {"scale", f.scale},      {"lo", f.lo},       {"hi", f.hi}};
}

ScalarFn scalar_fn_from_json(const json& j, const std::string& path) {
  std::vector<std::string> ignored;
  Fields f(j, path, ignored);
  const auto name = f.require<std::string>("kind");
  ScalarFn::Kind kind;
  try {
    kind = ScalarFn::parse_kind(name);
  } catch (const Error&) {
    schema(path + ".kind", "unknown function kind '" + name + "'");
  }
  ScalarFn out = default_for(kind);
  if (f.has("slope")) out.slope = Fields::convert<double>(f.raw("slope"), f.at("slope"));
  if (f.has("offset")) out.offset = Fields::convert<double>(f.raw("offset"), f.at("offset"));
  if (f.has("scale")) out.scale = Fields::convert<double>(f.raw("scale"), f.at("scale"));
  if (f.has("lo")) out.lo = Fields::convert<double>(f.raw("lo"), f.at("lo"));
  if (f.has("hi")) out.hi = Fields::convert<double>(f.raw("hi"), f.at("hi"));
  if (out.kind == ScalarFn::Kind::Clip && out.hi < out.lo) schema(path + ".hi", "must be >= lo");
  f.finish();
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("<document>: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  std::vector<std::string>& defaults = c.defaults_applied;
  Fields root(j, "", defaults);
  // A resolved config carries its defaulted fields; restore them instead of re-deriving.
  std::optional<std::vector<std::string>> carried;
  if (root.has("defaults_applied")) {
    const json& d = root.raw("defaults_applied");
    if (!d.is_array()) schema("defaults_applied", "expected an array of field paths");
    carried.emplace();
    for (std::size_t i = 0; i < d.size(); ++i) {
      carried->push_back(Fields::convert<std::string>(d[i], "defaults_applied[" + std::to_string(i) + "]"));
    }
  }
  if (!root.has("model")) schema("model", "required field missing");
  c.model = parse_model(root.raw("model"), defaults);
  if (root.has("grid")) {
    Fields g(root.raw("grid"), "grid", defaults);
    c.grid.tau = g.get("tau", c.grid.tau);
    c.grid.T = g.get("T", c.grid.T);
    c.grid.dt = g.get("dt", c.grid.dt);
    g.finish();
  } else {
    defaults.push_back("grid");
  }
  if (root.has("solver")) {
    Fields s(root.raw("solver"), "solver", defaults);
    c.solver.M = s.get("M", c.solver.M);
    c.solver.tol = s.get("tol", c.solver.tol);
    c.solver.max_iter = s.get("max_iter", c.solver.max_iter);
    c.solver.lp_subsample = s.get("lp_subsample", c.solver.lp_subsample);
    s.finish();
  } else {
    defaults.push_back("solver");
  }
  if (root.has("analysis")) {
    c.analysis = parse_analysis(root.raw("analysis"), defaults);
  } else {
    defaults.push_back("analysis");
    c.analysis.tests = default_test_functionals();
  }
  c.seed = root.get<std::uint64_t>("seed", 0);
  c.output_dir = root.get<std::string>("output_dir", c.output_dir);
  root.finish();
  if (carried) c.defaults_applied = *carried;

  if (!(c.grid.T > 0.0)) schema("grid.T", "must be positive");
  if (!(c.grid.dt > 0.0)) schema("grid.dt", "must be positive");
  if (c.grid.tau < 0.0) schema("grid.tau", "must be non-negative");
  try {
    make_time_grid(c.grid.tau, c.grid.T, c.grid.dt);
  } catch (const Error& e) {
    schema("grid.dt", std::string("does not divide the horizon (") + e.what() + ")");
  }
  if (!(c.solver.tol > 0.0)) throw Error(ErrorCode::BoundsError, "solver.tol: must be positive");
  if (c.solver.max_iter == 0) throw Error(ErrorCode::BoundsError, "solver.max_iter: must be at least 1");
  if (c.solver.M == 0) throw Error(ErrorCode::BoundsError, "solver.M: must be positive");
  // Surface model construction errors (delay ranges, h_*) at parse time.
  build_model(c);
  if (!c.analysis.compare_model.empty()) build_named_model(c.analysis.compare_model, c);
  return c;
}

json serialize_config(const ExperimentConfig& c) {
  return {{"model", model_to_json(c.model)},
          {"grid", {{"tau", c.grid.tau}, {"T", c.grid.T}, {"dt", c.grid.dt}}},
          {"solver",
           {{"M", c.solver.M}, {"tol", c.solver.tol}, {"max_iter", c.solver.max_iter},
            {"lp_subsample", c.solver.lp_subsample}}},
          {"analysis", analysis_to_json(c.analysis)},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"defaults_applied", c.defaults_applied}};
}

GridPtr build_grid(const ExperimentConfig& c) { return make_time_grid(c.grid.tau, c.grid.T, c.grid.dt); }

ModelSpec build_named_model(const std::string& name, const ExperimentConfig& c) {
  ModelCommon common{c.grid.tau, c.grid.T, c.model.diffusion, c.model.init, c.model.media};
  ModelSpec m;
  if (name == "zero") {
    m = make_zero_model(common);
  } else if (name == "constant") {
    m = make_constant_model(c.model.c, common);
  } else if (name == "media_drift") {
    m = make_media_drift_model(c.model.gain, common);
  } else if (name == "local_sine") {
    m = make_local_sine_model(c.model.strength, c.model.gain, common);
  } else if (name == "kuramoto") {
    m = make_kuramoto_model(c.model.kuramoto, common);
  } else if (name == "gl") {
    m = make_gl_model(c.model.gl, common);
  } else {
    schema("model.name", "unknown model '" + name + "'");
  }
  return m;
}

ModelSpec build_model(const ExperimentConfig& c) {
  ModelSpec m = build_named_model(c.model.name, c);
  if (c.model.f_sup) m.bounds.f_sup = *c.model.f_sup;
  if (c.model.f_sl) m.bounds.f_sl = *c.model.f_sl;
  m.audit = c.model.audit;
  m.drift_atoms = c.model.drift_atoms;
  return m;
}

}  // namespace mkv
