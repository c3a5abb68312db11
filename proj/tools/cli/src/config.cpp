#include "hetnet_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hetnet::cli {
namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Reads the members of one JSON object and reports any it did not consume.
class Section {
 public:
  Section(const Json& doc, std::string path) : path_(std::move(path)) {
    if (doc.is_null()) return;
    if (!doc.is_object()) throw ConfigError(path_, "must be an object");
    node_ = &doc;
  }
  Section(const Json& parent, const std::string& parent_path, const std::string& key)
      : Section(member(parent, key), join(parent_path, key)) {}

  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return node_->at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    throw ConfigError(path(key), "must be an integer");
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
    throw ConfigError(path(key), "must be a non-negative integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "must be a string");
    return v.get<std::string>();
  }

  // Exactly one of `linear` or `db` may be given.
  double linear_or_db(const std::string& linear, const std::string& db, double fallback) {
    if (has(linear) && has(db))
      throw ConfigError(path(db), "conflicts with " + path(linear) + "; give one of them");
    if (has(db)) return db_to_linear(number(db, 0.0));
    return number(linear, fallback);
  }

  void finish() const {
    if (!node_) return;
    for (const auto& item : node_->items())
      if (!used_.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
  }

 private:
  static const Json& member(const Json& parent, const std::string& key) {
    static const Json null_json;
    if (parent.is_object() && parent.contains(key)) return parent.at(key);
    return null_json;
  }

  const Json* node_ = nullptr;
  std::string path_;
  std::set<std::string> used_;
};

TierParams parse_tier(const Json& doc, const std::string& parent, const std::string& key,
                      TierParams tier, bool power_fixed) {
  Section s(doc, parent, key);
  tier.density = s.number("density", tier.density);
  tier.pathloss = s.number("pathloss", tier.pathloss);
  if (power_fixed && (s.has("power") || s.has("power_db")))
    throw ConfigError(s.path(s.has("power") ? "power" : "power_db"),
                      "conflicts with network.power_ratio_db");
  tier.power = s.linear_or_db("power", "power_db", tier.power);
  const long long n = s.integer("antennas", tier.antennas);
  if (n < 1 || n > 1024) throw ConfigError(s.path("antennas"), "must lie in [1, 1024]");
  tier.antennas = static_cast<int>(n);
  s.finish();
  return tier;
}

const Json& child(const Json& parent, const std::string& key) {
  static const Json null_json;
  return parent.is_object() && parent.contains(key) ? parent.at(key) : null_json;
}

NetworkConfig parse_network(const Json& doc) {
  const Json& net = child(doc, "network");
  Section s(net, "network");
  NetworkConfig cfg;
  cfg.macro.power = 10.0;
  const bool ratio_given = s.has("power_ratio_db");
  if (ratio_given) cfg.macro.power = db_to_linear(s.number("power_ratio_db", 0.0));
  if (s.has("macro")) s.raw("macro");
  if (s.has("pico")) s.raw("pico");
  cfg.macro = parse_tier(net, "network", "macro", cfg.macro, ratio_given);
  cfg.pico = parse_tier(net, "network", "pico", cfg.pico, ratio_given);
  cfg.user_density = s.number("user_density", cfg.user_density);
  cfg.bias = s.linear_or_db("bias", "bias_db", cfg.bias);
  cfg.bandwidth = s.number("bandwidth", cfg.bandwidth);
  const long long u = s.integer("in_dof", cfg.in_dof);
  if (u < 0 || u > 1024) throw ConfigError("network.in_dof", "must lie in [0, macro.antennas - 1]");
  cfg.in_dof = static_cast<int>(u);
  cfg.load_shape = s.number("load_shape", cfg.load_shape);
  cfg.mean_load_factor = s.number("mean_load_factor", cfg.mean_load_factor);
  s.finish();
  validate(cfg);
  return cfg;
}

std::vector<double> positive_grid(const Json& parent, const std::string& parent_path,
                                  const std::string& key) {
  std::vector<double> g = expand_grid(parent.at(key), join(parent_path, key));
  for (double x : g)
    if (!(x > 0.0)) throw ConfigError(join(parent_path, key), "values must be > 0");
  return g;
}

LoadModel parse_load_model(const Json& v, const std::string& path) {
  if (v == "exact") return LoadModel::Exact;
  if (v == "mla" || v == "mean-load") return LoadModel::MeanLoad;
  throw ConfigError(path, "expected \"exact\" or \"mla\"");
}

Engine parse_engine(const std::string& v, const std::string& path) {
  for (Engine e : {Engine::AnalyticMla, Engine::AnalyticExact, Engine::MonteCarlo})
    if (v == to_string(e)) return e;
  throw ConfigError(path, "expected analytic-mla, analytic-exact or monte-carlo");
}

SweepScheme parse_sweep_scheme(const Json& v, const std::string& path) {
  for (SweepScheme s : kSweepSchemes)
    if (v.is_string() && v.get<std::string>() == to_string(s)) return s;
  throw ConfigError(path, "expected \"in\", \"u0\" or \"abs\"");
}

Fidelity parse_fidelity(const std::string& v, const std::string& path) {
  if (v == "fast") return Fidelity::Fast;
  if (v == "full") return Fidelity::Full;
  throw ConfigError(path, "expected \"fast\" or \"full\"");
}

unsigned parse_threads(Section& s) {
  const long long t = s.integer("threads", 1);
  if (t < 1 || t > 256) throw ConfigError(s.path("threads"), "must lie in [1, 256]");
  return static_cast<unsigned>(t);
}

Json grid_json(const std::vector<double>& v) { return Json(v); }

Json resolved_json(const ExperimentConfig& c) {
  const auto tier = [](const TierParams& t) {
    return Json{{"density", t.density},
                {"pathloss", t.pathloss},
                {"power", t.power},
                {"antennas", t.antennas}};
  };
  const NetworkConfig& n = c.network;
  Json models = Json::array();
  for (LoadModel m : c.analysis.load_models) models.push_back(to_string(m));
  Json schemes = Json::array();
  for (SweepScheme s : c.sweep.schemes) schemes.push_back(to_string(s));
  const SimulationOptions& so = c.simulation.options;
  const AnalyticsOptions& ao = c.analysis.numerics;
  return Json{
      {"network",
       {{"macro", tier(n.macro)},
        {"pico", tier(n.pico)},
        {"user_density", n.user_density},
        {"bias", n.bias},
        {"bandwidth", n.bandwidth},
        {"in_dof", n.in_dof},
        {"load_shape", n.load_shape},
        {"mean_load_factor", n.mean_load_factor}}},
      {"analysis",
       {{"tau", grid_json(c.analysis.tau)},
        {"in_dof", c.analysis.in_dof},
        {"load_models", models},
        {"threads", c.analysis.threads},
        {"numerics",
         {{"coverage_abs_tol", ao.coverage_abs_tol},
          {"relative_tol", ao.relative_tol},
          {"term_abs_floor", ao.term_abs_floor},
          {"outage_abs_tol", ao.outage_abs_tol},
          {"load_tail", ao.load_tail},
          {"n_max", ao.n_max},
          {"max_intervals", ao.max_intervals}}}}},
      {"simulation",
       {{"trials", so.trials},
        {"seed", so.seed},
        {"fidelity", to_string(so.fidelity)},
        {"threads", so.threads},
        {"window_radius", so.window_radius},
        {"user_disc_factor", so.user_disc_factor},
        {"scheme", c.simulation.scheme.variant == SchemeSpec::Variant::IN ? "in" : "abs"},
        {"in_dof", c.simulation.scheme.in_dof},
        {"abs_fraction", c.simulation.scheme.abs_fraction},
        {"dump_realizations", c.simulation.dump_realizations}}},
      {"sweep", {{"tau", c.sweep.tau}, {"bias_db", grid_json(c.sweep.bias_db)}, {"schemes", schemes}}},
      {"optimize",
       {{"engine", to_string(c.optimize.engine)}, {"abs_iterations", c.optimize.abs_iterations}}},
      {"validate", {{"tau", grid_json(c.validate.tau)}, {"tolerance", c.validate.tolerance}}},
      {"output", {{"dir", c.out_dir}}}};
}

}  // namespace

std::string_view to_string(LoadModel m) { return m == LoadModel::Exact ? "exact" : "mla"; }

std::vector<double> expand_grid(const Json& node, const std::string& key) {
  std::vector<double> out;
  if (node.is_number()) {
    out.push_back(node.get<double>());
  } else if (node.is_array()) {
    for (const Json& v : node) {
      if (!v.is_number()) throw ConfigError(key, "grid entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else if (node.is_object()) {
    Section s(node, key);
    if (!s.has("start") || !s.has("stop") || !s.has("count"))
      throw ConfigError(key, "range needs start, stop and count");
    const double start = s.number("start", 0.0);
    const double stop = s.number("stop", 0.0);
    const long long count = s.integer("count", 0);
    const std::string spacing = s.text("spacing", "linear");
    s.finish();
    if (count < 1 || count > 100000) throw ConfigError(key + ".count", "must lie in [1, 100000]");
    if (spacing != "linear" && spacing != "log")
      throw ConfigError(key + ".spacing", "expected \"linear\" or \"log\"");
    if (spacing == "log" && !(start > 0.0 && stop > 0.0))
      throw ConfigError(key, "log spacing needs positive start and stop");
    for (long long i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(spacing == "log"
                        ? std::pow(10.0, std::log10(start) + f * (std::log10(stop) - std::log10(start)))
                        : start + f * (stop - start));
    }
    out.front() = start;
    if (count > 1) out.back() = stop;
  } else {
    throw ConfigError(key, "expected a number, an array or a {start, stop, count} range");
  }
  if (out.empty()) throw ConfigError(key, "grid must not be empty");
  for (double x : out)
    if (!std::isfinite(x)) throw ConfigError(key, "grid values must be finite");
  return out;
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("--set", "expected key=value, got \"" + std::string(assignment) + "\"");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component in override");
    if (node->is_null()) *node = Json::object();
    if (!node->is_object()) throw ConfigError(key, "cannot override inside a non-object value");
    if (dot == std::string::npos) {
      // Setting one spelling of a dB/linear pair replaces the other.
      for (const auto& [a, b] : {std::pair{"bias", "bias_db"}, std::pair{"power", "power_db"}}) {
        if (part == a) node->erase(b);
        if (part == b) node->erase(a);
      }
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", path + ": " + e.what());
  }
}

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
  ExperimentConfig c;
  c.input = doc;
  Section top(doc, "");
  for (const char* key : {"network", "analysis", "simulation", "sweep", "optimize", "validate",
                          "output"})
    if (top.has(key)) top.raw(key);
  top.finish();

  c.network = parse_network(doc);

  {
    Section s(doc, "", "analysis");
    if (s.has("tau")) {
      s.raw("tau");
      c.analysis.tau = positive_grid(doc.at("analysis"), "analysis", "tau");
    }
    if (s.has("in_dof")) {
      const Json& v = s.raw("in_dof");
      const Json list = v.is_array() ? v : Json::array({v});
      for (const Json& u : list) {
        if (!u.is_number_integer()) throw ConfigError("analysis.in_dof", "entries must be integers");
        const int U = u.get<int>();
        if (U < 0 || U > c.network.macro.antennas - 1)
          throw ConfigError("analysis.in_dof", "entries must lie in [0, macro.antennas - 1]");
        c.analysis.in_dof.push_back(U);
      }
    }
    if (s.has("load_models")) {
      const Json& v = s.raw("load_models");
      const Json list = v.is_array() ? v : Json::array({v});
      if (list.empty()) throw ConfigError("analysis.load_models", "must not be empty");
      c.analysis.load_models.clear();
      for (const Json& m : list) c.analysis.load_models.push_back(parse_load_model(m, "analysis.load_models"));
    }
    c.analysis.threads = parse_threads(s);
    if (s.has("numerics")) s.raw("numerics");
    s.finish();

    Section n(child(doc, "analysis"), "analysis", "numerics");
    AnalyticsOptions& o = c.analysis.numerics;
    o.coverage_abs_tol = n.number("coverage_abs_tol", o.coverage_abs_tol);
    o.relative_tol = n.number("relative_tol", o.relative_tol);
    o.term_abs_floor = n.number("term_abs_floor", o.term_abs_floor);
    o.outage_abs_tol = n.number("outage_abs_tol", o.outage_abs_tol);
    o.load_tail = n.number("load_tail", o.load_tail);
    o.n_max = static_cast<int>(n.integer("n_max", o.n_max));
    o.max_intervals = static_cast<int>(n.integer("max_intervals", o.max_intervals));
    n.finish();
    for (const auto& [name, v] : {std::pair{"coverage_abs_tol", o.coverage_abs_tol},
                                  std::pair{"relative_tol", o.relative_tol},
                                  std::pair{"outage_abs_tol", o.outage_abs_tol},
                                  std::pair{"load_tail", o.load_tail}})
      if (!(v > 0.0 && v < 1.0))
        throw ConfigError(std::string("analysis.numerics.") + name, "must lie in (0, 1)");
    if (!(o.term_abs_floor >= 0.0)) throw ConfigError("analysis.numerics.term_abs_floor", "must be >= 0");
    if (o.n_max < 1) throw ConfigError("analysis.numerics.n_max", "must be >= 1");
    if (o.max_intervals < 1) throw ConfigError("analysis.numerics.max_intervals", "must be >= 1");
  }

  {
    Section s(doc, "", "simulation");
    SimulationOptions& o = c.simulation.options;
    const long long trials = s.integer("trials", o.trials);
    if (trials < 1) throw ConfigError("simulation.trials", "must be >= 1");
    o.trials = trials;
    o.seed = s.unsigned_integer("seed", o.seed);
    o.fidelity = parse_fidelity(s.text("fidelity", "fast"), "simulation.fidelity");
    o.threads = parse_threads(s);
    o.window_radius = s.number("window_radius", o.window_radius);
    if (!(o.window_radius >= 0.0)) throw ConfigError("simulation.window_radius", "must be >= 0");
    o.user_disc_factor = s.number("user_disc_factor", o.user_disc_factor);
    if (!(o.user_disc_factor > 0.0)) throw ConfigError("simulation.user_disc_factor", "must be > 0");
    const std::string scheme = s.text("scheme", "in");
    const long long U = s.integer("in_dof", c.network.in_dof);
    if (U < 0 || U > c.network.macro.antennas - 1)
      throw ConfigError("simulation.in_dof", "must lie in [0, macro.antennas - 1]");
    const double eta = s.number("abs_fraction", 0.5);
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("simulation.abs_fraction", "must lie in (0, 1)");
    if (scheme == "in")
      c.simulation.scheme = SchemeSpec::in(static_cast<int>(U));
    else if (scheme == "abs")
      c.simulation.scheme = SchemeSpec::abs(eta);
    else
      throw ConfigError("simulation.scheme", "expected \"in\" or \"abs\"");
    c.simulation.dump_realizations = s.boolean("dump_realizations", false);
    s.finish();
  }

  {
    Section s(doc, "", "sweep");
    c.sweep.tau = s.number("tau", 5e5);
    if (!(c.sweep.tau > 0.0)) throw ConfigError("sweep.tau", "must be > 0");
    if (s.has("bias_db")) {
      s.raw("bias_db");
      c.sweep.bias_db = expand_grid(doc.at("sweep").at("bias_db"), "sweep.bias_db");
      for (double b : c.sweep.bias_db)
        if (!(b >= 0.0)) throw ConfigError("sweep.bias_db", "values must be >= 0 dB");
    }
    if (s.has("schemes")) {
      const Json& v = s.raw("schemes");
      if (!v.is_array() || v.empty()) throw ConfigError("sweep.schemes", "must be a non-empty array");
      c.sweep.schemes.clear();
      for (const Json& x : v) c.sweep.schemes.push_back(parse_sweep_scheme(x, "sweep.schemes"));
    }
    s.finish();
  }

  {
    Section s(doc, "", "optimize");
    c.optimize.engine = parse_engine(s.text("engine", std::string(to_string(c.optimize.engine))),
                                     "optimize.engine");
    const long long it = s.integer("abs_iterations", 0);
    if (it < 0 || it > 200) throw ConfigError("optimize.abs_iterations", "must lie in [0, 200]");
    c.optimize.abs_iterations = static_cast<int>(it);
    s.finish();
  }

  {
    Section s(doc, "", "validate");
    if (s.has("tau")) {
      s.raw("tau");
      c.validate.tau = positive_grid(doc.at("validate"), "validate", "tau");
    }
    c.validate.tolerance = s.number("tolerance", c.validate.tolerance);
    if (!(c.validate.tolerance > 0.0)) throw ConfigError("validate.tolerance", "must be > 0");
    s.finish();
  }

  {
    Section s(doc, "", "output");
    c.out_dir = s.text("dir", c.out_dir);
    if (c.out_dir.empty()) throw ConfigError("output.dir", "must not be empty");
    s.finish();
  }

  c.resolved = resolved_json(c);
  return c;
}

}  // namespace hetnet::cli
