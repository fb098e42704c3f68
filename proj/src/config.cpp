#include "fhelm/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fhelm/errors.hpp"
#include "fhelm/io.hpp"

namespace fhelm {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "resolvent-apply", "kernel-table", "split-kernel",  "admissible",     "q-window",
      "tau",             "opnorm-sweep", "local-l2",      "weighted-check", "radiation",
      "herglotz",        "solve-complex", "solve-lipschitz", "branch",      "mountain-pass"};
  return names;
}

void ParamReader::finish(const std::string& experiment) const {
  for (auto it = params_.begin(); it != params_.end(); ++it)
    if (!used_.count(it.key()))
      throw ConfigError("params." + it.key() + ": unknown key for experiment " + experiment);
}

void ParamReader::throw_type(const std::string& key) const {
  throw ConfigError("params." + key + ": wrong type");
}

namespace {

// Reads the keys of one block; anything left over is an error.
class Block {
 public:
  Block(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    obj_ = &root.at(name);
    if (!obj_->is_object()) throw ConfigError(name + ": expected an object");
  }
  template <class T>
  void read(const std::string& key, T& target) {
    used_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    try {
      target = obj_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
  }
  template <class T>
  void read(const std::string& key, std::optional<T>& target) {
    used_.insert(key);
    if (!obj_ || !obj_->contains(key) || obj_->at(key).is_null()) return;
    try {
      target = obj_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
  }
  void finish() const {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(name_ + "." + it.key() + ": unknown key");
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> used_;
};

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> top{"experiment", "grid",   "physics", "exponents",
                                         "weight",     "solver", "output",  "params"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!top.count(it.key())) throw ConfigError(it.key() + ": unknown key");
  RunConfig c;
  if (j.contains("experiment")) {
    if (!j.at("experiment").is_string()) throw ConfigError("experiment: wrong type");
    c.experiment = j.at("experiment").get<std::string>();
  }
  {
    Block b(j, "grid");
    b.read("n", c.grid.n);
    b.read("points_per_axis", c.grid.points_per_axis);
    b.read("box_length", c.grid.box_length);
    b.finish();
  }
  {
    Block b(j, "physics");
    b.read("s", c.physics.s);
    b.read("lambda", c.physics.lambda);
    b.read("epsilon", c.physics.epsilon);
    b.read("eps_sequence", c.physics.eps_sequence);
    b.read("lambdas", c.physics.lambdas);
    b.read("epsilons", c.physics.epsilons);
    b.read("eps_relative", c.physics.eps_relative);
    b.read("negative_regime", c.physics.negative_regime);
    b.read("enforce_decay", c.physics.enforce_decay);
    b.finish();
  }
  {
    Block b(j, "exponents");
    b.read("p", c.exponents.p);
    b.read("q", c.exponents.q);
    b.read("t", c.exponents.t);
    b.read("alpha", c.exponents.alpha);
    b.read("continuous_tau", c.exponents.continuous_tau);
    b.finish();
  }
  {
    Block b(j, "weight");
    std::string kind = to_string(c.weight.kind);
    b.read("kind", kind);
    c.weight.kind = parse_weight_kind(kind);
    b.read("amplitude", c.weight.amplitude);
    b.read("radius", c.weight.radius);
    b.read("decay", c.weight.decay);
    b.read("cells", c.weight.cells);
    b.finish();
  }
  {
    Block b(j, "solver");
    b.read("max_iter", c.solver.max_iter);
    b.read("tol", c.solver.tol);
    b.read("damping", c.solver.damping);
    b.read("seed", c.solver.seed);
    b.finish();
  }
  {
    Block b(j, "output");
    b.read("dir", c.output.dir);
    b.read("snapshots", c.output.snapshots);
    b.finish();
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("params: expected an object");
    c.params = j.at("params");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(f, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  return json{
      {"experiment", experiment},
      {"grid", {{"n", grid.n}, {"points_per_axis", grid.points_per_axis}, {"box_length", grid.box_length}}},
      {"physics",
       {{"s", physics.s},
        {"lambda", physics.lambda},
        {"epsilon", physics.epsilon},
        {"eps_sequence", physics.eps_sequence},
        {"lambdas", physics.lambdas},
        {"epsilons", physics.epsilons},
        {"eps_relative", physics.eps_relative},
        {"negative_regime", physics.negative_regime},
        {"enforce_decay", physics.enforce_decay}}},
      {"exponents",
       {{"p", opt(exponents.p)},
        {"q", opt(exponents.q)},
        {"t", opt(exponents.t)},
        {"alpha", exponents.alpha},
        {"continuous_tau", exponents.continuous_tau}}},
      {"weight",
       {{"kind", to_string(weight.kind)},
        {"amplitude", weight.amplitude},
        {"radius", weight.radius},
        {"decay", weight.decay},
        {"cells", weight.cells}}},
      {"solver",
       {{"max_iter", solver.max_iter}, {"tol", solver.tol}, {"damping", solver.damping}, {"seed", solver.seed}}},
      {"output", {{"dir", output.dir}, {"snapshots", output.snapshots}}},
      {"params", params}};
}

std::string RunConfig::hash() const {
  json j = to_json();
  // The output location does not change results.
  j.erase("output");
  return hex64(fnv1a64(j.dump()));
}

void RunConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("unknown experiment '" + experiment + "'");
  if (grid.n < 1 || grid.n > kMaxDim) throw ConfigError("grid.n must lie in [1, 8]");
  if (grid.points_per_axis < 4) throw ConfigError("grid.points_per_axis must be >= 4");
  if (!(grid.box_length > 0.0)) throw ConfigError("grid.box_length must be positive");
  if (!(physics.lambda > 0.0)) throw ConfigError("physics.lambda > 0 violated");
  if (!(physics.s > 0.0)) throw ConfigError("physics.s > 0 violated");
  if (solver.max_iter < 1) throw ConfigError("solver.max_iter >= 1 violated");
  if (!(solver.tol > 0.0)) throw ConfigError("solver.tol > 0 violated");
  if (!(solver.damping > 0.0 && solver.damping <= 1.0)) throw ConfigError("0 < solver.damping <= 1 violated");
}

std::vector<TestFamily> parse_families(const json& j, std::uint64_t default_seed) {
  if (!j.is_array() || j.empty()) throw ConfigError("params.families: expected a non-empty array");
  std::vector<TestFamily> out;
  for (const auto& e : j) {
    if (!e.is_object()) throw ConfigError("params.families: entries must be objects");
    TestFamily f;
    f.seed = default_seed;
    static const std::set<std::string> keys{"kind", "count", "seed", "sigma0", "scales", "annulus_halfwidth"};
    for (auto it = e.begin(); it != e.end(); ++it)
      if (!keys.count(it.key())) throw ConfigError("params.families." + it.key() + ": unknown key");
    try {
      if (e.contains("kind")) f.kind = parse_family_kind(e.at("kind").get<std::string>());
      f.count = e.value("count", f.count);
      f.seed = e.value("seed", f.seed);
      f.sigma0 = e.value("sigma0", f.sigma0);
      f.annulus_halfwidth = e.value("annulus_halfwidth", f.annulus_halfwidth);
      if (e.contains("scales")) f.scales = e.at("scales").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError("params.families: wrong type in an entry");
    }
    if (f.count < 1) throw ConfigError("params.families.count >= 1 violated");
    out.push_back(std::move(f));
  }
  return out;
}

json families_to_json(const std::vector<TestFamily>& families) {
  json a = json::array();
  for (const auto& f : families)
    a.push_back({{"kind", to_string(f.kind)}, {"count", f.count}, {"seed", f.seed}, {"sigma0", f.sigma0}});
  return a;
}

}  // namespace fhelm
