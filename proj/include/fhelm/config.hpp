#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhelm/dual.hpp"
#include "fhelm/families.hpp"

namespace fhelm {

const std::vector<std::string>& experiment_names();

struct GridBlock {
  int n = 3;
  int points_per_axis = 32;
  double box_length = 16.0;
};

struct PhysicsBlock {
  double s = 1.0;
  double lambda = 1.0;
  double epsilon = 0.1;  // <= 0 selects eps_floor where supported
  std::vector<double> eps_sequence;
  std::vector<double> lambdas;
  std::vector<double> epsilons;
  bool eps_relative = false;
  bool negative_regime = false;
  bool enforce_decay = true;
};

struct ExponentsBlock {
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> t;
  double alpha = 3.0;
  bool continuous_tau = false;
};

struct SolverBlock {
  int max_iter = 200;
  double tol = 1e-10;
  double damping = 1.0;
  std::uint64_t seed = 1;
};

struct OutputBlock {
  std::string dir = ".";
  bool snapshots = false;
};

/// Reads an experiment's free-form "params" object and rejects keys that were
/// never asked for.
class ParamReader {
 public:
  explicit ParamReader(const nlohmann::json& params) : params_(params) {}

  template <class T>
  T get(const std::string& key, const T& fallback) {
    used_.insert(key);
    if (!params_.contains(key)) return fallback;
    try {
      return params_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw_type(key);
    }
  }
  bool has(const std::string& key) const { return params_.contains(key); }
  const nlohmann::json& raw(const std::string& key) {
    used_.insert(key);
    return params_.at(key);
  }
  void finish(const std::string& experiment) const;

 private:
  [[noreturn]] void throw_type(const std::string& key) const;
  const nlohmann::json& params_;
  std::set<std::string> used_;
};

struct RunConfig {
  std::string experiment;
  GridBlock grid;
  PhysicsBlock physics;
  ExponentsBlock exponents;
  WeightSpec weight;
  SolverBlock solver;
  OutputBlock output;
  nlohmann::json params = nlohmann::json::object();

  // Strict parse: unknown keys and wrong types name the offending key.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // FNV-1a of the canonical resolved config, 16 hex digits.
  std::string hash() const;
  // Structural checks shared by every experiment.
  void validate() const;
};

// Test families from a JSON array of {kind, count, seed, sigma0, scales, annulus_halfwidth}.
std::vector<TestFamily> parse_families(const nlohmann::json& j, std::uint64_t default_seed);
nlohmann::json families_to_json(const std::vector<TestFamily>& families);

}  // namespace fhelm
