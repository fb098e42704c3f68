#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fhelm/config.hpp"
#include "fhelm/errors.hpp"
#include "fhelm/io.hpp"
#include "fhelm/runner.hpp"
#include "helpers.hpp"

using namespace fhelm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fhelm_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json minimal_resolvent() {
  return json::parse(R"({"experiment": "resolvent-apply",
    "grid": {"n": 3, "points_per_axis": 16, "box_length": 16},
    "physics": {"s": 1, "lambda": 1, "epsilon": 0.5}})");
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("number formatting round trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("CSV layout") {
  CsvTable t({"a", "b"});
  t.add({"1", "x"});
  CHECK(render_csv(t, "00ff") == "a,b\r\n1,x\r\n# config_hash=00ff\r\n");
  CHECK_THROWS(t.add({"only one"}));
}

TEST_CASE("snapshot round trip") {
  const fs::path dir = scratch("snap");
  const Grid g(3, 8, 5.0);
  const ComplexField f = fhelm::testing::random_field(g, 8);
  write_snapshot(dir / "field", f, "u", "abcd");
  const json meta = json::parse(slurp(dir / "field.json"));
  CHECK(meta.at("dtype") == "complex64");
  CHECK(meta.at("byte_order") == "little");
  CHECK(fs::file_size(dir / "field.bin") == g.size() * 8);
  const ComplexField back = read_snapshot(dir / "field");
  CHECK(back.grid() == g);
  CHECK(fhelm::testing::rel_diff(back, f) < 1e-7);
}

TEST_CASE("config parsing is strict") {
  json j = minimal_resolvent();
  CHECK_NOTHROW(RunConfig::from_json(j));
  j["physics"]["lamda"] = 2;
  try {
    RunConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("physics.lamda") != std::string::npos);
  }
  json k = minimal_resolvent();
  k["experiment"] = "nonsense";
  CHECK_THROWS_AS(RunConfig::from_json(k).validate(), ConfigError);
  CHECK(experiment_names().size() == 15);
}

TEST_CASE("config hash ignores the output block") {
  json a = minimal_resolvent(), b = minimal_resolvent();
  b["output"] = {{"dir", "/elsewhere"}};
  CHECK(RunConfig::from_json(a).hash() == RunConfig::from_json(b).hash());
  b["physics"]["lambda"] = 2;
  CHECK(RunConfig::from_json(a).hash() != RunConfig::from_json(b).hash());
  CHECK(RunConfig::from_json(a).hash().size() == 16);
  const RunConfig c = RunConfig::from_json(a);
  CHECK(RunConfig::from_json(c.to_json()).hash() == c.hash());
}

TEST_CASE("runner smoke contract") {
  const fs::path dir = scratch("run");
  RunOptions opts;
  opts.out_dir = dir;
  const RunOutcome out = run(RunConfig::from_json(minimal_resolvent()), opts);
  CHECK(out.exit_code == 0);
  CHECK(fs::exists(dir / "resolvent-apply.csv"));
  const json summary = json::parse(slurp(dir / "resolvent-apply.json"));
  CHECK(summary.at("experiment") == "resolvent-apply");
  const std::string csv = slurp(dir / "resolvent-apply.csv");
  CHECK(csv.find("# config_hash=" + summary.at("config_hash").get<std::string>()) != std::string::npos);
}

TEST_CASE("runner maps the weak regime to exit 2") {
  const fs::path dir = scratch("weak");
  const json j = json::parse(R"({"experiment": "opnorm-sweep",
    "grid": {"n": 3, "points_per_axis": 16, "box_length": 40},
    "physics": {"s": 0.7, "lambda": 1, "epsilons": [0.2, 0.1]},
    "exponents": {"p": 1.2, "q": 1.5}})");
  RunOptions opts;
  opts.out_dir = dir;
  const RunOutcome out = run(RunConfig::from_json(j), opts);
  CHECK(out.exit_code == 2);
  CHECK(out.message.find("s ≥ n/(n+1)") != std::string::npos);
}
