#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "mkv/config.hpp"
#include "mkv/error.hpp"
#include "mkv/harness.hpp"
#include "mkv/io.hpp"
#include "mkv/simulate.hpp"

using namespace mkv;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"model": {"name": "constant", "c": 0.5}, "grid": {"T": 1.0, "dt": 0.05}, "seed": 4})";

Error error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorCode::Internal, "no error");
}

ExperimentConfig small_config(const std::string& out, std::uint64_t seed = 4) {
  auto c = parse_config(kMinimal);
  c.seed = seed;
  c.output_dir = out;
  c.analysis.simulate_n = 50;
  c.solver.M = 60;
  c.solver.lp_subsample = 30;
  return c;
}

}  // namespace

TEST_CASE("defaults are filled and recorded") {
  const auto c = parse_config(kMinimal);
  CHECK(c.grid.tau == 0.0);
  CHECK(c.solver.M == 1000);
  CHECK(c.solver.tol == 0.02);
  CHECK(c.analysis.N_list == std::vector<std::size_t>{250, 500, 1000, 2000});
  CHECK(c.analysis.tests.size() == 3);
  CHECK(c.output_dir == "out");
  const auto& d = c.defaults_applied;
  CHECK(std::find(d.begin(), d.end(), "grid.tau") != d.end());
  CHECK(std::find(d.begin(), d.end(), "solver") != d.end());
  CHECK(std::find(d.begin(), d.end(), "grid.dt") == d.end());
}

TEST_CASE("resolved config round trips") {
  for (const char* text : {kMinimal,
                           R"({"model": {"name": "kuramoto", "coupling": 0.5, "delay_base": 0.1,
                               "init": {"law": "brownian", "start": 0.0, "sigma": 0.5},
                               "media": {"law": "discrete", "atoms": [[-0.5], [0.5]]}},
                               "grid": {"tau": 0.2, "T": 1.0, "dt": 0.01}, "seed": 9,
                               "analysis": {"pde_bandwidth": 0.3}})"}) {
    const auto c = parse_config(std::string(text));
    const auto again = parse_config(serialize_config(c));
    CHECK(again == c);
    CHECK(serialize_config(again) == serialize_config(c));
  }
}

TEST_CASE("schema errors name the field") {
  const auto dt = error_of(R"({"model": {"name": "zero"}, "grid": {"T": 1.0, "dt": 0.3}})");
  CHECK(dt.code() == ErrorCode::SchemaError);
  CHECK(dt.detail().rfind("grid.dt", 0) == 0);
  const auto seed = error_of(R"({"model": {"name": "zero"}, "seed": -3})");
  CHECK(seed.code() == ErrorCode::SchemaError);
  CHECK(seed.detail().rfind("seed", 0) == 0);
  const auto unknown = error_of(R"({"model": {"name": "zero", "colour": 1}})");
  CHECK(unknown.code() == ErrorCode::SchemaError);
  CHECK(unknown.detail().find("model.colour") != std::string::npos);
  CHECK(error_of(R"({"model": {"name": "nope"}})").code() == ErrorCode::SchemaError);
  CHECK(error_of(R"({"grid": {"T": 1.0}})").code() == ErrorCode::SchemaError);
  CHECK(error_of(R"({"model": {"name": "zero"}, "solver": {"M": "many"}})").code() == ErrorCode::SchemaError);
  CHECK(error_of("{not json").code() == ErrorCode::SchemaError);
}

TEST_CASE("bounds errors") {
  CHECK(error_of(R"({"model": {"name": "zero"}, "solver": {"tol": 0}})").code() == ErrorCode::BoundsError);
  CHECK(error_of(R"({"model": {"name": "zero"}, "analysis": {"replicates": 2}})").code() == ErrorCode::BoundsError);
  CHECK(error_of(R"({"model": {"name": "zero", "f_sl": -1}})").code() == ErrorCode::BoundsError);
}

TEST_CASE("declared overrides reach the model") {
  const auto c = parse_config(std::string(R"({"model": {"name": "constant", "c": 0.5, "f_sup": 2.0, "f_sl": 0.25}})"));
  const auto m = build_model(c);
  CHECK(m.bounds.f_sup == 2.0);
  CHECK(m.bounds.f_sl == 0.25);
  CHECK(build_grid(c)->future_steps() == 100);
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("doubles print at round-trip precision") {
  testing::Gen gen(1);
  for (int i = 0; i < 200; ++i) {
    const double v = gen.normal() * std::pow(10.0, gen.uniform(-20, 20));
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("cloud csv and binary round trip exactly") {
  const auto g = make_time_grid(0.2, 1.0, 0.05);
  testing::Gen gen(2);
  const auto c = testing::random_cloud(g, 7, gen);
  std::stringstream csv;
  write_cloud_csv(csv, c);
  CHECK(read_cloud_csv(csv, g) == c);
  std::stringstream bin;
  write_cloud_binary(bin, c);
  CHECK(read_cloud_binary(bin, g) == c);
  const auto sidecar_grid = grid_from_sidecar(cloud_sidecar(c));
  CHECK(sidecar_grid->same_as(*g));
  std::stringstream bad("garbage");
  CHECK_THROWS_AS(read_cloud_binary(bad, g), Error);
}

TEST_CASE("artifact writer hashes non-volatile files") {
  const fs::path dir = fs::path("harness_out") / "writer";
  fs::remove_all(dir);
  ArtifactWriter w(dir);
  w.write_text("a.txt", "abc");
  w.write_text("t.txt", "12.5s", true);
  const auto m = w.write_manifest();
  REQUIRE(m["files"].size() == 1);
  CHECK(m["files"][0]["sha256"] == sha256_hex("abc"));
  CHECK(m["files"][0]["bytes"] == 3);
  CHECK(m["volatile"][0] == "t.txt");
  CHECK(sha256_file(dir / "a.txt") == sha256_hex("abc"));
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("subcommand list") {
  const auto& s = subcommands();
  CHECK(s.size() == 9);
  for (const char* name : {"simulate", "solve-mkv", "residual", "rate", "lln", "pde-check", "bl-dist", "girsanov-check",
                           "accept"}) {
    CHECK(std::find(s.begin(), s.end(), name) != s.end());
  }
}

TEST_CASE("same config produces identical manifests") {
  const auto a = run_experiment("simulate", small_config("harness_out/sim_a"));
  const auto first = a.manifest;
  const auto b = run_experiment("simulate", small_config("harness_out/sim_a"));
  CHECK(same_manifest(first, b.manifest));
  CHECK(first["files"] == b.manifest["files"]);
  const auto c = run_experiment("simulate", small_config("harness_out/sim_c", 5));
  CHECK_FALSE(same_manifest(a.manifest, c.manifest));
  CHECK(fs::exists(a.dir / "resolved_config.json"));
  std::ifstream in(a.dir / "resolved_config.json");
  std::stringstream text;
  text << in.rdbuf();
  CHECK(parse_config(text.str()) == small_config("harness_out/sim_a"));
  const auto loaded = load_cloud(a.dir, "cloud");
  CHECK(loaded.size() == 50);
}

TEST_CASE("solve-mkv on a measure-free model reports one iteration") {
  const auto r = run_experiment("solve-mkv", small_config("harness_out/solve"));
  CHECK(r.ok);
  CHECK(r.summary["solver"]["iterations"] == 1);
  CHECK(r.summary["solver"]["converged"] == true);
  CHECK(r.summary["solver"]["final_residual"] == 0.0);
  CHECK(fs::exists(r.dir / "nu_star.bin"));
}

TEST_CASE("stage errors carry the stage name") {
  auto c = small_config("harness_out/err");
  c.analysis.compare_model = "gl";  // needs tau > 0, which this grid does not have
  try {
    run_experiment("rate", c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundsError);
    CHECK(std::string(e.what()).find("rate") != std::string::npos);
  }
  CHECK(error_of(R"({"model": {"name": "zero"}, "analysis": {"compare_model": "gl"}})").code() == ErrorCode::BoundsError);
  CHECK_THROWS_AS(run_experiment("frobnicate", c), Error);
}

TEST_CASE("command line exit codes") {
  const fs::path cfg = fs::absolute("harness_out/cli.json");
  fs::create_directories(cfg.parent_path());
  std::ofstream(cfg) << kMinimal;
  const fs::path bad = fs::absolute("harness_out/bad.json");
  std::ofstream(bad) << R"({"model": {"name": "zero"}, "grid": {"dt": 0.3}})";
  const std::string bin = MKV_BINARY;
  const std::string out = fs::absolute("harness_out/cli_run").string();
  auto run = [](const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  CHECK(run(bin + " simulate --config " + cfg.string() + " --seed 3 --threads 2 --out " + out) == 0);
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  CHECK(run(bin + " simulate --config " + bad.string() + " --out " + out + "_bad") == 2);
  CHECK(run(bin + " simulate") != 0);
}
