#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace regstab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "region_stabilize");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "region_stabilize_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bad configuration exits with 2") {
  CHECK(invoke({"simulate", "--reps", "0"}).code == cli::kBadConfig);
  CHECK(invoke({"bound", "--s", "0.5"}).code == cli::kBadConfig);
  CHECK(invoke({"simulate", "--model", "voronoi"}).code == cli::kBadConfig);
  CHECK(invoke({"frobnicate"}).code == cli::kBadConfig);
  CHECK(invoke({"bound", "--p", "2"}).code == cli::kBadConfig);
}

TEST_CASE("unwritable output exits with 3") {
  CHECK(invoke({"simulate", "--reps", "5", "--out", "/nonexistent/dir/x.csv"}).code ==
        cli::kIoError);
  CHECK(invoke({"simulate", "--config", "/nonexistent/run.cfg"}).code == cli::kIoError);
}

TEST_CASE("simulate writes one row per replicate and reruns byte-identically") {
  const auto a = scratch("a.csv"), b = scratch("b.csv"), j = scratch("a.json");
  for (const auto& out : {a, b}) {
    const auto r = invoke({"simulate", "--model", "minimal", "--s", "1000", "--reps", "100",
                           "--seed", "42", "--out", out.string(), "--summary", j.string()});
    REQUIRE(r.code == cli::kOk);
  }
  const auto text = slurp(a);
  CHECK(std::count(text.begin(), text.end(), '\n') == 101);
  CHECK(text == slurp(b));
  CHECK(slurp(j).find("\"n_reps\": 100") != std::string::npos);
}

TEST_CASE("config file with flag precedence") {
  const auto cfg = scratch("run.cfg");
  const auto out = scratch("cfg.csv");
  {
    std::ofstream os(cfg);
    os << "# small run\nmodel = lattice\nlattice_n = 3\nn_reps = 7\nout = " << out.string()
       << "\nsummary = " << scratch("cfg.json").string() << "\n";
  }
  REQUIRE(invoke({"simulate", "--config", cfg.string(), "--reps", "9"}).code == cli::kOk);
  const auto text = slurp(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);

  std::ofstream(cfg) << "no_such_key = 1\n";
  CHECK(invoke({"simulate", "--config", cfg.string()}).code == cli::kBadConfig);
}

TEST_CASE("bound reports the normalized distances") {
  const auto report = scratch("bound.json");
  const auto r = invoke({"bound", "--model", "lattice", "--lattice-n", "5", "--report",
                         report.string()});
  REQUIRE(r.code == cli::kOk);
  const auto text = slurp(report);
  CHECK(text.find("\"dK_norm\"") != std::string::npos);
  CHECK(text.find("\"var_source\": \"mecke\"") != std::string::npos);
}

TEST_CASE("verify filters and detects the dominance fault") {
  const auto scaling = invoke({"verify", "--filter", "scaling"});
  CHECK(scaling.code == cli::kOk);
  CHECK(std::count(scaling.out.begin(), scaling.out.end(), '\n') >= 2);
  CHECK(scaling.out.find("ok 1 - scaling:") != std::string::npos);

  const auto faulty = invoke({"verify", "--filter", "malliavin", "--inject-strict-dominance"});
  CHECK(faulty.code == cli::kCheckFailed);
  CHECK(faulty.out.find("not ok") != std::string::npos);
}

TEST_CASE("bound report carries every field") {
  const auto report = scratch("minimal.json");
  REQUIRE(invoke({"bound", "--model", "minimal", "--d", "2", "--s", "100", "--report",
                  report.string()})
              .code == cli::kOk);
  const auto text = slurp(report);
  for (const char* key : {"\"s\"", "\"d\"", "\"p\"", "\"zeta\"", "\"beta\"", "\"int_f_beta_sq\"",
                          "\"int_f_2beta\"", "\"int_kg_G\"", "\"var\"", "\"var_source\"",
                          "\"dW_norm\"", "\"dK_norm\"", "\"se_int_f_beta_sq\"",
                          "\"se_int_f_2beta\"", "\"se_int_kg_G\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
}

TEST_CASE("sweep writes one report per s") {
  const auto report = scratch("sweep.json");
  REQUIRE(invoke({"sweep", "--model", "minimal", "--s-grid", "100,1000,10000", "--report",
                  report.string()})
              .code == cli::kOk);
  const auto text = slurp(report);
  std::size_t count = 0;
  for (auto pos = text.find("\"dK_norm\""); pos != std::string::npos;
       pos = text.find("\"dK_norm\"", pos + 1)) {
    ++count;
  }
  CHECK(count == 3);
}

}
