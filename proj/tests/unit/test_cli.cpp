#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/csv.hpp"
#include "cli/run.hpp"

namespace fs = std::filesystem;
using lde::cli::run;

namespace {

fs::path tmp_dir() {
  const char* env = std::getenv("LDE_TEST_TMP");
  fs::path p = env ? fs::path(env) : fs::temp_directory_path() / "ldefront-cli-test";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"ldefront"}) == 2);
  CHECK(run({"ldefront", "nosuch"}) == 2);
  CHECK(run({"ldefront", "speeds", "--model", "nosuch", "--out", (tmp_dir() / "x.csv").string()}) == 2);
  CHECK(run({"ldefront", "speeds", "--param", "eps", "--out", (tmp_dir() / "x.csv").string()}) == 2);
  CHECK(run({"ldefront", "front", "--c", "1.0", "--out", (tmp_dir() / "x.csv").string()}) == 0);
  CHECK(run({"ldefront", "front", "--c", "5", "--step", "0.5", "--out", (tmp_dir() / "x.csv").string()}) == 2);
}

TEST_CASE("speeds CSV") {
  const fs::path out = tmp_dir() / "speeds.csv";
  REQUIRE(run({"ldefront", "speeds", "--model", "vanzon", "--c", "5,6", "--out", out.string()}) == 0);
  const auto l = lines(slurp(out));
  REQUIRE(l.size() >= 3);
  CHECK(l[0].rfind("# config: {", 0) == 0);
  CHECK(l[1] == "quantity,c,value,note");
  const auto cfg = nlohmann::json::parse(l[0].substr(10));
  CHECK(cfg.at("subcommand") == "speeds");
  CHECK(!cfg.contains("workers"));
  bool found = false;
  for (const auto& row : l) {
    if (row.rfind("c_lin,", 0) == 0) {
      found = true;
      const double v = std::stod(row.substr(row.find(',', 6) + 1));
      CHECK(v == doctest::Approx(4.31107).epsilon(1e-5));
    }
  }
  CHECK(found);
}

TEST_CASE("seeded output is byte-identical across runs and worker counts") {
  const fs::path a = tmp_dir() / "check_a.csv", b = tmp_dir() / "check_b.csv", c = tmp_dir() / "check_c.csv";
  REQUIRE(run({"ldefront", "check", "--model", "exB2", "--grid", "24", "--seed", "7", "--workers", "1", "--out",
               a.string()}) == 0);
  REQUIRE(run({"ldefront", "check", "--model", "exB2", "--grid", "24", "--seed", "7", "--workers", "3", "--out",
               b.string()}) == 0);
  REQUIRE(run({"ldefront", "check", "--model", "exB2", "--grid", "24", "--seed", "8", "--out", c.string()}) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));

  const fs::path s1 = tmp_dir() / "scan_1.csv", s4 = tmp_dir() / "scan_4.csv";
  REQUIRE(run({"ldefront", "scan", "--model", "peletier", "--param", "eps=0.005", "--c", "1,2.5,6", "--workers", "1",
               "--out", s1.string()}) == 0);
  REQUIRE(run({"ldefront", "scan", "--model", "peletier", "--param", "eps=0.005", "--c", "1,2.5,6", "--workers", "4",
               "--out", s4.string()}) == 0);
  CHECK(slurp(s1) == slurp(s4));
}

TEST_CASE("model files") {
  const fs::path mf = tmp_dir() / "vz.model";
  {
    std::ofstream o(mf);
    o << "name = vz\ng = -s0 + 2*s1 - s1^2\nkappa = 1\nbeta = -1, 2\n";
  }
  const fs::path out = tmp_dir() / "mf.csv";
  CHECK(run({"ldefront", "speeds", "--model-file", mf.string(), "--out", out.string()}) == 0);
  CHECK(run({"ldefront", "speeds", "--model-file", mf.string(), "--param", "eps=0.1", "--out", out.string()}) == 2);
  CHECK(run({"ldefront", "speeds", "--model-file", (tmp_dir() / "missing.model").string(), "--out", out.string()}) ==
        2);
}

TEST_CASE("number formatting") {
  using lde::cli::fmt;
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(4.311070407) == "4.311070407");
  CHECK(fmt(std::nan("")) == "nan");
  CHECK(fmt(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(fmt(std::optional<double>{}) == "");
  CHECK(lde::cli::quote("a,b") == "\"a,b\"");
  CHECK(lde::cli::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(lde::cli::quote("plain") == "plain");
}
