#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "simvi/bench.hpp"
#include "simvi/cli.hpp"

namespace fs = std::filesystem;

namespace {

int call(std::vector<std::string> args) {
  args.insert(args.begin(), "simvi");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return simvi::parse_and_dispatch(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("simvi_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t csv_rows(const fs::path& p) { return simvi::read_series_csv(p.string()).size(); }

const std::vector<std::string> kSmall = {"--d", "8", "--T", "100", "--m", "5", "--K", "20"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail = kSmall) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(call({}) == 1);
  CHECK(call({"compare", "--bogus"}) == 1);
  CHECK(call({"frobnicate"}) == 1);
  CHECK(call({"--help"}) == 0);
  CHECK(call(with({"run", "--out", scratch("bad").string(), "--T", "7"})) == 1);
  CHECK(call(with({"run", "--out", scratch("bad").string(), "--solver", "newton"})) == 1);
  CHECK(call(with({"run", "--out", scratch("bad").string(), "--c", "-1"})) == 1);
  CHECK(call(with({"run", "--out", scratch("bad").string(), "--base-file", "/nonexistent/c.txt"})) == 2);
}

TEST_CASE("compare writes three series and the constants") {
  auto out = scratch("compare");
  CHECK(call(with({"compare", "--seed", "1", "--out", out.string()})) == 0);
  for (const char* f : {"paus.csv", "mirror-prox.csv", "euclidean.csv", "constants.csv"}) CHECK(fs::exists(out / f));
  CHECK(csv_rows(out / "paus.csv") == 21);
}

TEST_CASE("sweep writes one series per multiplier") {
  auto out = scratch("sweep");
  CHECK(call(with({"sweep", "--c", "0.25,0.5,1,2,4", "--solver", "paus", "--out", out.string()})) == 0);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().filename().string().rfind("paus_c", 0) == 0) ++n;
  CHECK(n == 5);
  CHECK(fs::exists(out / "paus_c0.25.csv"));
}

TEST_CASE("run accepts each solver") {
  for (const char* s : {"paus", "mirror-prox", "euclidean"}) {
    auto out = scratch(std::string("run_") + s);
    CHECK(call(with({"run", "--solver", s, "--out", out.string()})) == 0);
    CHECK(fs::exists(out / (std::string(s) + ".csv")));
  }
  auto out = scratch("run_mp_euclid");
  CHECK(call(with({"run", "--solver", "mirror-prox", "--geometry", "euclidean", "--out", out.string()})) == 0);
  CHECK(fs::exists(out / "mirror-prox-euclidean.csv"));
}

TEST_CASE("config file precedence") {
  auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# small game\nd = 8\nT = 100\nm = 5\nseed = 2\nK = 10\nout = " << (dir / "from_file").string() << "\n";
  }
  CHECK(call({"compare", "--config", (dir / "run.cfg").string()}) == 0);
  CHECK(csv_rows(dir / "from_file" / "paus.csv") == 11);

  // the flag wins over the file
  CHECK(call({"compare", "--config", (dir / "run.cfg").string(), "--K", "4", "--out", (dir / "flag").string()}) == 0);
  CHECK(csv_rows(dir / "flag" / "paus.csv") == 5);

  { std::ofstream(dir / "noseed.cfg") << "d = 8\nT = 100\nK = 5\n"; }
  CHECK(call({"compare", "--config", (dir / "noseed.cfg").string(), "--out", (dir / "x").string()}) == 1);
  CHECK(call({"run", "--config", (dir / "noseed.cfg").string(), "--out", (dir / "y").string()}) == 0);

  { std::ofstream(dir / "typo.cfg") << "seed = 1\nsolverr = paus\n"; }
  CHECK(call({"compare", "--config", (dir / "typo.cfg").string()}) == 1);
  CHECK(call({"compare", "--config", (dir / "missing.cfg").string()}) == 1);
}

TEST_CASE("identical invocations give identical bytes") {
  auto a = scratch("det_a"), b = scratch("det_b");
  CHECK(call(with({"compare", "--out", a.string()})) == 0);
  CHECK(call(with({"compare", "--out", b.string()})) == 0);
  for (const char* f : {"paus.csv", "mirror-prox.csv", "euclidean.csv", "constants.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("check runs the verification suites") { CHECK(call({"check"}) == 0); }
