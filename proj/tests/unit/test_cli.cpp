#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpppkit/cli.hpp"

using namespace cpppkit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("cpppkit_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cpppkit");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json without_runtime(const std::string& path) {
  auto doc = nlohmann::json::parse(slurp(path));
  doc.erase("runtime");
  return doc;
}

std::size_t data_rows(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("ppp command", "[cli]") {
  TempDir dir("ppp");
  const auto a = cli({"ppp", "m=1000", "burn_in=200", "chain_dump=chain.csv", "out=" + dir / "a"});
  REQUIRE(a.code == 0);
  const auto b = cli({"ppp", "--seed", "1", "m=1000", "burn_in=200", "out=" + dir / "b"});
  REQUIRE(b.code == 0);
  CHECK(without_runtime(dir / "a/ppp.json")["ppp_hat"] == without_runtime(dir / "b/ppp.json")["ppp_hat"]);
  const auto doc = nlohmann::json::parse(slurp(dir / "a/ppp.json"));
  for (const char* key : {"ppp_hat", "k", "m", "ess", "tau"}) CHECK(doc.contains(key));
  CHECK(doc["runtime"].contains("seconds"));
  CHECK(data_rows(dir / "a/chain.csv") == 1000);
  CHECK(slurp(dir / "a/chain.csv").rfind("iter,", 0) == 0);
}

TEST_CASE("input and usage errors exit with code 2 and write nothing", "[cli]") {
  TempDir dir("errors");
  const auto missing = cli({"ppp", "data=/nonexistent/newcomb.txt", "out=" + dir / "x"});
  CHECK(missing.code == 2);
  CHECK_FALSE(fs::exists(dir.path / "x"));
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"ppp", "nonsense_key=3", "out=" + dir / "x"}).code == 2);
  CHECK(cli({"ppp", "m=abc", "out=" + dir / "x"}).code == 2);
  CHECK(cli({"scenario", "a=-1", "out=" + dir / "x"}).code == 2);
  CHECK(cli({"report", "in=" + dir / "empty", "out=" + dir / "x"}).code == 2);

  fs::create_directories(dir.path);
  std::ofstream(dir / "zero.txt") << "110\n011\n000\n";
  const auto zero = cli({"ppp", "model=cjs_cc", "data=" + dir / "zero.txt", "out=" + dir / "x"});
  CHECK(zero.code == 2);
  CHECK(zero.err.find("line 3") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "x"));
}

TEST_CASE("config files with command-line overrides", "[cli]") {
  TempDir dir("config");
  fs::create_directories(dir.path);
  std::ofstream(dir / "run.cfg") << "# Newcomb\nm = 1500\nburn_in=100\nseed=4\n";
  REQUIRE(cli({"ppp", "--config", dir / "run.cfg", "m=1200", "out=" + dir / "o"}).code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "o/ppp.json"));
  CHECK(doc["m"] == 1200);
  CHECK(doc["config"]["seed"] == "4");
  std::ofstream(dir / "bad.cfg") << "m 1500\n";
  CHECK(cli({"ppp", "--config", dir / "bad.cfg"}).code == 2);
  CHECK(cli({"ppp", "--config", dir / "missing.cfg"}).code == 2);
}

TEST_CASE("cppp command writes consistent results", "[cli]") {
  TempDir dir("cppp");
  const std::vector<std::string> common{"cppp", "r=100", "m_tilde=50", "m=1000", "burn_in=300", "b=50"};
  auto one = common;
  one.push_back("out=" + dir / "w1");
  one.push_back("workers=1");
  auto eight = common;
  eight.push_back("out=" + dir / "w8");
  eight.push_back("--workers");
  eight.push_back("8");
  const auto r1 = cli(one);
  REQUIRE(r1.code == 0);
  REQUIRE(cli(eight).code == 0);
  CHECK(r1.out.find("verdict") != std::string::npos);

  CHECK(without_runtime(dir / "w1/cppp.json") == without_runtime(dir / "w8/cppp.json"));
  CHECK(slurp(dir / "w1/replicate.csv") == slurp(dir / "w8/replicate.csv"));
  CHECK(data_rows(dir / "w1/replicate.csv") == 100);

  const auto doc = nlohmann::json::parse(slurp(dir / "w1/cppp.json"));
  CHECK(doc["uncertainty"].size() == 3);
  CHECK(doc["replicates"].size() == 100);
  const auto rows = read_replicate_csv(dir / "w1/replicate.csv");
  const double ppp_y = doc["ppp_y"];
  double inside = 0.0;
  for (const auto& r : rows)
    if (static_cast<double>(r.k_tilde) <= static_cast<double>(r.m_tilde) * ppp_y) inside += 1.0;
  CHECK(inside / static_cast<double>(rows.size()) == doc["cppp"].get<double>());

  CHECK(cli({"cppp", "r=100", "m_tilde=50", "c=6000", "out=" + dir / "bad"}).code == 2);
  REQUIRE(cli({"cppp", "c=1000", "m_tilde=50", "m=1000", "methods=plugin", "out=" + dir / "budget"}).code == 0);
  CHECK(data_rows(dir / "budget/replicate.csv") == 20);

  REQUIRE(cli({"report", "in=" + dir / "w1", "bins=20", "out=" + dir / "rep"}).code == 0);
  std::ifstream hist(dir / "rep/histogram.csv");
  std::string line;
  std::getline(hist, line);
  CHECK(line == "bin_lo,bin_hi,count,ppp_y");
  std::int64_t total = 0;
  while (std::getline(hist, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream f(line);
    double lo, hi, y;
    std::int64_t count;
    f >> lo >> hi >> count >> y;
    total += count;
    CHECK(y == ppp_y);
  }
  CHECK(total == 100);
  CHECK(data_rows(dir / "rep/errorbar.csv") == 3);

  REQUIRE(cli({"cppp", "r=20", "m_tilde=50", "m=1000", "methods=mbb", "out=" + dir / "single"}).code == 0);
  REQUIRE(cli({"report", "in=" + dir / "single", "out=" + dir / "rep1"}).code == 0);
  CHECK(data_rows(dir / "rep1/errorbar.csv") == 1);
}

TEST_CASE("scenario command", "[cli]") {
  TempDir dir("scenario");
  const auto run = cli({"scenario", "a=2", "b=2", "cppp=0.2", "c=20000", "out=" + dir / "s"});
  REQUIRE(run.code == 0);
  CHECK(data_rows(dir / "s/scenario.csv") == 7);
  CHECK(run.out.find("note:") == std::string::npos);

  const auto odd = cli({"scenario", "c=1500", "grid=200,500", "simulate=200", "fixed_m=100", "r_values=10,20",
                        "out=" + dir / "t"});
  REQUIRE(odd.code == 0);
  CHECK(odd.out.find("r floored to 7") != std::string::npos);
  CHECK(data_rows(dir / "t/scenario_check.csv") == 2);
  CHECK(data_rows(dir / "t/scenario_fixed_m.csv") == 2);
}

TEST_CASE("repeat command", "[cli]") {
  TempDir dir("repeat");
  const auto same = cli({"repeat", "n_repeats=2", "same_seed=1", "r=20", "m_tilde=30", "m=1000", "b=20",
                         "reference=0.1", "out=" + dir / "same"});
  REQUIRE(same.code == 0);
  const auto stats = nlohmann::json::parse(slurp(dir / "same/repeat_stats.json"));
  CHECK(stats["sd"] == 0.0);
  CHECK(stats["coverage"].get<double>() >= 0.0);
  CHECK(stats["coverage"].get<double>() <= 1.0);
  CHECK(data_rows(dir / "same/repeat_summary.csv") == 2);
  CHECK(slurp(dir / "same/repeat_summary.csv").rfind("run,cppp_hat,se_plugin,se_mbb,se_normal,ci_lo,ci_hi,covers\n", 0) ==
        0);
  CHECK(cli({"repeat", "n_repeats=1", "out=" + dir / "one"}).code == 2);
}

TEST_CASE("verdict wording", "[cli]") {
  CHECK(verdict({0.1, 0.3}, 0.05) == "no evidence against model");
  CHECK(verdict({0.01, 0.04}, 0.05) == "reject model");
  CHECK(verdict({0.03, 0.08}, 0.05) == "inconclusive");
}
