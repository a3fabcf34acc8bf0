#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "mcquad/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mcquad");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = mcquad::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mcquad_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// phi = m1 on a 1-d sample, with the true density column.
fs::path labeled_sample() {
  const auto path = scratch("sample.csv");
  const auto sim = run({"simulate", "--design", "iid", "--n", "400", "--seed", "3"});
  REQUIRE(sim.code == 0);
  std::ofstream out(path);
  out << "x1,phi,pi\n";
  for (const auto& line : data_lines(sim.out)) {
    if (line.rfind("x1", 0) == 0) continue;
    const double x = std::stod(line.substr(0, line.find(',')));
    const double s = std::sin(3.141592653589793 * x);
    out << line.substr(0, line.find(',')) << ',' << 2.0 * s * s << ",1\n";
  }
  return path;
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"estimate", "--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}

TEST_CASE("usage errors exit 2") {
  const auto r = run({"simulate", "--bogus"});
  CHECK(r.code == mcquad::cli::kUsage);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(run({"estimate"}).code == mcquad::cli::kUsage);
  CHECK(run({}).code == mcquad::cli::kUsage);
  CHECK(run({"ocean", "--input", "x.csv", "--month", "1", "--all-months"}).code == mcquad::cli::kUsage);
}

TEST_CASE("simulate writes a reproducible trajectory") {
  const auto a = run({"simulate", "--design", "mh", "--n", "50", "--dim", "2", "--seed", "9"});
  const auto b = run({"simulate", "--design", "mh", "--n", "50", "--dim", "2", "--seed", "9"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto lines = data_lines(a.out);
  REQUIRE(lines.size() == 51);
  CHECK(lines[0] == "x1,x2,accepted");
  const auto mix = run({"simulate", "--design", "mixture", "--n", "20"});
  CHECK(data_lines(mix.out)[0] == "x1,y,regen");
}

TEST_CASE("the seed environment variable is the default seed") {
  ::setenv("MCQUAD_SEED", "11", 1);
  const auto env = run({"simulate", "--design", "iid", "--n", "5"});
  ::unsetenv("MCQUAD_SEED");
  const auto flag = run({"simulate", "--design", "iid", "--n", "5", "--seed", "11"});
  const auto other = run({"simulate", "--design", "iid", "--n", "5", "--seed", "12"});
  CHECK(data_lines(env.out) == data_lines(flag.out));
  CHECK(data_lines(env.out) != data_lines(other.out));
  ::setenv("MCQUAD_SEED", "eleven", 1);
  CHECK(run({"simulate", "--n", "5"}).code == mcquad::cli::kUsage);
  ::unsetenv("MCQUAD_SEED");
}

TEST_CASE("estimate reports json") {
  const auto path = labeled_sample().string();
  for (const char* method : {"ks", "ksc", "mc"}) {
    const auto r = run({"estimate", "--input", path, "--method", method});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["method"] == method);
    CHECK(j["n"] == 400);
    CHECK(j["d"] == 1);
    CHECK(std::abs(j["estimate"].get<double>() - 1.0) < 0.2);
  }
  const auto again = run({"estimate", "--input", path});
  CHECK(again.out == run({"estimate", "--input", path}).out);
  const auto boundary = run({"estimate", "--input", path, "--method", "ks-boundary", "--domain", "0.1:0.9"});
  CHECK(boundary.code == 0);
  CHECK(run({"estimate", "--input", path, "--method", "ks-boundary"}).code == mcquad::cli::kUsage);
}

TEST_CASE("data and numerical errors") {
  const auto path = scratch("nophi.csv");
  {
    std::ofstream out(path);
    out << "x1,pi\n0.1,1\n0.2,1\n";
  }
  const auto r = run({"estimate", "--input", path.string()});
  CHECK(r.code == mcquad::cli::kData);
  CHECK(r.err.find("phi") != std::string::npos);
  CHECK(run({"estimate", "--input", scratch("absent.csv").string()}).code == mcquad::cli::kData);

  const auto sample = labeled_sample().string();
  CHECK(run({"estimate", "--input", sample, "--floor", "1e9"}).code == mcquad::cli::kNumerical);
}

TEST_CASE("bandwidth subcommand") {
  const auto r = run({"bandwidth", "--input", labeled_sample().string(), "--bandwidth", "silverman"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["source"] == "normal_scale");
  CHECK(j["scales"].size() == 1);
}

TEST_CASE("bench writes rows and a summary") {
  const auto results = scratch("bench/results.csv");
  const auto r = run({"bench", "--models", "m1", "--dims", "1", "--sizes", "500", "--replicates", "2", "--seed",
                      "7", "--out", results.string()});
  REQUIRE(r.code == 0);
  // Header plus 2 designs x 3 methods x 2 replicates.
  CHECK(data_lines(slurp(results)).size() == 1 + 12);
  // One row per (design, method) cell.
  CHECK(data_lines(slurp(results.parent_path() / "summary.csv")).size() == 1 + 6);
  CHECK(slurp(results).rfind("# mcquad bench", 0) == 0);
}

TEST_CASE("regen diagnostics") {
  const auto r = run({"regen", "--lambda0", "0.5", "--n", "20000", "--seed", "4"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["visit_rate"].get<double>() - 0.5) < 0.02);
  CHECK(j["kac"]["rel_err"].get<double>() < 0.05);
  CHECK(j["moments"]["bound_holds"] == true);
  CHECK(run({"regen", "--p", "9"}).code == mcquad::cli::kUsage);
}

TEST_CASE("ocean band averages") {
  const auto path = scratch("obs.csv");
  {
    std::ofstream out(path);
    out << "date,lat,lon,sst\n";
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lat(-20.0, 20.0), lon(-179.9, 180.0);
    for (int i = 0; i < 800; ++i) out << "2020-07-0" << 1 + i % 9 << ',' << lat(rng) << ',' << lon(rng) << ",27\n";
    out << "bad,row,here,1\n";
  }
  const auto r = run({"ocean", "--input", path.string(), "--band", "equatorial", "--month", "7"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "year,month,band,n,average_c,bandwidth,clamped");
  CHECK(lines[1].rfind("2020,7,equatorial,", 0) == 0);
  CHECK(run({"ocean", "--input", path.string(), "--all-months", "--strict"}).code == mcquad::cli::kData);
  CHECK(run({"ocean", "--input", path.string(), "--month", "3"}).code == mcquad::cli::kData);
}
