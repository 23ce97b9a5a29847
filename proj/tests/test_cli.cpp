#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cubeslice/io.hpp"

using namespace cubeslice;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CUBESLICE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "cubeslice_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exact diagonal section") {
  const Run r = run("sections --mode exact --sides 1,1 --normal 0.7071067811865476,0.7071067811865476");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("value").get<double>() == doctest::Approx(1.41421356).epsilon(1e-8));
  CHECK(j.at("mode") == "exact");
  CHECK(j.contains("error_bound_or_se"));
  CHECK(j.contains("runtime_ms"));
}

TEST_CASE("section modes agree") {
  for (const char* mode : {"sinc", "quad"}) {
    const Run r = run(std::string("sections --mode ") + mode + " --sides 1,1,1 --normal 1,1,1 --no-timing");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("value").get<double>() == doctest::Approx(1.299038105676658).epsilon(1e-9));
  }
  const Run mc = run("sections --mode mc --sides 1,1,1 --normal 1,1,1 --samples 100000 --seed 3 --no-timing");
  REQUIRE(mc.code == 0);
  const json j = json::parse(mc.out);
  CHECK(std::abs(j.at("value").get<double>() - 1.299038105676658) < 4.0 * j.at("error_bound_or_se").get<double>());
}

TEST_CASE("ball integral curve") {
  const fs::path csv = scratch() / "ball.csv";
  const Run r = run("ball-integral --p-min 2 --p-max 4 --steps 3 --csv " + csv.string());
  REQUIRE(r.code == 0);
  std::istringstream in(slurp(csv));
  std::string header, row2, row3, row4;
  std::getline(in, header);
  std::getline(in, row2);
  std::getline(in, row3);
  std::getline(in, row4);
  CHECK(header == "p,I,sqrt(2/p),margin");
  CHECK(row2.rfind("2,", 0) == 0);
  CHECK(row3.rfind("3,", 0) == 0);
  CHECK(row4.rfind("4,", 0) == 0);
  double p, i, b, m;
  REQUIRE(std::sscanf(row2.c_str(), "%lf,%lf,%lf,%lf", &p, &i, &b, &m) == 4);
  CHECK(i == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(m) < 1e-8);
}

TEST_CASE("verify campaign writes a passing report") {
  const fs::path out = scratch() / "verify.json";
  const Run r = run("verify --n 2 --k 1 --trials 100 --seed 1 --workers 2 --out " + out.string());
  CHECK(r.code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("trials") == 100);
  CHECK(j.at("records").size() == 100);
  CHECK(j.at("failures").empty());
  CHECK(j.at("seed") == 1);
  CHECK(j.contains("max_slack"));
  CHECK(j.contains("version"));
  CHECK_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST_CASE("reports are byte-identical across worker counts") {
  const Run a = run("verify --n 3 --k 2 --trials 40 --seed 9 --workers 1 --no-timing");
  const Run b = run("verify --n 3 --k 2 --trials 40 --seed 9 --workers 4 --no-timing");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Run c = run("grinberg --n 3 --k 1 --diag 2,0.5,1 --samples 3000 --seed 7 --workers 1 --no-timing");
  const Run d = run("grinberg --n 3 --k 1 --diag 2,0.5,1 --samples 3000 --seed 7 --workers 3 --no-timing");
  CHECK(c.out == d.out);
}

TEST_CASE("density files") {
  const fs::path dir = scratch() / "densities";
  fs::create_directories(dir);
  write_atomic(dir / "a.json", R"({"factors": [{"pieces": [[-0.5, 0.5, 1]]}, {"pieces": [[0, 2, 0.5]]}]})");
  CHECK(run("densities-validate " + (dir / "a.json").string()).code == 0);
  const fs::path bad = scratch() / "bad.json";
  write_atomic(bad, R"({"pieces": [[0, 1, -2]]})");
  const Run v = run("densities-validate " + bad.string());
  CHECK(v.code == 1);
  CHECK(v.out.find("nonnegative") != std::string::npos);
  CHECK(run("verify --n 2 --k 1 --trials 5 --densities-dir " + dir.string()).code == 0);
  CHECK(run("verify --n 3 --k 1 --trials 5 --densities-dir " + dir.string()).code == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("sections --mode bogus --sides 1,1 --normal 1,1").code == 2);
  CHECK(run("sections --sides 1,x --normal 1,1").code == 2);
  CHECK(run("verify --n 2 --k 2").code == 2);
  CHECK(run("average --density /nonexistent/f.json").code == 3);
  CHECK(run("verify --n 2 --k 1 --trials 3 --out /nonexistent/dir/r.json").code == 3);
}

TEST_CASE("other subcommands run") {
  CHECK(run("bl-check --system mercedes --gaussian").code == 0);
  CHECK(run("bl-check --system random --d 2 --m 4 --seed 3").code == 0);
  CHECK(run("rogozin --n 3 --trials 10").code == 0);
  CHECK(run("average --n 2 --k 1 --samples 2000").code == 0);
  const fs::path csv = scratch() / "small.csv";
  const Run s = run("small-ball --n 3 --k 1 --eps 0.05,0.1,0.2 --samples 20000 --csv " + csv.string());
  CHECK(s.code == 0);
  CHECK(slurp(csv).rfind("eps,probability,bound\n", 0) == 0);
  const Run m = run("search-max --n 3 --k 2 --restarts 4 --steps 200");
  CHECK(m.code == 0);
  CHECK(json::parse(m.out).at("best_value").get<double>() > 1.35);
  CHECK(run("acceptance --criteria 10").code == 0);
}

}
