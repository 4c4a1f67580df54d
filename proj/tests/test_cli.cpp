#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "concentra/cli.hpp"

using json = nlohmann::json;
using concentra::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("certificate exit codes") {
  const auto ok = call({"certificate", "--a", "0.5"});
  CHECK(ok.code == 0);
  const auto j = json::parse(ok.out);
  CHECK(j["schema_version"] == "1");
  CHECK(j["results"]["holds"] == true);
  CHECK(j["results"]["margin"].get<double>() > 0);

  const auto bad = call({"certificate", "--a", "0.01"});
  CHECK(bad.code == 2);
  const auto k = json::parse(bad.out);
  CHECK(k["results"]["holds"] == false);
  CHECK(k["results"]["touch_t"].is_number());
  CHECK(k["results"]["negative_region"].size() == 2);
}

TEST_CASE("verify-constants reports four rows") {
  const auto r = call({"verify-constants"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["results"]["constants"].size() == 4);
  for (const auto& row : j["results"]["constants"]) CHECK(row["relative_error"].get<double>() <= 1e-8);

  const auto csv = call({"--format", "csv", "verify-constants"});
  std::istringstream lines(csv.out);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "name,closed_form,quadrature,error_estimate,relative_error");
  CHECK(first.rfind("a0,4.27366406832304", 0) == 0);
}

TEST_CASE("help lists every command") {
  const auto r = call({"--help"});
  CHECK(r.code == 0);
  for (const char* c : {"green", "robin", "matrix", "polygon-scan", "find-critical", "threshold-a",
                        "certificate", "verify-constants", "energy-check", "error-norm"})
    CHECK(r.out.find(c) != std::string::npos);
}

TEST_CASE("usage and parameter errors exit 1") {
  CHECK(call({}).code == 1);
  CHECK(call({"bogus"}).code == 1);
  CHECK(call({"certificate", "--a", "abc"}).code == 1);
  CHECK(call({"robin", "--domain", "ball", "--lambda", "20"}).code == 1);
  CHECK(call({"robin", "--r-grid", "0.7,0.6"}).code == 1);
  CHECK(call({"green", "--x", "0.1,0.2"}).code == 1);
  CHECK(call({"green", "--tol", "-1"}).code == 1);
  const auto r = call({"robin", "--domain", "ball", "--lambda", "20"});
  CHECK(r.err.find("DomainError") != std::string::npos);
}

TEST_CASE("config file is overridden by flags") {
  const std::string path = "concentra_cli_test.cfg";
  {
    std::ofstream f(path);
    f << "# comment\n\na = 0.01\nformat=json\n";
  }
  const auto from_file = call({"--config", path, "certificate"});
  CHECK(from_file.code == 2);
  CHECK(json::parse(from_file.out)["inputs"]["a"] == 0.01);
  const auto override = call({"--config", path, "certificate", "--a", "0.5"});
  CHECK(override.code == 0);
  CHECK(json::parse(override.out)["inputs"]["a"] == 0.5);
  CHECK(call({"--config", "missing.cfg", "certificate"}).code == 1);
  std::remove(path.c_str());
}

TEST_CASE("config parser") {
  const auto kv = concentra::cli::parse_config("a=1\n  # x\n k = 2 \n\nmu-grid=0.1,0.2\n");
  REQUIRE(kv.size() == 3);
  CHECK(kv[1].first == "k");
  CHECK(kv[1].second == "2");
  CHECK(kv[2].second == "0.1,0.2");
}

TEST_CASE("reports are reproducible") {
  const std::vector<std::string> args{"robin", "--a", "0.5", "--lambda", "2", "--r-grid",
                                      "0.55,0.6,0.7,0.8,0.9", "--d-lambda"};
  const auto first = call(args);
  const auto second = call(args);
  CHECK(first.code == 0);
  CHECK(first.out == second.out);
  auto one = args, two = args;
  one.insert(one.begin(), {"--threads", "1"});
  two.insert(two.begin(), {"--threads", "3"});
  const auto j1 = json::parse(call(one).out), j3 = json::parse(call(two).out);
  CHECK(j1["results"] == j3["results"]);
  CHECK(j3["inputs"]["threads"] == 3);
  call({"--threads", "0", "certificate"});
}

TEST_CASE("csv grid output") {
  const auto r = call({"polygon-scan", "--a", "0.5", "--k", "3", "--lambda-grid", "0,1", "--n-r", "5"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  std::getline(lines, line);
  CHECK(line == "lambda,r,sigma1,nu_min,psi");
  while (std::getline(lines, line)) ++n;
  CHECK(n == 10);
  const auto j = call({"--format", "json", "polygon-scan", "--a", "0.5", "--k", "3", "--n-r", "5"});
  CHECK(json::parse(j.out)["results"]["cells"].size() == 5);
}

TEST_CASE("matrix and green reports") {
  const auto m = call({"matrix", "--a", "0.5", "--k", "4", "--r", "0.75", "--lambda", "3"});
  REQUIRE(m.code == 0);
  const auto j = json::parse(m.out);
  CHECK(j["results"]["matrix"].size() == 4);
  CHECK(j["results"]["circulant_eigenvalues"].size() == 4);
  CHECK(j["results"]["smallest_eigenvector"][0].get<double>() > 0);
  const auto p = call({"matrix", "--domain", "ball", "--points", "0.1,0,0;0,0.3,0;0,0,-0.4"});
  CHECK(json::parse(p.out)["results"]["eigenvalues"].size() == 3);
  const auto g = call({"green", "--domain", "ball", "--lambda", "1", "--x", "0,0,0", "--y", "0.5,0,0",
                       "--d-lambda"});
  CHECK(g.code == 0);
  CHECK(json::parse(g.out)["results"]["d_lambda_green"]["step"].get<double>() > 0);
}

TEST_CASE("output file") {
  const std::string path = "concentra_cli_test.json";
  const auto r = call({"--output", path, "certificate", "--a", "0.2"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  json j;
  f >> j;
  CHECK(j["command"] == "certificate");
  std::remove(path.c_str());
}
