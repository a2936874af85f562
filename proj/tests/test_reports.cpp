#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "hill4bp/reports.hpp"

using namespace hill4bp;

namespace {

int run(const std::string& args) {
  const int status = std::system((std::string(HILL4BP_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("parameter report and table") {
  const Report r = parameters_report(derive_parameters(0.2));
  CHECK(r.pass);
  CHECK(r.body["parameters"]["lambda2"].get<double>() == doctest::Approx(2.581665382639197));
  std::ostringstream csv;
  write_parameter_table(csv, 101);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 102);
  CHECK(text.rfind("mu,d,lambda1,lambda2,a,b\n0,1,0,3,-1,0.5\n", 0) == 0);
  CHECK(text.find("\n0.5,0.5,0.75,2.25,-0.625,0.125\n") != std::string::npos);
}

TEST_CASE("lagrange and symmetry reports pass") {
  CHECK(lagrange_report(derive_parameters(0.2)).pass);
  CHECK(lagrange_report(derive_parameters(0.0)).pass);
  const Report s = symmetry_report(derive_parameters(0.5), 200, 1);
  CHECK(s.pass);
  CHECK(s.body["signed_permutation_search"]["n_found"] == 8);
}

TEST_CASE("provenance fields") {
  const Json j = provenance({"params", "--mu", "0.2"}, 7, 0.2, nullptr);
  CHECK(j["version"] == version());
  CHECK(j["seed"] == 7);
  CHECK(j["c"].is_null());
  CHECK(j["argv"].size() == 3);
}

TEST_CASE("small verify-all run passes") {
  VerifyAllOptions o;
  o.mu_list = {0.2};
  o.c_offsets = {0.1};
  o.n = 2000;
  o.seed = 3;
  const Report r = verify_all(o);
  CHECK(r.pass);
  CHECK(r.body["summary"]["n_failed"] == 0);
}

TEST_CASE("CLI exit codes") {
  CHECK(run("params --mu 0.2") == 0);
  CHECK(run("params --table --mu-steps 11") == 0);
  CHECK(run("lagrange --mu 0") == 0);
  CHECK(run("hill-region --mu 0.2 --c-offset 0.1 --grid 128") == 0);
  CHECK(run("scan-contact --mu 0.2 --c-offset 0.1 --n 1000 --seed 1 --planar") == 0);
  CHECK(run("scan-regularized --mu 0.5 --c-offset 0.5 --n 1000 --seed 1") == 0);
  CHECK(run("symmetry --mu 0.2 --n 100") == 0);
  CHECK(run("integrate --mu 0.2 --state 0.1 0.05 0.02 0.1 0.2 -0.1 --t 1 --tol 1e-10") == 0);
  CHECK(run("params --mu 0.7") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("scan-contact --mu 0.2 --c 0 --n 10") == 2);
  CHECK(run("scan-contact --mu 0.2 --c -2.3 --c-offset 0.1") == 2);
  CHECK(run("integrate --mu 0.2 --state 1 2 3") == 2);
  CHECK(run("integrate --mu 0.2 --state 0.1 0.05 0.02 0.1 0.2 -0.1 --regularized --c -2.5") == 2);
}

TEST_CASE("CLI outputs are reproducible and carry provenance") {
  const std::string a = "/tmp/hill4bp_test_a.json", b = "/tmp/hill4bp_test_b.json";
  REQUIRE(run("scan-contact --mu 0.2 --c-offset 0.1 --n 5000 --seed 4 -o " + a) == 0);
  REQUIRE(run("scan-contact --mu 0.2 --c-offset 0.1 --n 5000 --seed 4 -o " + b) == 0);
  const std::string ta = slurp(a);
  CHECK(ta == slurp(b));
  const Json j = Json::parse(ta);
  for (const char* key : {"version", "argv", "seed", "mu", "c"}) CHECK(j["provenance"].contains(key));
  CHECK(j["provenance"]["seed"] == 4);
  CHECK(j["verdict"] == "pass");
  std::remove(a.c_str());
  std::remove(b.c_str());
}
