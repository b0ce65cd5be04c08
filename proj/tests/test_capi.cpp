// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include "rarewalk/rarewalk.h"

#include <cmath>
#include <cstring>
#include <string>

using json = nlohmann::json;

namespace {

json take(char* s) {
  REQUIRE(s != nullptr);
  json j = json::parse(s);
  rw_free_string(s);
  return j;
}

const char* kModel = R"({"family":"mvnormal","d":4,"mean":-0.5,"variance":1.0,"rho":0.2})";
const char* kProblem = R"({"kind":"siegmund","ell":1.0,"u":1.0})";

struct Model {
  rw_model* p = nullptr;
  Model() { REQUIRE(rw_model_create(kModel, &p) == RW_OK); }
  ~Model() { rw_model_destroy(p); }
};

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::strlen(rw_version()) > 0);
  rw_model* m = nullptr;
  CHECK(rw_model_create("{not json", &m) == RW_ERR_PARSE);
  CHECK(m == nullptr);
  CHECK(std::strlen(rw_last_error()) > 0);
  CHECK(rw_model_create(R"({"family":"mvnormal","d":3,"mean":-0.5,"variance":1.0,"rho":2.0})", &m) != RW_OK);
  // model specs go through the config parser: errors carry the field path
  CHECK(rw_model_create(R"({"family":"mvnormal","d":3,"mean":0.0,"variance":1.0,"rho":0.0})", &m) == RW_ERR_PARSE);
  CHECK(std::string(rw_last_error()).find("zero drift") != std::string::npos);
  CHECK(rw_model_create(nullptr, &m) != RW_OK);
  rw_model_destroy(nullptr);
  rw_proposal_destroy(nullptr);
  rw_free_string(nullptr);
}

TEST_CASE("model queries") {
  Model m;
  int d = 0;
  CHECK(rw_model_dim(m.p, &d) == RW_OK);
  CHECK(d == 4);
  double th[4] = {0.1, 0.2, -0.1, 0.0}, v = 0, g[4];
  CHECK(rw_model_cgf(m.p, th, 4, &v) == RW_OK);
  CHECK(std::isfinite(v));
  CHECK(rw_model_grad(m.p, th, 4, g) == RW_OK);
  CHECK(rw_model_cgf(m.p, th, 3, &v) == RW_ERR_DIMENSION);
  double z = 0;
  CHECK(rw_model_marginal_root(m.p, 0, &z) == RW_OK);
  CHECK(z == doctest::Approx(1.0));
  CHECK(rw_model_marginal_root(m.p, 9, &z) != RW_OK);
  char* s = nullptr;
  CHECK(rw_model_describe(m.p, &s) == RW_OK);
  CHECK(take(s)["dim"] == 4);
}

TEST_CASE("regions through the C API") {
  const double x[3] = {2.5, -1.5, 4.0};
  int stopped = 0, rare = 0;
  char* label = nullptr;
  CHECK(rw_classify_state(R"({"kind":"siegmund","ell":1,"u":2})", x, 3, 1.0, &stopped, &rare, &label) == RW_OK);
  CHECK(stopped == 1);
  CHECK(rare == 1);
  CHECK(std::string(label) == "rare{0,2}");
  rw_free_string(label);
  double r = 0;
  const double th[3] = {1.0, -3.0, 2.0};
  CHECK(rw_rearrangement_min(th, 3, 2, &r) == RW_OK);
  CHECK(r == doctest::Approx(3.0));
  CHECK(rw_rearrangement_min(th, 3, 5, &r) == RW_ERR_INVALID_ARGUMENT);
  const int set[1] = {0};
  const double t2[3] = {0.5, -0.1, -0.2};
  CHECK(rw_support_value(R"({"kind":"siegmund","ell":1,"u":3})", t2, 3, set, 1, &r) == RW_OK);
  CHECK(r == doctest::Approx(1.8));
}

TEST_CASE("solve, build, reload and estimate") {
  Model m;
  char* s = nullptr;
  const json req = {{"problem", json::parse(kProblem)}, {"op", "gamma_pair"}, {"index", {0, 1}}};
  CHECK(rw_solve(m.p, req.dump().c_str(), &s) == RW_OK);
  CHECK(take(s)["value"].get<double>() == doctest::Approx(2.0 / 1.2).epsilon(1e-8));
  CHECK(rw_solve(m.p, R"({"problem":{"kind":"siegmund","ell":1,"u":1},"op":"nope"})", &s) == RW_ERR_UNSUPPORTED);

  rw_proposal* p = nullptr;
  const json breq = {{"problem", json::parse(kProblem)}, {"variant", "theta1"}};
  CHECK(rw_proposal_build(m.p, breq.dump().c_str(), &p, &s) == RW_OK);
  const json built = take(s);
  size_t n = 0;
  CHECK(rw_proposal_size(p, &n) == RW_OK);
  CHECK(n == built["manifest"]["size"].get<size_t>());
  CHECK(built["solutions"].size() > 0);

  rw_proposal* q = nullptr;
  CHECK(rw_proposal_load(m.p, built["manifest"].dump().c_str(), &q) == RW_OK);
  const char* run = R"({"b":4,"n_paths":2000,"seed":5,"workers":2})";
  char *a = nullptr, *b = nullptr;
  CHECK(rw_estimate(m.p, p, run, &a) == RW_OK);
  CHECK(rw_estimate(m.p, q, run, &b) == RW_OK);
  const json ja = take(a), jb = take(b);
  CHECK(ja["p_hat"] == jb["p_hat"]);
  CHECK(ja["truncation_count"] == 0);

  CHECK(rw_decay_scan(m.p, p, R"({"b":[2,4],"n_paths":1000,"seed":5})", &s) == RW_OK);
  const json scan = take(s);
  CHECK(scan["rows"].size() == 2);
  CHECK(scan["csv"].get<std::string>().rfind("b,p_hat", 0) == 0);
  CHECK(rw_decay_scan(m.p, p, R"({"b":[4,2],"n_paths":10})", &s) == RW_ERR_INVALID_ARGUMENT);

  CHECK(rw_plain_mc(m.p, kProblem, R"({"b":1,"n_paths":1000,"seed":5})", &s) == RW_OK);
  CHECK(take(s)["n"] == 1000);

  // a manifest whose lambdas do not match the model is rejected
  json bad = built["manifest"];
  bad["tilts"][0]["lambda"] = 0.5;
  CHECK(rw_proposal_load(m.p, bad.dump().c_str(), &q) != RW_OK);
  CHECK(rw_proposal_load(m.p, R"({"format":"x"})", &q) == RW_ERR_PARSE);
  rw_proposal_destroy(p);
}

TEST_CASE("conditions and experiments") {
  Model m;
  char* s = nullptr;
  const json req = {{"problem", json::parse(kProblem)}, {"condition", "H1"}};
  CHECK(rw_check(m.p, req.dump().c_str(), &s) == RW_OK);
  const json r = take(s);
  CHECK(r["condition"] == "H1");
  CHECK(r.contains("holds"));
  CHECK(rw_modified_siegmund_count(10, &s) == RW_OK);
  CHECK(take(s)["required_components"] == 252);
  CHECK(rw_modified_siegmund_count(9, &s) == RW_ERR_INVALID_ARGUMENT);
  CHECK(rw_sweep(R"({"kind":"homogeneous_sizes","d":10,"ell":1,"u":0.5,"component":{"type":"normal","mean":-0.5,"variance":1}})", 1,
                 &s) == RW_OK);
  CHECK(take(s)["rows"].size() == 10);
  CHECK(rw_sweep(R"({"kind":"unknown"})", 1, &s) != RW_OK);
}

TEST_CASE("sum-intersection cap error code") {
  rw_model* m = nullptr;
  REQUIRE(rw_model_create(R"({"family":"mvnormal","d":12,"mean":-0.5,"variance":1.0,"rho":0.1})", &m) == RW_OK);
  rw_proposal* p = nullptr;
  CHECK(rw_proposal_build(m, R"({"problem":{"kind":"sum_intersection","L":3},"cap":100})", &p, nullptr) == RW_ERR_LIMIT);
  CHECK(p == nullptr);
  CHECK(std::string(rw_last_error()).find("440") != std::string::npos);
  rw_model_destroy(m);
}
