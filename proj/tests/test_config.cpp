#include <doctest.h>

#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <string>

using namespace rarewalk;

namespace {

std::string error_of(const json& doc, bool paper = false) {
  try {
    parse_config(doc, paper);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  return "";
}

json base() {
  return json::parse(R"({
    "name": "t",
    "model": {"family": "mvnormal", "d": 4, "mean": -0.5, "variance": 1.0, "rho": 0.2},
    "problem": {"kind": "siegmund", "ell": 1.0, "u": 1.0},
    "proposal": {"variant": "theta1"},
    "run": {"b": [2, 4], "n_paths": 100, "seed": 3},
    "paper_scale": {"model": {"d": 8}, "run": {"n_paths": 1000}}
  })");
}

bool has(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }

}  // namespace

TEST_CASE("shipped presets parse") {
  namespace fs = std::filesystem;
  int n = 0;
  for (const auto& dir : {"desk", "paper"}) {
    const fs::path p = fs::path(RW_SOURCE_DIR) / "configs" / dir;
    if (!fs::exists(p)) continue;
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.path().extension() != ".json") continue;
      CAPTURE(e.path().string());
      CHECK_NOTHROW(load_config(e.path().string()));
      ++n;
    }
  }
  CHECK(n >= 10);
}

TEST_CASE("paper-scale patch") {
  const auto a = parse_config(base());
  const auto b = parse_config(base(), true);
  CHECK(a.model->dim() == 4);
  CHECK(b.model->dim() == 8);
  CHECK(b.run.n_paths == 1000);
  CHECK(b.paper_scale);
  json d = base();
  d.erase("paper_scale");
  CHECK(has(error_of(d, true), "paper_scale"));
}

TEST_CASE("errors name the field") {
  json d = base();
  d["model"]["rho"] = 1.5;
  CHECK(has(error_of(d), "model.rho"));
  d = base();
  d["run"]["b"] = json::array({4, 2});
  CHECK(has(error_of(d), "run.b"));
  d = base();
  d["problem"] = {{"kind", "gap"}};
  CHECK(has(error_of(d), "problem.m"));
  d = base();
  d["bogus"] = 1;
  CHECK(has(error_of(d), "bogus"));
  d = base();
  d["proposal"]["variant"] = "theta9";
  CHECK(has(error_of(d), "proposal.variant"));
  d = base();
  d["model"]["family"] = "cauchy";
  CHECK(has(error_of(d), "model.family"));
  d = base();
  d["run"]["n_paths"] = -3;
  CHECK(has(error_of(d), "run.n_paths"));
}

TEST_CASE("model forms") {
  const auto a = parse_model(json::parse(R"({"family":"mvnormal","mean":{"blocks":[[2,0.5],[3,-0.5]]},"variance":1.0,"rho":0.1})"));
  const auto b = parse_model(json::parse(R"({"family":"mvnormal","mean":[0.5,0.5,-0.5,-0.5,-0.5],"variance":1.0,"rho":0.1})"));
  Vec t(5);
  t << 0.1, -0.2, 0.3, 0.0, 0.4;
  CHECK(a->cgf(t) == b->cgf(t));
  const auto c = parse_model(json::parse(R"({"family":"independent","d":3,"component":{"type":"shifted_exponential","rate":2,"shift":-0.6931471805599453}})"));
  CHECK(c->dim() == 3);
  CHECK(c->marginal_root(1) == doctest::Approx(1.0));
  const auto e = parse_model(json::parse(R"({"family":"independent","blocks":[{"count":2,"type":"normal","mean":0.5,"variance":1},{"count":1,"type":"normal","mean":-0.5,"variance":2}]})"));
  CHECK(e->dim() == 3);
  CHECK(e->mean()[2] == -0.5);
}

TEST_CASE("files with comments") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "rarewalk_cfg_test.json";
  {
    std::ofstream f(p);
    f << "// desk preset\n" << base().dump() << "\n";
  }
  CHECK(load_config(p.string()).name == "t");
  fs::remove(p);
  CHECK_THROWS_AS(load_config((fs::temp_directory_path() / "no_such_rarewalk.json").string()), Error);
}
