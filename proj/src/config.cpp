#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rarewalk {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::Parse, path + ": " + msg);
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive(const json& j, const std::string& path) {
  const double x = number(j, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

long integer(const json& j, const std::string& path, long lo) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const long x = j.get<long>();
  if (x < lo) fail(path, "must be at least " + std::to_string(lo));
  return x;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) fail(path + "." + it.key(), "unknown field");
}

Vec parse_mean(const json& j, int d, const std::string& path) {
  if (j.is_number()) {
    if (d < 1) fail(path, "scalar mean needs a dimension d");
    return Vec::Constant(d, number(j, path));
  }
  if (j.is_array()) {
    Vec m(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) m[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
    return m;
  }
  if (j.is_object()) {
    const json& blocks = field(j, path, "blocks");
    if (!blocks.is_array() || blocks.empty()) fail(path + ".blocks", "expected a non-empty array");
    std::vector<double> v;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string p = path + ".blocks[" + std::to_string(i) + "]";
      if (!blocks[i].is_array() || blocks[i].size() != 2) fail(p, "expected [count, value]");
      const long c = integer(blocks[i][0], p + "[0]", 1);
      const double x = number(blocks[i][1], p + "[1]");
      v.insert(v.end(), static_cast<std::size_t>(c), x);
    }
    return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  fail(path, "expected a number, an array or {\"blocks\": ...}");
}

// RFC 7386 merge patch.
void merge_patch(json& target, const json& patch) {
  if (!patch.is_object()) {
    target = patch;
    return;
  }
  if (!target.is_object()) target = json::object();
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_null()) target.erase(it.key());
    else merge_patch(target[it.key()], it.value());
  }
}

}  // namespace

Scalar parse_component(const json& j, const std::string& path) {
  const std::string type = text(field(j, path, "type"), path + ".type");
  try {
    if (type == "normal") {
      only_keys(j, path, {"type", "mean", "variance", "count"});
      return Scalar::normal(number(field(j, path, "mean"), path + ".mean"),
                            positive(field(j, path, "variance"), path + ".variance"));
    }
    if (type == "shifted_exponential") {
      only_keys(j, path, {"type", "rate", "shift", "count"});
      return Scalar::shifted_exponential(positive(field(j, path, "rate"), path + ".rate"),
                                         number(field(j, path, "shift"), path + ".shift"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    fail(path, e.what());
  }
  fail(path + ".type", "unknown component type '" + type + "'");
}

std::shared_ptr<Model> parse_model(const json& j, const std::string& path) {
  const std::string family = text(field(j, path, "family"), path + ".family");
  try {
    if (family == "mvnormal") {
      only_keys(j, path, {"family", "d", "mean", "cov", "variance", "rho"});
      const int d = j.contains("d") ? static_cast<int>(integer(j["d"], path + ".d", 1)) : 0;
      Vec mean = parse_mean(field(j, path, "mean"), d, path + ".mean");
      if (d > 0 && mean.size() != d) fail(path + ".mean", "length does not match d");
      const int n = static_cast<int>(mean.size());
      Mat cov;
      if (j.contains("cov")) {
        if (j.contains("rho") || j.contains("variance")) fail(path, "give either cov or variance/rho, not both");
        const json& c = j["cov"];
        if (!c.is_array() || static_cast<int>(c.size()) != n) fail(path + ".cov", "expected a d x d array");
        cov.resize(n, n);
        for (int r = 0; r < n; ++r) {
          if (!c[r].is_array() || static_cast<int>(c[r].size()) != n) fail(path + ".cov[" + std::to_string(r) + "]", "expected d entries");
          for (int s = 0; s < n; ++s) cov(r, s) = number(c[r][s], path + ".cov[" + std::to_string(r) + "][" + std::to_string(s) + "]");
        }
      } else {
        const double var = positive(field(j, path, "variance"), path + ".variance");
        const double rho = j.contains("rho") ? number(j["rho"], path + ".rho") : 0.0;
        if (!(rho > -1.0 / std::max(1, n - 1) - 1e-15 && rho < 1.0)) fail(path + ".rho", "outside the positive definite range");
        cov = Mat::Constant(n, n, rho * var);
        cov.diagonal().setConstant(var);
      }
      return std::make_shared<MvNormalModel>(mean, cov);
    }
    if (family == "independent") {
      only_keys(j, path, {"family", "d", "component", "components", "blocks"});
      std::vector<Scalar> comps;
      if (j.contains("components")) {
        const json& c = j["components"];
        if (!c.is_array() || c.empty()) fail(path + ".components", "expected a non-empty array");
        for (std::size_t i = 0; i < c.size(); ++i) comps.push_back(parse_component(c[i], path + ".components[" + std::to_string(i) + "]"));
      } else if (j.contains("blocks")) {
        const json& c = j["blocks"];
        if (!c.is_array() || c.empty()) fail(path + ".blocks", "expected a non-empty array");
        for (std::size_t i = 0; i < c.size(); ++i) {
          const std::string p = path + ".blocks[" + std::to_string(i) + "]";
          const long cnt = integer(field(c[i], p, "count"), p + ".count", 1);
          comps.insert(comps.end(), static_cast<std::size_t>(cnt), parse_component(c[i], p));
        }
      } else {
        const long d = integer(field(j, path, "d"), path + ".d", 1);
        comps.assign(static_cast<std::size_t>(d), parse_component(field(j, path, "component"), path + ".component"));
      }
      if (j.contains("d") && !j.contains("component") && static_cast<long>(comps.size()) != j["d"].get<long>())
        fail(path + ".d", "does not match the number of components");
      return std::make_shared<IndependentModel>(comps);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    fail(path, e.what());
  }
  fail(path + ".family", "unknown model family '" + family + "'");
}

Problem parse_problem(const json& j, const std::string& path) {
  const std::string kind = text(field(j, path, "kind"), path + ".kind");
  if (kind == "siegmund") {
    only_keys(j, path, {"kind", "ell", "u"});
    return Problem::siegmund(positive(field(j, path, "ell"), path + ".ell"), positive(field(j, path, "u"), path + ".u"));
  }
  if (kind == "gap") {
    only_keys(j, path, {"kind", "m"});
    return Problem::gap(static_cast<int>(integer(field(j, path, "m"), path + ".m", 1)));
  }
  if (kind == "sum_intersection") {
    only_keys(j, path, {"kind", "L"});
    return Problem::sum_intersection(static_cast<int>(integer(field(j, path, "L"), path + ".L", 1)));
  }
  fail(path + ".kind", "unknown problem kind '" + kind + "'");
}

BuildOptions ExperimentConfig::build_options() const {
  BuildOptions o;
  o.cap = cap;
  o.workers = run.workers;
  return o;
}

ExperimentConfig parse_config(const json& input, bool paper_scale) {
  if (!input.is_object()) fail("$", "expected an object");
  json doc = input;
  if (paper_scale) {
    if (!doc.contains("paper_scale")) fail("paper_scale", "this preset has no paper-scale section");
    merge_patch(doc, doc["paper_scale"]);
  }
  doc.erase("paper_scale");
  only_keys(doc, "$", {"name", "model", "problem", "proposal", "run", "oracle", "table", "sweep", "outputs", "description"});
  ExperimentConfig c;
  c.raw = doc;
  c.paper_scale = paper_scale;
  c.name = text(field(doc, "$", "name"), "name");
  if (doc.contains("table")) c.table = doc["table"];
  if (doc.contains("sweep")) c.sweep = doc["sweep"];
  if (doc.contains("outputs")) {
    only_keys(doc["outputs"], "outputs", {"dir"});
    if (doc["outputs"].contains("dir")) c.out_dir = text(doc["outputs"]["dir"], "outputs.dir");
  }
  // Table and sweep presets describe their own models.
  if (!doc.contains("model")) {
    if (c.table.is_null() && c.sweep.is_null()) fail("model", "missing");
    return c;
  }
  c.model_spec = doc["model"];
  c.model = parse_model(doc["model"], "model");
  const int d = c.model->dim();
  c.problem = parse_problem(field(doc, "$", "problem"), "problem");
  try {
    c.problem.validate(d);
  } catch (const Error& e) {
    fail("problem", e.what());
  }
  c.variant = c.problem.kind == ProblemKind::SumIntersection ? "theta_si" : "theta0";
  if (doc.contains("proposal")) {
    const json& p = doc["proposal"];
    only_keys(p, "proposal", {"variant", "condition", "cap"});
    if (p.contains("variant")) c.variant = text(p["variant"], "proposal.variant");
    if (p.contains("condition")) c.condition = text(p["condition"], "proposal.condition");
    if (p.contains("cap")) c.cap = static_cast<std::size_t>(integer(p["cap"], "proposal.cap", 1));
  }
  const std::set<std::string> variants = c.problem.kind == ProblemKind::SumIntersection
                                             ? std::set<std::string>{"theta_si"}
                                             : std::set<std::string>{"theta0", "theta1", "theta2"};
  if (!variants.count(c.variant)) fail("proposal.variant", "unsupported variant '" + c.variant + "' for this problem");
  if (doc.contains("run")) {
    const json& r = doc["run"];
    only_keys(r, "run", {"b", "n_paths", "seed", "workers", "max_steps", "block"});
    const json& b = field(r, "run", "b");
    if (b.is_number()) {
      c.b_grid.push_back(positive(b, "run.b"));
    } else if (b.is_array() && !b.empty()) {
      for (std::size_t i = 0; i < b.size(); ++i) c.b_grid.push_back(positive(b[i], "run.b[" + std::to_string(i) + "]"));
      for (std::size_t i = 1; i < c.b_grid.size(); ++i)
        if (!(c.b_grid[i] > c.b_grid[i - 1])) fail("run.b", "must be strictly ascending");
    } else {
      fail("run.b", "expected a positive number or an ascending array");
    }
    c.run.b = c.b_grid.front();
    if (r.contains("n_paths")) c.run.n_paths = static_cast<std::size_t>(integer(r["n_paths"], "run.n_paths", 1));
    if (r.contains("seed")) c.run.seed = static_cast<std::uint64_t>(integer(r["seed"], "run.seed", 0));
    if (r.contains("workers")) c.run.workers = static_cast<int>(integer(r["workers"], "run.workers", 1));
    if (r.contains("max_steps")) c.run.max_steps = integer(r["max_steps"], "run.max_steps", 0);
    if (r.contains("block")) c.run.block = static_cast<std::size_t>(integer(r["block"], "run.block", 1));
  }
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    only_keys(o, "oracle", {"b", "n_plain", "n_mixture"});
    OracleSpec s;
    s.b = positive(field(o, "oracle", "b"), "oracle.b");
    if (o.contains("n_plain")) s.n_plain = static_cast<std::size_t>(integer(o["n_plain"], "oracle.n_plain", 2));
    if (o.contains("n_mixture")) s.n_mixture = static_cast<std::size_t>(integer(o["n_mixture"], "oracle.n_mixture", 2));
    c.oracle = s;
  }
  return c;
}

json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + file);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, file + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& file, bool paper_scale) {
  return parse_config(read_json_file(file), paper_scale);
}

}  // namespace rarewalk
