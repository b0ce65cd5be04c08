#include "rarewalk/rarewalk.h"

#include "config.hpp"
#include "experiments.hpp"

#include <cstdlib>
#include <cstring>

struct rw_model {
  std::shared_ptr<rarewalk::Model> model;
};

struct rw_proposal {
  rarewalk::MixtureProposal proposal;
  rarewalk::EfficiencyReport report;
  rarewalk::json model_json;
};

namespace {

using namespace rarewalk;

thread_local std::string g_error;

rw_status code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return RW_ERR_INVALID_ARGUMENT;
    case ErrorCode::Dimension: return RW_ERR_DIMENSION;
    case ErrorCode::Domain: return RW_ERR_DOMAIN;
    case ErrorCode::NotConverged: return RW_ERR_NOT_CONVERGED;
    case ErrorCode::Unsupported: return RW_ERR_UNSUPPORTED;
    case ErrorCode::Limit: return RW_ERR_LIMIT;
    case ErrorCode::Parse: return RW_ERR_PARSE;
  }
  return RW_ERR_INTERNAL;
}

template <class Fn>
rw_status guard(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    return RW_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return code_of(e.code());
  } catch (const json::exception& e) {
    g_error = e.what();
    return RW_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return RW_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return RW_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const json& j) {
  if (out) *out = dup(j.dump());
}

json parse(const char* text, const char* what) {
  need(text, what);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

Vec vec(const double* x, int d, int expect) {
  need(x, "vector");
  if (d != expect) throw Error(ErrorCode::Dimension, "vector length " + std::to_string(d) + ", expected " + std::to_string(expect));
  return Eigen::Map<const Vec>(x, d);
}

SolvePath path_of(const std::string& s) {
  if (s == "auto") return SolvePath::Auto;
  if (s == "faces") return SolvePath::Faces;
  if (s == "nested") return SolvePath::Nested;
  if (s == "active_set") return SolvePath::ActiveSet;
  if (s == "homogeneous") return SolvePath::Homogeneous;
  throw Error(ErrorCode::Parse, "unknown solver path '" + s + "'");
}

RunConfig run_of(const json& j) {
  RunConfig c;
  if (j.contains("b") && j["b"].is_number()) c.b = j["b"].get<double>();
  c.n_paths = j.value("n_paths", c.n_paths);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.block = j.value("block", c.block);
  return c;
}

// Config document with every default spelled out.
json normalized(const ExperimentConfig& c) {
  json j = c.raw;
  if (c.model) {
    j["proposal"] = {{"variant", c.variant}, {"cap", c.cap}};
    if (!c.condition.empty()) j["proposal"]["condition"] = c.condition;
    if (!c.b_grid.empty())
      j["run"] = {{"b", c.b_grid},
                  {"n_paths", c.run.n_paths},
                  {"seed", c.run.seed},
                  {"workers", c.run.workers},
                  {"max_steps", c.run.max_steps},
                  {"block", c.run.block}};
    if (c.oracle) j["oracle"] = {{"b", c.oracle->b}, {"n_plain", c.oracle->n_plain}, {"n_mixture", c.oracle->n_mixture}};
  }
  j["outputs"] = {{"dir", c.out_dir}};
  j["paper_scale"] = c.paper_scale;
  return j;
}

}  // namespace

extern "C" {

const char* rw_last_error(void) { return g_error.c_str(); }

const char* rw_version(void) { return "1.0.0"; }

void rw_free_string(char* s) { std::free(s); }

rw_status rw_config_load(const char* path, int paper_scale, char** out_json) {
  return guard([&] {
    need(path, "path");
    need(out_json, "out_json");
    put(out_json, normalized(load_config(path, paper_scale != 0)));
  });
}

rw_status rw_model_create(const char* spec_json, rw_model** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    auto m = std::make_unique<rw_model>();
    m->model = parse_model(parse(spec_json, "model spec"));
    *out = m.release();
  });
}

void rw_model_destroy(rw_model* m) { delete m; }

rw_status rw_model_dim(const rw_model* m, int* out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = m->model->dim();
  });
}

rw_status rw_model_cgf(const rw_model* m, const double* theta, int d, double* out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = m->model->cgf(vec(theta, d, m->model->dim()));
  });
}

rw_status rw_model_grad(const rw_model* m, const double* theta, int d, double* out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const Vec g = m->model->grad(vec(theta, d, m->model->dim()));
    std::copy(g.data(), g.data() + d, out);
  });
}

rw_status rw_model_marginal_root(const rw_model* m, int k, double* out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = m->model->marginal_root(k);
  });
}

rw_status rw_model_describe(const rw_model* m, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(out_json, "out_json");
    json j = m->model->to_json();
    j["dim"] = m->model->dim();
    j["symmetry_classes"] = m->model->symmetry_classes();
    put(out_json, j);
  });
}

rw_status rw_rate_function(const rw_model* m, const double* x, int d, double* out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = rate_function(vec(x, d, m->model->dim()), *m->model);
  });
}

rw_status rw_classify_state(const char* problem_json, const double* x, int d, double b, int* stopped, int* rare,
                            char** out_label) {
  return guard([&] {
    need(stopped, "stopped");
    const Problem pb = parse_problem(parse(problem_json, "problem"));
    const auto r = classify_state(vec(x, d, d), b, pb);
    *stopped = r.has_value();
    if (rare) *rare = r && r->rare;
    if (out_label) *out_label = dup(r ? r->label() : "");
  });
}

rw_status rw_support_value(const char* problem_json, const double* theta, int d, const int* set, int n, double* out) {
  return guard([&] {
    need(out, "out");
    if (n > 0) need(set, "set");
    const Problem pb = parse_problem(parse(problem_json, "problem"));
    pb.validate(d);
    *out = support_value(vec(theta, d, d), std::vector<int>(set, set + n), pb);
  });
}

rw_status rw_rearrangement_min(const double* theta, int d, int L, double* out) {
  return guard([&] {
    need(out, "out");
    *out = rearrangement_min(vec(theta, d, d), L);
  });
}

rw_status rw_solve(const rw_model* m, const char* request_json, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(out_json, "out_json");
    const json req = parse(request_json, "request");
    const Problem pb = parse_problem(req.at("problem"));
    pb.validate(m->model->dim());
    SolveOptions o;
    o.path = path_of(req.value("path", std::string("auto")));
    o.symmetry = req.value("symmetry", true);
    const std::string op = req.at("op").get<std::string>();
    const auto idx = req.value("index", std::vector<int>{});
    auto at = [&](std::size_t i) {
      if (idx.size() <= i) throw Error(ErrorCode::InvalidArgument, "op " + op + " needs more indices");
      return idx[i];
    };
    const Model& mod = *m->model;
    TiltSolution s;
    if (op == "beta") s = solve_beta(mod, pb, idx, o);
    else if (op == "gamma") s = solve_gamma_single(mod, pb, at(0));
    else if (op == "gamma_pair") s = solve_gamma_pair(mod, pb, at(0), at(1), o);
    else if (op == "gap_pair") s = solve_gap_pair(mod, pb, at(0), at(1));
    else if (op == "gap_quad") s = solve_gap_quad(mod, pb, at(0), at(1), at(2), at(3), o);
    else if (op == "si_zA") s = solve_si_zA(mod, pb, idx, o);
    else if (op == "si_sB") s = solve_si_sB(mod, pb, idx, o);
    else throw Error(ErrorCode::Unsupported, "unknown op '" + op + "'");
    put(out_json, s.to_json());
  });
}

rw_status rw_v_lower_bound(const rw_model* m, const char* request_json, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(out_json, "out_json");
    const json req = parse(request_json, "request");
    const Problem pb = parse_problem(req.at("problem"));
    const auto g = req.at("gamma").get<std::vector<double>>();
    const auto w = req.at("witness").get<std::vector<double>>();
    const int d = m->model->dim();
    const auto r = v_lower_bound(*m->model, pb, req.at("set").get<std::vector<int>>(),
                                 vec(g.data(), static_cast<int>(g.size()), d), vec(w.data(), static_cast<int>(w.size()), d));
    put(out_json, r.to_json());
  });
}

rw_status rw_proposal_build(const rw_model* m, const char* request_json, rw_proposal** out, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = nullptr;
    const json req = parse(request_json, "request");
    const Problem pb = parse_problem(req.at("problem"));
    BuildOptions o;
    o.cap = req.value("cap", o.cap);
    o.workers = req.value("workers", o.workers);
    o.solve.path = path_of(req.value("path", std::string("auto")));
    const std::string variant =
        req.value("variant", std::string(pb.kind == ProblemKind::SumIntersection ? "theta_si" : "theta0"));
    BuildResult r;
    switch (pb.kind) {
      case ProblemKind::Siegmund: r = build_siegmund(*m->model, pb.ell, pb.u, variant, o); break;
      case ProblemKind::Gap: r = build_gap(*m->model, pb.m, variant, o); break;
      case ProblemKind::SumIntersection:
        if (variant != "theta_si") throw Error(ErrorCode::Unsupported, "sum-intersection proposals use variant theta_si");
        r = build_sum_intersection(*m->model, pb.L, o);
        break;
    }
    r.proposal.validate(*m->model);
    auto p = std::make_unique<rw_proposal>();
    p->proposal = std::move(r.proposal);
    p->report = r.report;
    p->model_json = m->model->to_json();
    if (out_json) {
      json sols = json::array();
      for (const auto& s : r.solutions) sols.push_back(s.to_json());
      put(out_json, {{"manifest", proposal_manifest(p->proposal, p->report, *m->model)}, {"solutions", sols}});
    }
    *out = p.release();
  });
}

rw_status rw_proposal_load(const rw_model* m, const char* manifest_json, rw_proposal** out) {
  return guard([&] {
    need(m, "model");
    need(out, "out");
    *out = nullptr;
    const json j = parse(manifest_json, "manifest");
    auto p = std::make_unique<rw_proposal>();
    p->proposal = proposal_from_manifest(j);
    p->proposal.validate(*m->model);
    p->model_json = m->model->to_json();
    if (j.contains("report")) {
      const json& r = j["report"];
      p->report.condition = r.value("condition", std::string());
      p->report.holds = r.value("holds", false);
      auto get = [](const json& x) { return x.is_number() ? x.get<double>() : std::nan(""); };
      p->report.lhs = get(r.value("lhs", json()));
      p->report.rhs = get(r.value("rhs", json()));
      p->report.r_star = get(r.value("r_star", json()));
      p->report.note = r.value("note", std::string());
    }
    *out = p.release();
  });
}

void rw_proposal_destroy(rw_proposal* p) { delete p; }

rw_status rw_proposal_size(const rw_proposal* p, size_t* out) {
  return guard([&] {
    need(p, "proposal");
    need(out, "out");
    *out = p->proposal.size();
  });
}

rw_status rw_proposal_manifest(const rw_proposal* p, char** out_json) {
  return guard([&] {
    need(p, "proposal");
    need(out_json, "out_json");
    const auto model = parse_model(p->model_json);
    put(out_json, proposal_manifest(p->proposal, p->report, *model));
  });
}

rw_status rw_check(const rw_model* m, const char* request_json, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(out_json, "out_json");
    const json req = parse(request_json, "request");
    const Problem pb = parse_problem(req.at("problem"));
    pb.validate(m->model->dim());
    BuildOptions o;
    o.cap = req.value("cap", o.cap);
    o.workers = req.value("workers", o.workers);
    const std::string cond = req.at("condition").get<std::string>();
    EfficiencyReport r;
    switch (pb.kind) {
      case ProblemKind::Siegmund: r = siegmund_condition(*m->model, pb.ell, pb.u, cond, o); break;
      case ProblemKind::Gap:
        if (cond != "H1'" && cond != "H2'") throw Error(ErrorCode::Unsupported, "gap problems check H1' or H2'");
        r = gap_condition(*m->model, pb.m, cond, o);
        break;
      case ProblemKind::SumIntersection:
        if (cond != "H-SI") throw Error(ErrorCode::Unsupported, "sum-intersection problems check H-SI");
        r = si_condition(*m->model, pb.L, o);
        break;
    }
    put(out_json, r.to_json());
  });
}

rw_status rw_estimate(const rw_model* m, const rw_proposal* p, const char* run_json, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(p, "proposal");
    need(out_json, "out_json");
    const RunConfig c = run_of(parse(run_json, "run"));
    json j = estimate_wrong_exit(*m->model, p->proposal, c).to_json();
    j["b"] = c.b;
    j["seed"] = c.seed;
    put(out_json, j);
  });
}

rw_status rw_plain_mc(const rw_model* m, const char* problem_json, const char* run_json, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(out_json, "out_json");
    const Problem pb = parse_problem(parse(problem_json, "problem"));
    const RunConfig c = run_of(parse(run_json, "run"));
    json j = plain_mc(*m->model, pb, c).to_json();
    j["b"] = c.b;
    j["seed"] = c.seed;
    put(out_json, j);
  });
}

rw_status rw_decay_scan(const rw_model* m, const rw_proposal* p, const char* run_json, char** out_json) {
  return guard([&] {
    need(m, "model");
    need(p, "proposal");
    need(out_json, "out_json");
    const json rj = parse(run_json, "run");
    const RunConfig c = run_of(rj);
    std::vector<double> grid;
    if (rj.at("b").is_array()) grid = rj["b"].get<std::vector<double>>();
    else grid = {rj["b"].get<double>()};
    const auto rows = decay_scan(*m->model, p->proposal, grid, c);
    const auto fit = fit_decay_slope(rows);
    json jr = json::array();
    long trunc = 0;
    for (const auto& r : rows) {
      json x = r.run.to_json();
      x["b"] = r.b;
      jr.push_back(x);
      trunc += r.run.truncation_count;
    }
    put(out_json, {{"rows", jr},
                   {"csv", decay_csv(rows)},
                   {"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"fit_points", fit.points},
                   {"truncations", trunc}});
  });
}

rw_status rw_table(const char* spec_json, int workers, char** out_json) {
  return guard([&] {
    need(out_json, "out_json");
    const auto t = run_table(parse(spec_json, "table"), workers);
    json j = t.to_json();
    j["csv"] = t.csv();
    put(out_json, j);
  });
}

rw_status rw_sweep(const char* spec_json, int workers, char** out_json) {
  return guard([&] {
    need(out_json, "out_json");
    const auto s = run_sweep(parse(spec_json, "sweep"), workers);
    json j = s.to_json();
    j["csv"] = s.csv();
    put(out_json, j);
  });
}

rw_status rw_modified_siegmund_count(int d, char** out_json) {
  return guard([&] {
    need(out_json, "out_json");
    put(out_json, modified_siegmund_demo(d));
  });
}

}  // extern "C"
