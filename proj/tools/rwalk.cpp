// Command-line front end. Talks to the library through the C API only.
#include "rarewalk/rarewalk.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kError = 1, kConditionFails = 2, kResidual = 3, kTruncation = 4, kOracle = 5, kMismatch = 6 };

constexpr double kResidualTol = 1e-8;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(rw_status s, const char* what) {
  if (s != RW_OK) throw Failure(std::string(what) + ": " + rw_last_error());
}

json take(char* s) {
  json j = json::parse(s);
  rw_free_string(s);
  return j;
}

struct ModelPtr {
  rw_model* p = nullptr;
  ~ModelPtr() { rw_model_destroy(p); }
};
struct ProposalPtr {
  rw_proposal* p = nullptr;
  ~ProposalPtr() { rw_proposal_destroy(p); }
};

struct Options {
  std::string config;
  std::string out = "out";
  long long seed = -1;
  int workers = 0;
  bool paper_scale = false;
  bool strict = false;
};

struct Context {
  json cfg;
  fs::path dir;
  Options opt;
};

Context load(const Options& opt) {
  Context c;
  c.opt = opt;
  char* s = nullptr;
  check(rw_config_load(opt.config.c_str(), opt.paper_scale ? 1 : 0, &s), "config");
  c.cfg = take(s);
  if (c.cfg.contains("run")) {
    if (opt.seed >= 0) c.cfg["run"]["seed"] = opt.seed;
    if (opt.workers > 0) c.cfg["run"]["workers"] = opt.workers;
  }
  c.dir = fs::path(opt.out) / c.cfg.at("name").get<std::string>();
  fs::create_directories(c.dir);
  return c;
}

int workers(const Context& c) {
  if (c.opt.workers > 0) return c.opt.workers;
  if (c.cfg.contains("run")) return c.cfg["run"].value("workers", 1);
  return 1;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Failure("cannot write " + p.string());
  f << text;
}

void write_json(const fs::path& p, const json& j) { write(p, j.dump(2) + "\n"); }

void need(const Context& c, const char* section) {
  if (!c.cfg.contains(section)) throw Failure(std::string("config has no '") + section + "' section");
}

void create_model(const Context& c, ModelPtr& m) {
  need(c, "model");
  check(rw_model_create(c.cfg["model"].dump().c_str(), &m.p), "model");
}

json build(const Context& c, const rw_model* m, ProposalPtr& p) {
  const json req = {{"problem", c.cfg["problem"]},
                    {"variant", c.cfg["proposal"]["variant"]},
                    {"cap", c.cfg["proposal"]["cap"]},
                    {"workers", workers(c)}};
  char* s = nullptr;
  check(rw_proposal_build(m, req.dump().c_str(), &p.p, &s), "proposal");
  return take(s);
}

double max_residual(const json& sols) {
  double r = 0.0;
  for (const auto& s : sols) {
    if (!s.value("converged", false)) return INFINITY;
    const auto& x = s["residual"];
    r = std::max(r, x.is_number() ? x.get<double>() : INFINITY);
  }
  return r;
}

void banner(const json& manifest) {
  if (manifest.contains("warning")) std::cerr << "warning: " << manifest["warning"].get<std::string>() << "\n";
}

int cmd_solve(const Context& c) {
  ModelPtr m;
  create_model(c, m);
  ProposalPtr p;
  const json b = build(c, m.p, p);
  write_json(c.dir / "solutions.json", b["solutions"]);
  write_json(c.dir / "proposal.json", b["manifest"]);
  banner(b["manifest"]);
  const double res = max_residual(b["solutions"]);
  std::cout << "solve " << c.cfg["name"].get<std::string>() << ": " << b["manifest"]["size"] << " tilts, r_star "
            << b["manifest"]["r_star"] << ", max residual " << res << "\n";
  if (c.opt.strict && !(res <= kResidualTol)) return kResidual;
  if (c.opt.strict && !b["manifest"]["report"]["holds"].get<bool>()) return kConditionFails;
  return kOk;
}

int cmd_check(const Context& c) {
  ModelPtr m;
  create_model(c, m);
  const json& prop = c.cfg["proposal"];
  json report;
  if (prop.contains("condition")) {
    const json req = {{"problem", c.cfg["problem"]},
                      {"condition", prop["condition"]},
                      {"cap", prop["cap"]},
                      {"workers", workers(c)}};
    char* s = nullptr;
    check(rw_check(m.p, req.dump().c_str(), &s), "check");
    report = take(s);
  } else {
    ProposalPtr p;
    const json b = build(c, m.p, p);
    report = b["manifest"]["report"];
    if (c.opt.strict && !(max_residual(b["solutions"]) <= kResidualTol)) {
      write_json(c.dir / "report.json", report);
      return kResidual;
    }
  }
  write_json(c.dir / "report.json", report);
  const bool holds = report.value("holds", false);
  std::cout << "check " << c.cfg["name"].get<std::string>() << ": condition " << report["condition"].get<std::string>()
            << (holds ? " holds" : " fails") << " (lhs " << report["lhs"] << ", rhs " << report["rhs"] << ")\n";
  return holds ? kOk : kConditionFails;
}

int cmd_run(const Context& c) {
  need(c, "run");
  ModelPtr m;
  create_model(c, m);
  ProposalPtr p;
  const auto t0 = std::chrono::steady_clock::now();
  const json b = build(c, m.p, p);
  write_json(c.dir / "proposal.json", b["manifest"]);
  banner(b["manifest"]);
  char* s = nullptr;
  check(rw_decay_scan(m.p, p.p, c.cfg["run"].dump().c_str(), &s), "run");
  json scan = take(s);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write(c.dir / "decay.csv", scan["csv"].get<std::string>());
  scan.erase("csv");
  const json out = {{"config", c.cfg}, {"r_star", b["manifest"]["r_star"]}, {"scan", scan}};
  write_json(c.dir / "run.json", out);
  write_json(c.dir / "timing.json", {{"command", "run"}, {"wall_seconds", wall}});
  for (const auto& r : scan["rows"])
    std::cout << "b " << r["b"] << "  p_hat " << r["p_hat"] << "  rel_err " << r["relative_error"] << "  truncations "
              << r["truncation_count"] << "\n";
  std::cout << "slope " << scan["slope"] << " vs r_star " << b["manifest"]["r_star"] << "\n";
  if (c.opt.strict && scan["truncations"].get<long>() > 0) return kTruncation;
  if (c.opt.strict && !(max_residual(b["solutions"]) <= kResidualTol)) return kResidual;
  if (c.opt.strict && !b["manifest"]["report"]["holds"].get<bool>()) return kConditionFails;
  return kOk;
}

int cmd_oracle(const Context& c) {
  need(c, "oracle");
  need(c, "run");
  ModelPtr m;
  create_model(c, m);
  ProposalPtr p;
  const json b = build(c, m.p, p);
  const json& o = c.cfg["oracle"];
  json run = c.cfg["run"];
  run["b"] = o["b"];
  run["n_paths"] = o["n_mixture"];
  char* s = nullptr;
  check(rw_estimate(m.p, p.p, run.dump().c_str(), &s), "mixture estimate");
  const json mix = take(s);
  run["n_paths"] = o["n_plain"];
  run["seed"] = run["seed"].get<unsigned long long>() + 1;
  check(rw_plain_mc(m.p, c.cfg["problem"].dump().c_str(), run.dump().c_str(), &s), "plain estimate");
  const json plain = take(s);
  const double se = std::hypot(mix["std_error"].get<double>(), plain["std_error"].get<double>());
  const double diff = mix["p_hat"].get<double>() - plain["p_hat"].get<double>();
  const double z = se > 0 ? diff / se : (diff == 0 ? 0.0 : INFINITY);
  const long trunc = mix["truncation_count"].get<long>() + plain["truncation_count"].get<long>();
  write_json(c.dir / "oracle.json", {{"mixture", mix}, {"plain", plain}, {"z", z}, {"truncations", trunc}});
  std::cout << "oracle " << c.cfg["name"].get<std::string>() << ": mixture " << mix["p_hat"] << " plain "
            << plain["p_hat"] << " z " << z << "\n";
  if (c.opt.strict && trunc > 0) return kTruncation;
  if (c.opt.strict && !(std::abs(z) <= 3.0)) return kOracle;
  return kOk;
}

int cmd_table(const Context& c) {
  need(c, "table");
  char* s = nullptr;
  check(rw_table(c.cfg["table"].dump().c_str(), workers(c), &s), "table");
  json t = take(s);
  write(c.dir / "table.csv", t["csv"].get<std::string>());
  t.erase("csv");
  write_json(c.dir / "table.json", t);
  std::cout << "u      H1     H2     direct\n";
  for (std::size_t i = 0; i < t["u"].size(); ++i)
    std::cout << t["u"][i] << "  " << t["H1"][i] << "  " << t["H2"][i] << "  " << t["direct"][i] << "\n";
  const json& exp = c.cfg["table"].value("expected", json());
  if (c.opt.strict && exp.is_object()) {
    for (const char* k : {"H1", "H2", "direct"})
      if (exp.contains(k))
        for (std::size_t i = 0; i < t[k].size(); ++i)
          if (std::abs(exp[k][i].get<double>() - t[k][i].get<double>()) > 1e-9) return kMismatch;
  }
  return kOk;
}

int cmd_sweep(const Context& c) {
  need(c, "sweep");
  char* s = nullptr;
  check(rw_sweep(c.cfg["sweep"].dump().c_str(), workers(c), &s), "sweep");
  json t = take(s);
  write(c.dir / "sweep.csv", t["csv"].get<std::string>());
  t.erase("csv");
  write_json(c.dir / "sweep.json", t);
  std::cout << "sweep " << t["kind"].get<std::string>() << ": " << t["summary"].dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Importance sampling for wrong-exit probabilities of multidimensional random walks"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "override run.seed");
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--paper-scale", opt.paper_scale, "apply the preset's paper-scale section");
    sub->add_flag("--strict", opt.strict, "nonzero exit on truncation, residual > 1e-8 or failed condition");
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const Cmd cmds[] = {{"solve", "compute tilts and write the proposal manifest", cmd_solve},
                      {"check", "evaluate the sufficient condition", cmd_check},
                      {"run", "estimate wrong-exit probabilities over the b grid", cmd_run},
                      {"oracle", "compare the mixture estimator with plain Monte Carlo", cmd_oracle},
                      {"table", "reproduce the maximal-rho condition table", cmd_table},
                      {"sweep", "parameter sweeps behind the figures", cmd_sweep}};
  for (const auto& c : cmds) add_common(app.add_subcommand(c.name, c.help));
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& c : cmds)
      if (app.got_subcommand(c.name)) return c.fn(load(opt));
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
