// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.
#include "config.hpp"
#include "experiments.hpp"
#include "lp_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace rarewalk;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string preset(const std::string& name) { return std::string(RW_SOURCE_DIR) + "/configs/desk/" + name + ".json"; }

BuildResult build(const ExperimentConfig& c) {
  const BuildOptions o = c.build_options();
  switch (c.problem.kind) {
    case ProblemKind::Siegmund: return build_siegmund(*c.model, c.problem.ell, c.problem.u, c.variant, o);
    case ProblemKind::Gap: return build_gap(*c.model, c.problem.m, c.variant, o);
    case ProblemKind::SumIntersection: return build_sum_intersection(*c.model, c.problem.L, o);
  }
  throw Error(ErrorCode::Unsupported, "problem");
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i < b; ++i) v.push_back(i);
  return v;
}

void c1(Outcome& o) {
  double worst = 0.0;
  for (int i = 0; i <= 9; ++i) {
    const double rho = i / 10.0;
    auto m = MvNormalModel::exchangeable(50, -0.5, 1.0, rho);
    for (double u : {3.0, 2.0, 1.0, 0.5, 1.0 / 3}) {
      const Problem pb = Problem::siegmund(1.0, u);
      worst = std::max(worst, std::abs(solve_gamma_single(*m, pb, 0).value - u));
      worst = std::max(worst, std::abs(solve_gamma_pair(*m, pb, 0, 1).value - 2 * u / (1 + rho)));
    }
  }
  o.detail << "max deviation " << worst;
  o.require(worst <= 1e-8, "closed forms");
}

void c2(Outcome& o) {
  const json spec = load_config(preset("table_siegmund")).table;
  const ConditionTable t = run_table(spec);
  const json& exp = spec.at("expected");
  int match = 0;
  for (std::size_t i = 0; i < t.u.size(); ++i) {
    match += std::abs(t.h1[i] - exp["H1"][i].get<double>()) < 1e-9;
    match += std::abs(t.h2[i] - exp["H2"][i].get<double>()) < 1e-9;
    match += std::abs(t.direct[i] - exp["direct"][i].get<double>()) < 1e-9;
  }
  o.detail << match << "/15 entries match";
  o.require(match == 15, "table entries");
}

void c3(Outcome& o) {
  const Scalar s = Scalar::shifted_exponential(2.0, -std::log(2.0));
  const HomogeneousTable t = homogeneous_siegmund(s, 400, 1.0, 1.0);
  IndependentModel m(std::vector<Scalar>(400, s));
  const TiltSolution b = solve_beta(m, Problem::siegmund(1, 1), {0});
  o.detail << "z " << t.z << ", kappa0 " << t.kappa0 << ", kappa1 " << t.kappa1 << ", beta " << b.tilt[0] << " / "
           << b.tilt[1];
  o.require(std::abs(t.z - 1.0) <= 1e-12, "z");
  o.require(std::abs(t.kappa0 - 0.1931) <= 1e-3 && std::abs(t.kappa1 - 0.307) <= 1e-3, "kappa");
  o.require(b.converged && std::abs(b.tilt[0] - 0.8718) <= 1e-4 && std::abs(b.tilt[1] + 4.1194e-4) <= 1e-4, "beta");
}

void c4(Outcome& o) {
  double worst = 0.0;
  for (double v : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    std::vector<Scalar> c;
    for (int i = 0; i < 10; ++i) c.push_back(i < 5 ? Scalar::normal(0.5, 1.0) : Scalar::normal(-0.5, v));
    IndependentModel m(c);
    const Problem pb = Problem::gap(5);
    worst = std::max(worst, std::abs(solve_gap_pair(m, pb, 0, 7).value - 2 / (1 + v)));
    worst = std::max(worst, std::abs(solve_gap_quad(m, pb, 0, 1, 6, 8).value - 4 / (1 + v)));
  }
  for (int L : {2, 3})
    for (double rho : {0.0, 0.1, 0.2, 0.5}) {
      auto m = MvNormalModel::exchangeable(50, -0.5, 1.0, rho);
      const Problem pb = Problem::sum_intersection(L);
      worst = std::max(worst, std::abs(solve_si_zA(*m, pb, range(0, L)).value - 1 / (rho * L + 1 - rho)));
      worst = std::max(worst, std::abs(solve_si_sB(*m, pb, range(0, L + 1)).value -
                                       (L + 1.0) / (L * (rho * (L + 1) + 1 - rho))));
    }
  o.detail << "max deviation " << worst;
  o.require(worst <= 1e-8, "closed forms");
  const SweepResult s = sweep_si_rho(50, {2, 3}, rho_grid(0.01, 0.9));
  const double b2 = s.summary.at("max_rho_H-SI").at("2").get<double>(), b3 = s.summary.at("max_rho_H-SI").at("3").get<double>();
  o.detail << "; H-SI boundaries " << b2 << " (L=2), " << b3 << " (L=3)";
  o.require(std::abs(b2 - 0.23) < 1e-9 && std::abs(b3 - 0.14) < 1e-9, "H-SI boundaries");
}

void c5(Outcome& o) {
  for (const char* name : {"oracle_siegmund_small", "oracle_gap_small", "oracle_si_small"}) {
    const ExperimentConfig c = load_config(preset(name));
    const BuildResult b = build(c);
    RunConfig r = c.run;
    r.b = c.oracle->b;
    r.n_paths = c.oracle->n_mixture;
    const EstimatorRun mix = estimate_wrong_exit(*c.model, b.proposal, r);
    r.n_paths = c.oracle->n_plain;
    r.seed += 1;
    const EstimatorRun plain = plain_mc(*c.model, c.problem, r);
    const double z = (mix.mean - plain.mean) / std::hypot(mix.std_error, plain.std_error);
    o.detail << c.problem.name() << " d=" << c.model->dim() << " p " << plain.mean << " z " << z << "; ";
    o.require(c.model->dim() <= 4, "instance size");
    o.require(plain.mean >= 1e-3 && plain.mean <= 1e-2, std::string(name) + " p outside [1e-3, 1e-2]");
    o.require(c.oracle->n_plain >= 1000000 && c.oracle->n_plain <= 10000000, "plain path count");
    o.require(std::abs(z) <= 3.0, std::string(name) + " |z| > 3");
    o.require(mix.truncation_count == 0 && plain.truncation_count == 0, "truncations");
  }
}

void c6(Outcome& o) {
  const ExperimentConfig c = load_config(preset("siegmund_iid_exponential"));
  const BuildResult b = build(c);
  RunConfig r = c.run;
  r.n_paths = 10000;
  const auto rows = decay_scan(*c.model, b.proposal, {20, 30, 40, 50, 60, 70}, r);
  const SlopeFit f = fit_decay_slope(rows);
  const double rel = std::abs(f.slope - b.report.r_star) / b.report.r_star;
  long trunc = 0;
  for (const auto& row : rows) trunc += row.run.truncation_count;
  o.detail << "d=" << c.model->dim() << " slope " << f.slope << " vs r_star " << b.report.r_star << " (" << rel * 100
           << "%)";
  o.require(c.model->dim() == 20 && c.variant == "theta0", "preset");
  o.require(f.points == 6 && rel <= 0.05, "slope");
  o.require(trunc == 0, "truncations");
}

void c7(Outcome& o) {
  const std::pair<const char*, std::vector<double>> runs[] = {{"siegmund_correlated_normal", {5, 10, 15}},
                                                              {"siegmund_iid_exponential", {6, 12, 18}},
                                                              {"gap_exchangeable_normal", {6, 12, 18}},
                                                              {"si_exchangeable_normal", {8, 14, 20}}};
  for (const auto& [name, grid] : runs) {
    const ExperimentConfig c = load_config(preset(name));
    const BuildResult b = build(c);
    RunConfig r = c.run;
    r.n_paths = 100000;
    const auto rows = decay_scan(*c.model, b.proposal, grid, r);
    double worst = 0.0, smallest = 1.0;
    long trunc = 0;
    for (const auto& row : rows) {
      worst = std::max(worst, row.run.relative_error);
      smallest = std::min(smallest, row.run.mean);
      trunc += row.run.truncation_count;
    }
    o.detail << name << ": p down to " << smallest << ", max rel err " << worst << "; ";
    o.require(b.report.holds, std::string(name) + " condition");
    o.require(smallest <= 1e-8 && smallest > 0.0, std::string(name) + " did not reach 1e-8");
    o.require(worst <= 0.05, std::string(name) + " relative error");
    o.require(trunc == 0, std::string(name) + " truncations");
  }
}

void c8(Outcome& o) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  double worst = 0.0;
  for (int it = 0; it < 500; ++it) {
    const int d = std::uniform_int_distribution<int>(1, 6)(gen);
    const int L = std::uniform_int_distribution<int>(1, std::min(4, d))(gen);
    std::vector<double> th(d);
    for (auto& v : th) v = U(gen);
    const double a = rearrangement_min(Eigen::Map<Vec>(th.data(), d), L);
    worst = std::max(worst, std::abs(a - lp_oracle::rearrangement_lp(th, L)));
  }
  o.detail << "500 instances, max deviation " << worst;
  o.require(worst <= 1e-9, "LP oracle");
}

void c9(Outcome& o) {
  // cgf gradient against central differences
  IndependentModel mixed({Scalar::normal(-0.5, 1.0), Scalar::shifted_exponential(2.0, -std::log(2.0)),
                          Scalar::normal(0.3, 2.0)});
  auto corr = MvNormalModel::exchangeable(3, -0.5, 1.0, 0.4);
  Vec th(3);
  th << 0.3, 0.5, -0.2;
  double fd = 0.0;
  for (const Model* m : {static_cast<const Model*>(&mixed), static_cast<const Model*>(corr.get())})
    for (int i = 0; i < 3; ++i) {
      Vec e = Vec::Zero(3);
      e[i] = 1e-5;
      fd = std::max(fd, std::abs((m->cgf(th + e) - m->cgf(th - e)) / 2e-5 - m->grad(th)[i]));
    }
  o.detail << "fd " << fd;
  o.require(fd < 1e-7, "gradient");

  // change of measure: E_theta[exp(-theta.X + Lambda) 1{X_0 > 0}] = P(X_0 > 0)
  const double lam = corr->cgf(th);
  const auto smp = corr->tilted(th);
  Welford w;
  std::vector<double> x(3);
  for (int i = 0; i < 200000; ++i) {
    Stream s = make_stream(9, static_cast<std::uint64_t>(i));
    smp->draw(s, x.data());
    w.add(x[0] > 0 ? std::exp(-(th[0] * x[0] + th[1] * x[1] + th[2] * x[2]) + lam) : 0.0);
  }
  const double exact = 0.5 * std::erfc(0.5 / std::sqrt(2.0));
  const double z = (w.mean - exact) / std::sqrt(w.m2 / (w.n - 1) / w.n);
  o.detail << ", change-of-measure z " << z;
  o.require(std::abs(z) < 4.0, "change of measure");

  // homogeneous ordering
  bool mono = true;
  for (double u : {0.004, 0.5, 1.0}) {
    const HomogeneousTable t = homogeneous_siegmund(Scalar::normal(-0.5, 1.0), 50, 1.0, u);
    const auto& p = t.points;
    mono = mono && std::abs(p.back().vplus - t.z) < 1e-12;
    for (int a = 1; a < 50; ++a) mono = mono && p[a - 1].vplus <= p[a].vplus + 1e-12;
    for (int a = 1; a < 49; ++a) mono = mono && -p[a - 1].vminus <= -p[a].vminus + 1e-12;
    mono = mono && p[0].vplus >= 49 * -p[0].vminus - 1e-12;
  }
  o.require(mono, "homogeneous ordering");

  // dominance chains
  bool dom = true;
  Vec mu(4);
  mu << -0.5, -0.8, -0.3, -1.0;
  Mat S(4, 4);
  S << 1.0, 0.2, 0.1, 0.0, 0.2, 1.5, 0.3, 0.1, 0.1, 0.3, 0.8, -0.1, 0.0, 0.1, -0.1, 1.2;
  MvNormalModel m4(mu, S);
  for (double u : {0.5, 2.0}) {
    const Problem pb = Problem::siegmund(1.0, u);
    for (int k = 0; k < 4; ++k)
      for (int k2 = k + 1; k2 < 4; ++k2)
        dom = dom && std::max(solve_gamma_single(m4, pb, k).value, solve_gamma_single(m4, pb, k2).value) <=
                         solve_gamma_pair(m4, pb, k, k2).value + 1e-10;
  }
  for (double v : {0.1, 1.0, 10.0}) {
    IndependentModel g({Scalar::normal(0.5, 1.0), Scalar::normal(0.5, 1.0), Scalar::normal(-0.5, v),
                        Scalar::normal(-0.5, v)});
    dom = dom && solve_gap_pair(g, Problem::gap(2), 0, 2).value <= solve_gap_quad(g, Problem::gap(2), 0, 1, 2, 3).value + 1e-10;
  }
  o.require(dom, "dominance");

  // worker count does not change results
  const auto b = build_siegmund(*MvNormalModel::exchangeable(5, -0.5, 1.0, 0.2), 1.0, 1.0, "theta1");
  auto m5 = MvNormalModel::exchangeable(5, -0.5, 1.0, 0.2);
  RunConfig r;
  r.b = 5.0;
  r.n_paths = 5000;
  r.seed = 99;
  r.workers = 1;
  const auto a1 = estimate_wrong_exit(*m5, b.proposal, r);
  r.workers = 4;
  const auto a4 = estimate_wrong_exit(*m5, b.proposal, r);
  o.require(a1.mean == a4.mean && a1.std_error == a4.std_error && a1.exit_tally == a4.exit_tally, "determinism");
}

void c10(Outcome& o) {
  const HomogeneousTable t = homogeneous_siegmund(Scalar::normal(-0.5, 1.0), 50, 1.0, 0.004);
  o.detail << "r_{1} " << t.points.front().rate << ", r_[d] " << t.points.back().rate;
  o.require(std::abs(t.points.front().rate - 0.2507) <= 1e-3, "r_{1}");
  o.require(std::abs(t.points.back().rate - 0.2) <= 1e-9, "r_[d]");
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* title;
    double budget;  // seconds
    std::function<void(Outcome&)> fn;
  };
  const Item items[] = {{1, "closed-form Siegmund tilts", 1, c1},
                        {2, "maximal-rho table", 120, c2},
                        {3, "exponential-coordinate solver values", 10, c3},
                        {4, "gap and sum-intersection closed forms", 60, c4},
                        {5, "unbiasedness against plain Monte Carlo", 300, c5},
                        {6, "decay slope", 120, c6},
                        {7, "relative error down to 1e-8", 600, c7},
                        {8, "rearrangement LP oracle", 10, c8},
                        {9, "invariant suites", 600, c9},
                        {10, "small-u rates", 30, c10}};
  int failed = 0;
  for (const auto& it : items) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it.fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= it.budget, "runtime budget");
    std::printf("criterion %d: %s - %s: %s (%.2f s)\n", it.id, o.pass ? "PASS" : "FAIL", it.title, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
