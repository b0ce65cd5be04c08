#include "experiments.hpp"

#include "config.hpp"
#include "format.hpp"
#include "parallel.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace rarewalk {

namespace {

json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

double largest_holding(const std::vector<double>& grid, const std::vector<char>& ok) {
  double best = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (ok[i]) best = grid[i];
  return best;
}

std::unique_ptr<IndependentModel> gap_normals(int d, int m, double v) {
  std::vector<Scalar> c;
  for (int i = 0; i < d; ++i) c.push_back(i < m ? Scalar::normal(0.5, 1.0) : Scalar::normal(-0.5, v));
  return std::make_unique<IndependentModel>(c);
}

// Refines a sign change of f on [a, b] by bisection.
double bisect(const std::function<double(double)>& f, double a, double b, double fa) {
  for (int it = 0; it < 100 && (b - a) > 1e-10 * std::max(1.0, std::abs(a)); ++it) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fc >= 0) == (fa >= 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw Error(ErrorCode::Parse, path + ": expected a number or an array");
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorCode::Parse, path + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> grid_from(const json& spec, const std::string& path) {
  if (spec.contains("grid")) return numbers(spec["grid"], path + ".grid");
  return rho_grid(spec.value("grid_step", 0.01), spec.value("grid_max", 0.9));
}

}  // namespace

std::vector<double> rho_grid(double step, double max) {
  if (!(step > 0.0) || !(max >= 0.0)) throw Error(ErrorCode::InvalidArgument, "grid needs step > 0 and max >= 0");
  std::vector<double> g;
  const long n = std::lround(max / step);
  for (long i = 0; i <= n; ++i) g.push_back(std::round(static_cast<double>(i) * step * 1e12) / 1e12);
  return g;
}

ConditionTable table_siegmund(int d, double ell, const std::vector<double>& us, const std::vector<double>& grid,
                              int workers) {
  ConditionTable t;
  t.d = d;
  t.ell = ell;
  t.u = us;
  for (double u : us) {
    std::vector<char> h1(grid.size()), h2(grid.size()), dir(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
      const auto model = MvNormalModel::exchangeable(d, -0.5, 1.0, grid[i]);
      h1[i] = siegmund_condition(*model, ell, u, "H1").holds;
      h2[i] = siegmund_condition(*model, ell, u, "H2").holds;
      dir[i] = check_direct_siegmund_homogeneous(*model, ell, u).holds;
    });
    t.h1.push_back(largest_holding(grid, h1));
    t.h2.push_back(largest_holding(grid, h2));
    t.direct.push_back(largest_holding(grid, dir));
  }
  return t;
}

json ConditionTable::to_json() const {
  return {{"d", d}, {"ell", ell}, {"u", u}, {"H1", h1}, {"H2", h2}, {"direct", direct}};
}

std::string ConditionTable::csv() const {
  std::ostringstream os;
  os << "u,max_rho_H1,max_rho_H2,max_rho_direct\n";
  for (std::size_t i = 0; i < u.size(); ++i) os << fmt(u[i]) << ',' << fmt(h1[i]) << ',' << fmt(h2[i]) << ',' << fmt(direct[i]) << '\n';
  return os.str();
}

std::string SweepResult::csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << '\n';
  }
  return os.str();
}

json SweepResult::to_json() const {
  json rs = json::array();
  for (const auto& r : rows) {
    json row = json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = num(r[i]);
    rs.push_back(row);
  }
  return {{"kind", kind}, {"summary", summary}, {"rows", rs}};
}

SweepResult sweep_siegmund_rho(int d, double ell, double u, const std::vector<double>& grid, int workers) {
  SweepResult s;
  s.kind = "siegmund_rho";
  s.columns = {"rho", "r", "uz", "s_pair", "h1_curve", "h2_curve", "direct_lhs", "h1", "h2", "direct"};
  s.rows.resize(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const auto model = MvNormalModel::exchangeable(d, -0.5, 1.0, grid[i]);
    const Problem pb = Problem::siegmund(ell, u);
    const auto r = solve_beta(*model, pb, {0});
    const auto g = solve_gamma_single(*model, pb, 0);
    const auto p = solve_gamma_pair(*model, pb, 0, 1);
    const auto dir = check_direct_siegmund_homogeneous(*model, ell, u);
    const double h1c = 0.5 * (g.value + p.value), h2c = p.value;
    s.rows[i] = {grid[i], r.value, g.value, p.value, h1c, h2c, dir.lhs, h1c >= r.value ? 1.0 : 0.0,
                 h2c >= r.value ? 1.0 : 0.0, dir.holds ? 1.0 : 0.0};
  });
  std::vector<char> h1(grid.size()), h2(grid.size()), dr(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    h1[i] = s.rows[i][7] > 0.5;
    h2[i] = s.rows[i][8] > 0.5;
    dr[i] = s.rows[i][9] > 0.5;
  }
  s.summary = {{"d", d},
               {"ell", ell},
               {"u", u},
               {"max_rho_H1", largest_holding(grid, h1)},
               {"max_rho_H2", largest_holding(grid, h2)},
               {"max_rho_direct", largest_holding(grid, dr)}};
  return s;
}

SweepResult sweep_gap_v(int d, int m, const std::vector<double>& v_grid, int workers) {
  SweepResult s;
  s.kind = "gap_v";
  s.columns = {"v", "r_min", "z_pair", "s_quad", "h1_margin", "h2_margin"};
  auto eval = [&](double v) {
    const auto model = gap_normals(d, m, v);
    const auto a = gap_condition(*model, m, "H1'");
    const auto b = gap_condition(*model, m, "H2'");
    return std::array<double, 3>{a.r_star, 0.5 * (a.lhs - a.rhs), 0.5 * (b.lhs - b.rhs)};
  };
  s.rows.resize(v_grid.size());
  parallel_for(v_grid.size(), workers, [&](std::size_t i) {
    const double v = v_grid[i];
    const auto model = gap_normals(d, m, v);
    const Problem pb = Problem::gap(m);
    const auto z = solve_gap_pair(*model, pb, 0, m);
    const auto q = solve_gap_quad(*model, pb, 0, 1, m, m + 1);
    const auto e = eval(v);
    s.rows[i] = {v, e[0], z.value, q.value, e[1], e[2]};
  });
  // Sign changes of each margin, refined.
  json ends = json::object();
  for (int col : {4, 5}) {
    json cross = json::array();
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      const double fa = s.rows[i - 1][col], fb = s.rows[i][col];
      if ((fa >= 0) == (fb >= 0)) continue;
      const int which = col - 3;
      cross.push_back(bisect([&](double v) { return eval(v)[which]; }, s.rows[i - 1][0], s.rows[i][0], fa));
    }
    ends[col == 4 ? "H1'_crossings" : "H2'_crossings"] = cross;
  }
  s.summary = {{"d", d}, {"m", m}, {"crossings", ends}};
  return s;
}

SweepResult sweep_si_rho(int d, const std::vector<int>& Ls, const std::vector<double>& grid, int workers) {
  SweepResult s;
  s.kind = "si_rho";
  s.columns = {"L", "rho", "r", "z_A", "s_B", "lhs", "rhs", "holds"};
  json maxima = json::object();
  for (int L : Ls) {
    std::vector<std::vector<double>> rows(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
      const auto model = MvNormalModel::exchangeable(d, -0.5, 1.0, grid[i]);
      const Problem pb = Problem::sum_intersection(L);
      std::vector<int> A(L), B(L + 1);
      for (int k = 0; k <= L; ++k) B[k] = k;
      for (int k = 0; k < L; ++k) A[k] = k;
      const auto z = solve_si_zA(*model, pb, A);
      const auto sb = solve_si_sB(*model, pb, B);
      const auto rep = si_condition(*model, L);
      rows[i] = {static_cast<double>(L), grid[i], rep.r_star, z.value, sb.value, rep.lhs, rep.rhs, rep.holds ? 1.0 : 0.0};
    });
    std::vector<char> ok(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ok[i] = rows[i][7] > 0.5;
    maxima[std::to_string(L)] = largest_holding(grid, ok);
    s.rows.insert(s.rows.end(), rows.begin(), rows.end());
  }
  s.summary = {{"d", d}, {"max_rho_H-SI", maxima}};
  return s;
}

SweepResult sweep_homogeneous_sizes(const Scalar& sc, int d, double ell, double u) {
  SweepResult s;
  s.kind = "homogeneous_sizes";
  s.columns = {"a", "v_plus", "v_minus", "r_A"};
  const auto t = homogeneous_siegmund(sc, d, ell, u);
  int arg = 1;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : t.points) {
    s.rows.push_back({static_cast<double>(p.a), p.vplus, p.vminus, p.rate});
    if (p.rate < best) {
      best = p.rate;
      arg = p.a;
    }
  }
  s.summary = {{"d", d},
               {"ell", ell},
               {"u", u},
               {"z", t.z},
               {"kappa0", t.kappa0},
               {"kappa1", t.kappa1},
               {"r_1", t.points.front().rate},
               {"r_d", t.points.back().rate},
               {"argmin_size", arg},
               {"r_star", best}};
  return s;
}

ConditionTable run_table(const json& spec, int workers) {
  const int d = spec.value("d", 50);
  const double ell = spec.value("ell", 1.0);
  const auto us = numbers(spec.at("u"), "table.u");
  return table_siegmund(d, ell, us, grid_from(spec, "table"), workers);
}

SweepResult run_sweep(const json& spec, int workers) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "siegmund_rho")
    return sweep_siegmund_rho(spec.value("d", 50), spec.value("ell", 1.0), spec.value("u", 1.0), grid_from(spec, "sweep"),
                              workers);
  if (kind == "gap_v") {
    std::vector<double> v = spec.contains("v") ? numbers(spec["v"], "sweep.v") : std::vector<double>{};
    if (v.empty()) {
      // Log-spaced default covering both boundaries.
      for (int i = 0; i <= 120; ++i) v.push_back(std::pow(10.0, -2.0 + 3.5 * i / 120.0));
    }
    return sweep_gap_v(spec.value("d", 50), spec.value("m", 25), v, workers);
  }
  if (kind == "si_rho") {
    std::vector<int> Ls;
    for (double x : numbers(spec.value("L", json::array({2, 3})), "sweep.L")) Ls.push_back(static_cast<int>(x));
    return sweep_si_rho(spec.value("d", 50), Ls, grid_from(spec, "sweep"), workers);
  }
  if (kind == "homogeneous_sizes") {
    const Scalar sc = parse_component(spec.at("component"), "sweep.component");
    return sweep_homogeneous_sizes(sc, spec.value("d", 50), spec.value("ell", 1.0), spec.value("u", 1.0));
  }
  throw Error(ErrorCode::Parse, "sweep.kind: unknown sweep '" + kind + "'");
}

}  // namespace rarewalk
