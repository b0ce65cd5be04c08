#pragma once

#include "proposal.hpp"

#include <string>
#include <vector>

namespace rarewalk {

// Grid {0, step, ..., max} built from integer multiples.
std::vector<double> rho_grid(double step, double max);

struct ConditionTable {
  int d = 0;
  double ell = 1.0;
  std::vector<double> u;
  // Largest grid value of rho for which each condition holds; -1 when none.
  std::vector<double> h1, h2, direct;
  json to_json() const;
  std::string csv() const;
};

// Exchangeable MvNormal(-1/2, Sigma_rho) Siegmund problem.
ConditionTable table_siegmund(int d, double ell, const std::vector<double>& us, const std::vector<double>& grid,
                              int workers = 1);

struct SweepResult {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json summary;
  std::string csv() const;
  json to_json() const;
};

// r, uz, s and the three condition flags against rho.
SweepResult sweep_siegmund_rho(int d, double ell, double u, const std::vector<double>& grid, int workers = 1);
// Independent normals, N(1/2, 1) on [m] and N(-1/2, v) off [m]; margins of (H1') and (H2') against v,
// with the sign changes refined by bisection.
SweepResult sweep_gap_v(int d, int m, const std::vector<double>& v_grid, int workers = 1);
// Exchangeable MvNormal(-1/2, Sigma_rho) sum-intersection problem; one block of rows per L.
SweepResult sweep_si_rho(int d, const std::vector<int>& Ls, const std::vector<double>& grid, int workers = 1);
// r_A against |A| for an i.i.d. Siegmund model.
SweepResult sweep_homogeneous_sizes(const Scalar& s, int d, double ell, double u);

ConditionTable run_table(const json& spec, int workers = 1);
SweepResult run_sweep(const json& spec, int workers = 1);

}  // namespace rarewalk
