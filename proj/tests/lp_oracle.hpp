#pragma once
// Brute-force oracle for the rearrangement value:
//   min sum_i |theta_i| x_i  s.t.  sum_{i in S} x_i >= 1 for every L-subset S, x >= 0.
// Solved through its dual, max sum_S w_S s.t. sum_{S ni i} w_S <= |theta_i|, w >= 0,
// by a dense tableau simplex with Bland's rule. The slack basis is feasible.

#include <cmath>
#include <vector>

namespace lp_oracle {

inline double rearrangement_lp(const std::vector<double>& theta, int L) {
  const int d = static_cast<int>(theta.size());
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == L) {
      subsets.push_back(cur);
      return;
    }
    for (int i = start; i < d; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  const int n = static_cast<int>(subsets.size());
  const int cols = n + d + 1;  // structural, slack, rhs
  std::vector<std::vector<double>> T(d + 1, std::vector<double>(cols, 0.0));
  for (int j = 0; j < n; ++j)
    for (int i : subsets[j]) T[i][j] = 1.0;
  for (int i = 0; i < d; ++i) {
    T[i][n + i] = 1.0;
    T[i][cols - 1] = std::abs(theta[i]);
  }
  for (int j = 0; j < n; ++j) T[d][j] = -1.0;  // reduced costs of max 1.w
  std::vector<int> basis(d);
  for (int i = 0; i < d; ++i) basis[i] = n + i;
  const double eps = 1e-13;
  for (int iter = 0; iter < 10000; ++iter) {
    int enter = -1;
    for (int j = 0; j < cols - 1; ++j)
      if (T[d][j] < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < d; ++i) {
      if (T[i][enter] <= eps) continue;
      const double r = T[i][cols - 1] / T[i][enter];
      if (leave < 0 || r < best - eps || (std::abs(r - best) <= eps && basis[i] < basis[leave])) {
        leave = i;
        best = r;
      }
    }
    if (leave < 0) return INFINITY;  // cannot happen: the dual is bounded
    const double piv = T[leave][enter];
    for (double& v : T[leave]) v /= piv;
    for (int i = 0; i <= d; ++i) {
      if (i == leave || T[i][enter] == 0.0) continue;
      const double f = T[i][enter];
      for (int j = 0; j < cols; ++j) T[i][j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  return T[d][cols - 1];
}

}  // namespace lp_oracle
