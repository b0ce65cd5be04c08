#pragma once

#include "cgf.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rarewalk {

enum class ProblemKind { Siegmund, Gap, SumIntersection };

struct Problem {
  ProblemKind kind = ProblemKind::Siegmund;
  double ell = 1.0;  // Siegmund lower boundary
  double u = 1.0;    // Siegmund upper boundary
  int m = 0;         // Gap: size of the positive-drift block [m]
  int L = 0;         // SumIntersection: number of smallest coordinates summed

  static Problem siegmund(double ell, double u) { return {ProblemKind::Siegmund, ell, u, 0, 0}; }
  static Problem gap(int m) { return {ProblemKind::Gap, 1.0, 1.0, m, 0}; }
  static Problem sum_intersection(int L) { return {ProblemKind::SumIntersection, 1.0, 1.0, 0, L}; }

  void validate(int d) const;
  json to_json() const;
  static Problem from_json(const json& j);
  std::string name() const;
};

// Exit region. `set` is the sorted index set A; rare = false marks the
// anticipated (reference) exit.
struct Region {
  bool rare = false;
  std::vector<int> set;
  std::string label() const;
};

std::string set_label(const std::vector<int>& s);

// Scratch buffers for the per-step classifier.
struct ClassifyWork {
  std::vector<int> idx;
  std::vector<double> vals;
  std::int64_t boundary_ties = 0;
};

// Returns true and fills `out` once x lies in one of the dilated regions b W^A.
bool classify_state(const double* x, int d, double b, const Problem& p, ClassifyWork& w, Region* out);
std::optional<Region> classify_state(const Vec& x, double b, const Problem& p);

// Whether A is a rare index set for the problem.
bool is_rare_set(const std::vector<int>& A, int d, const Problem& p);

// inf over the closure of W^A of theta . x; -inf when unbounded below.
double support_value(const Vec& theta, const std::vector<int>& A, const Problem& p);

// min_{1<=l<=L} (1/l) sum_{i=L-l+1}^{d} |theta|_(i), decreasing order.
double rearrangement_min(const Vec& theta, int L);

constexpr double kSignTol = 1e-12;

}  // namespace rarewalk
