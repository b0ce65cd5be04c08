#include "regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rarewalk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Problem::validate(int d) const {
  switch (kind) {
    case ProblemKind::Siegmund:
      if (!(ell > 0.0) || !(u > 0.0) || !std::isfinite(ell) || !std::isfinite(u))
        throw Error(ErrorCode::InvalidArgument, "siegmund problem needs ell > 0 and u > 0");
      break;
    case ProblemKind::Gap:
      if (m < 1 || m > d - 1)
        throw Error(ErrorCode::InvalidArgument, "gap problem needs 1 <= m <= d-1");
      break;
    case ProblemKind::SumIntersection:
      if (L < 1 || L > d - 1)
        throw Error(ErrorCode::InvalidArgument, "sum-intersection problem needs 1 <= L <= d-1");
      break;
  }
}

json Problem::to_json() const {
  switch (kind) {
    case ProblemKind::Siegmund: return {{"kind", "siegmund"}, {"ell", ell}, {"u", u}};
    case ProblemKind::Gap: return {{"kind", "gap"}, {"m", m}};
    case ProblemKind::SumIntersection: return {{"kind", "sum_intersection"}, {"L", L}};
  }
  return {};
}

Problem Problem::from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "siegmund") return siegmund(j.value("ell", 1.0), j.value("u", 1.0));
  if (kind == "gap") return gap(j.at("m").get<int>());
  if (kind == "sum_intersection") return sum_intersection(j.at("L").get<int>());
  throw Error(ErrorCode::Parse, "unknown problem kind '" + kind + "'");
}

std::string Problem::name() const {
  switch (kind) {
    case ProblemKind::Siegmund: return "siegmund";
    case ProblemKind::Gap: return "gap";
    case ProblemKind::SumIntersection: return "sum_intersection";
  }
  return "";
}

std::string set_label(const std::vector<int>& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << '}';
  return os.str();
}

std::string Region::label() const { return (rare ? "rare" : "reference") + set_label(set); }

bool classify_state(const double* x, int d, double b, const Problem& p, ClassifyWork& w, Region* out) {
  switch (p.kind) {
    case ProblemKind::Siegmund: {
      const double hi = b * p.u, lo = -b * p.ell;
      for (int i = 0; i < d; ++i)
        if (!(x[i] > hi || x[i] < lo)) return false;
      if (out) {
        out->set.clear();
        for (int i = 0; i < d; ++i)
          if (x[i] > hi) out->set.push_back(i);
        out->rare = !out->set.empty();
      }
      return true;
    }
    case ProblemKind::Gap: {
      const int m = p.m;
      w.idx.resize(d);
      std::iota(w.idx.begin(), w.idx.end(), 0);
      // Top m by value, ties broken by lower index.
      auto before = [x](int a, int c) { return x[a] > x[c] || (x[a] == x[c] && a < c); };
      std::nth_element(w.idx.begin(), w.idx.begin() + (m - 1), w.idx.end(), before);
      const double mth = x[w.idx[m - 1]];
      double next = -kInf;
      for (int i = m; i < d; ++i) next = std::max(next, x[w.idx[i]]);
      const double gap = mth - next;
      if (gap == b) ++w.boundary_ties;
      if (!(gap > b)) return false;
      if (out) {
        out->set.assign(w.idx.begin(), w.idx.begin() + m);
        std::sort(out->set.begin(), out->set.end());
        bool ref = true;
        for (int i = 0; i < m; ++i) ref = ref && out->set[i] == i;
        out->rare = !ref;
      }
      return true;
    }
    case ProblemKind::SumIntersection: {
      const int L = p.L;
      w.vals.resize(d);
      for (int i = 0; i < d; ++i) w.vals[i] = std::abs(x[i]);
      std::nth_element(w.vals.begin(), w.vals.begin() + (L - 1), w.vals.end());
      double s = 0.0;
      for (int i = 0; i < L; ++i) s += w.vals[i];
      if (s == b) ++w.boundary_ties;
      if (!(s > b)) return false;
      if (out) {
        out->set.clear();
        for (int i = 0; i < d; ++i)
          if (x[i] > 0.0) out->set.push_back(i);
        out->rare = static_cast<int>(out->set.size()) >= L;
      }
      return true;
    }
  }
  return false;
}

std::optional<Region> classify_state(const Vec& x, double b, const Problem& p) {
  p.validate(static_cast<int>(x.size()));
  if (!(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "b must be positive");
  ClassifyWork w;
  Region r;
  if (!classify_state(x.data(), static_cast<int>(x.size()), b, p, w, &r)) return std::nullopt;
  return r;
}

bool is_rare_set(const std::vector<int>& A, int d, const Problem& p) {
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i] < 0 || A[i] >= d) return false;
    if (i > 0 && A[i] <= A[i - 1]) return false;
  }
  switch (p.kind) {
    case ProblemKind::Siegmund: return !A.empty();
    case ProblemKind::Gap: {
      if (static_cast<int>(A.size()) != p.m) return false;
      for (int i = 0; i < p.m; ++i)
        if (A[i] != i) return true;
      return false;
    }
    case ProblemKind::SumIntersection: return static_cast<int>(A.size()) >= p.L;
  }
  return false;
}

double rearrangement_min(const Vec& theta, int L) {
  const int d = static_cast<int>(theta.size());
  if (L < 1 || L > d) throw Error(ErrorCode::InvalidArgument, "L outside [1, d]");
  std::vector<double> a(d);
  for (int i = 0; i < d; ++i) a[i] = std::abs(theta[i]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  // tail[k] = sum of a[k..d-1] (0-based, decreasing order)
  std::vector<double> tail(d + 1, 0.0);
  for (int i = d - 1; i >= 0; --i) tail[i] = tail[i + 1] + a[i];
  double best = kInf;
  for (int l = 1; l <= L; ++l) best = std::min(best, tail[L - l] / l);
  return best;
}

double support_value(const Vec& theta, const std::vector<int>& A, const Problem& p) {
  const int d = static_cast<int>(theta.size());
  if (!is_rare_set(A, d, p)) throw Error(ErrorCode::InvalidArgument, "index set is not a rare region");
  std::vector<char> in(d, 0);
  for (int k : A) in[k] = 1;
  for (int i = 0; i < d; ++i) {
    if (in[i] && theta[i] < -kSignTol) return -kInf;
    if (!in[i] && theta[i] > kSignTol) return -kInf;
  }
  switch (p.kind) {
    case ProblemKind::Siegmund: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += in[i] ? p.u * theta[i] : -p.ell * theta[i];
      return s;
    }
    case ProblemKind::Gap: {
      if (std::abs(theta.sum()) > 1e-9) return -kInf;
      double s = 0.0;
      for (int k : A) s += theta[k];
      return s;
    }
    case ProblemKind::SumIntersection: return rearrangement_min(theta, p.L);
  }
  return -kInf;
}

}  // namespace rarewalk
