#include "conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace rarewalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(Sign s) { return s == Sign::NonNeg ? 1.0 : (s == Sign::NonPos ? -1.0 : 0.0); }

// Rows h with h.z <= 0: sign rows for signed groups, then G.
struct Rows {
  Mat H;
  std::vector<int> sign_group;  // group index per sign row
};

Rows constraint_rows(const ConeProgram& prog) {
  Rows r;
  int k = 0;
  for (Sign s : prog.sign)
    if (s != Sign::Free) ++k;
  r.H = Mat::Zero(k + prog.G.rows(), prog.n());
  int i = 0;
  for (int g = 0; g < prog.p; ++g) {
    if (prog.sign[g] == Sign::Free) continue;
    r.H(i, g) = -sgn(prog.sign[g]);
    r.sign_group.push_back(g);
    ++i;
  }
  if (prog.G.rows() > 0) r.H.bottomRows(prog.G.rows()) = prog.G;
  return r;
}

Vec kappa_layout(const ConeProgram& prog, const Rows& rows, const Vec& k_rows) {
  Vec k = Vec::Zero(prog.p + prog.G.rows());
  const int ns = static_cast<int>(rows.sign_group.size());
  for (int i = 0; i < ns; ++i) k[rows.sign_group[i]] = k_rows[i];
  for (int i = 0; i < prog.G.rows(); ++i) k[prog.p + i] = k_rows[ns + i];
  return k;
}

Vec kappa_rows(const ConeProgram& prog, const Rows& rows, const Vec& k) {
  const int ns = static_cast<int>(rows.sign_group.size());
  Vec out(rows.H.rows());
  for (int i = 0; i < ns; ++i) out[i] = k[rows.sign_group[i]];
  for (int i = 0; i < prog.G.rows(); ++i) out[ns + i] = k[prog.p + i];
  return out;
}

Vec embed_grad(const Vec& g, int n) {
  Vec out = Vec::Zero(n);
  out.head(g.size()) = g;
  return out;
}

// Least squares E^T eta = rhs.
Vec solve_eta(const Mat& E, const Vec& rhs) {
  if (E.rows() == 0) return Vec();
  return E.transpose().completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

GroupMap GroupMap::identity(int d) {
  std::vector<int> l(d);
  for (int i = 0; i < d; ++i) l[i] = i;
  return from_labels(l);
}

GroupMap GroupMap::from_labels(const std::vector<int>& labels) {
  GroupMap m;
  m.d = static_cast<int>(labels.size());
  m.group_of.assign(m.d, -1);
  std::map<int, int> id;
  for (int i = 0; i < m.d; ++i) {
    if (labels[i] < 0) continue;
    auto it = id.find(labels[i]);
    if (it == id.end()) {
      it = id.emplace(labels[i], static_cast<int>(m.members.size())).first;
      m.members.emplace_back();
    }
    m.group_of[i] = it->second;
    m.members[it->second].push_back(i);
  }
  return m;
}

Vec GroupMap::counts() const {
  Vec n(groups());
  for (int g = 0; g < groups(); ++g) n[g] = static_cast<double>(members[g].size());
  return n;
}

Vec GroupMap::expand(const Vec& y) const {
  Vec t = Vec::Zero(d);
  for (int i = 0; i < d; ++i)
    if (group_of[i] >= 0) t[i] = y[group_of[i]];
  return t;
}

Vec GroupMap::reduce(const Vec& g) const {
  Vec r = Vec::Zero(groups());
  for (int i = 0; i < d; ++i)
    if (group_of[i] >= 0) r[group_of[i]] += g[i];
  return r;
}

ReducedCgf::ReducedCgf(const Model& model, GroupMap map) : model_(model), map_(std::move(map)) {
  if (map_.d != model.dim()) throw Error(ErrorCode::Dimension, "group map dimension differs from model");
  const int p = map_.groups();
  counts_ = map_.counts();
  if (auto* mv = dynamic_cast<const MvNormalModel*>(&model)) {
    quadratic_ = true;
    qm_ = map_.reduce(mv->mean());
    qQ_ = Mat::Zero(p, p);
    const Mat& S = mv->cov();
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        double s = 0.0;
        for (int i : map_.members[a])
          for (int j : map_.members[b]) s += S(i, j);
        qQ_(a, b) = s;
      }
  } else if (auto* ind = dynamic_cast<const IndependentModel*>(&model)) {
    const auto& comps = ind->components();
    separable_ = true;
    for (int g = 0; g < p; ++g) {
      const Scalar& first = comps[map_.members[g][0]];
      for (int i : map_.members[g]) separable_ = separable_ && comps[i] == first;
      scalars_.push_back(first);
    }
    if (!separable_) scalars_.clear();
    bool all_normal = true;
    for (int i = 0; i < map_.d; ++i)
      if (map_.group_of[i] >= 0) all_normal = all_normal && comps[i].kind == Scalar::Kind::Normal;
    if (all_normal) {
      quadratic_ = true;
      qm_ = Vec::Zero(p);
      qQ_ = Mat::Zero(p, p);
      for (int g = 0; g < p; ++g)
        for (int i : map_.members[g]) {
          qm_[g] += comps[i].p1;
          qQ_(g, g) += comps[i].p2;
        }
    }
  }
}

double ReducedCgf::value(const Vec& y) const {
  if (quadratic_) return qm_.dot(y) + 0.5 * y.dot(qQ_ * y);
  if (separable_) {
    double s = 0.0;
    for (int g = 0; g < size(); ++g) {
      const double v = scalars_[g].cgf(y[g]);
      if (!std::isfinite(v)) return kInf;
      s += counts_[g] * v;
    }
    return s;
  }
  return model_.cgf(map_.expand(y));
}

Vec ReducedCgf::grad(const Vec& y) const {
  if (quadratic_) return qm_ + qQ_ * y;
  if (separable_) {
    Vec g(size());
    for (int i = 0; i < size(); ++i) g[i] = counts_[i] * scalars_[i].d1(y[i]);
    return g;
  }
  return map_.reduce(model_.grad(map_.expand(y)));
}

Mat ReducedCgf::hess(const Vec& y) const {
  if (quadratic_) return qQ_;
  const int p = size();
  if (separable_) {
    Mat h = Mat::Zero(p, p);
    for (int i = 0; i < p; ++i) h(i, i) = counts_[i] * scalars_[i].d2(y[i]);
    return h;
  }
  const Mat H = model_.hessian(map_.expand(y));
  Mat h = Mat::Zero(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      double s = 0.0;
      for (int i : map_.members[a])
        for (int j : map_.members[b]) s += H(i, j);
      h(a, b) = s;
    }
  return h;
}

bool ReducedCgf::in_domain(const Vec& y) const {
  if (!y.allFinite()) return false;
  if (quadratic_) return true;
  if (separable_) {
    for (int g = 0; g < size(); ++g)
      if (!scalars_[g].in_domain(y[g])) return false;
    return true;
  }
  return model_.in_domain(map_.expand(y));
}

void ConeProgram::validate() const {
  if (p < 1 || q < 0) throw Error(ErrorCode::InvalidArgument, "cone program needs p >= 1");
  if (c.size() != n() || static_cast<int>(sign.size()) != p)
    throw Error(ErrorCode::Dimension, "cone program objective or sign size mismatch");
  if ((G.rows() > 0 && G.cols() != n()) || (E.rows() > 0 && E.cols() != n()))
    throw Error(ErrorCode::Dimension, "cone program constraint width mismatch");
  if (interior.size() != 0 && interior.size() != n())
    throw Error(ErrorCode::Dimension, "cone program interior size mismatch");
}

Mat null_space(const Mat& E, const std::vector<int>& cols, int n) {
  const int k = static_cast<int>(cols.size());
  Mat basis;
  if (E.rows() == 0 || k == 0) {
    basis = Mat::Identity(k, k);
  } else {
    Mat sub(E.rows(), k);
    for (int j = 0; j < k; ++j) sub.col(j) = E.col(cols[j]);
    Eigen::JacobiSVD<Mat> svd(sub, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double tol = 1e-12 * std::max(1.0, s.size() ? s[0] : 0.0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > tol) ++rank;
    basis = svd.matrixV().rightCols(k - rank);
  }
  Mat N = Mat::Zero(n, basis.cols());
  for (int j = 0; j < k; ++j) N.row(cols[j]) = basis.row(j);
  return N;
}

Vec sign_interior(const ReducedCgf& f, const std::vector<Sign>& sign, const Mat& E) {
  const int p = f.size();
  if (E.rows() > 1) throw Error(ErrorCode::Unsupported, "interior construction supports one equality row");
  const Vec m = f.grad(Vec::Zero(p));
  Vec e = E.rows() ? Vec(E.row(0).head(p).transpose()) : Vec::Zero(p);
  auto s = [&](int g) { return sgn(sign[g]); };

  // Base direction with m.base < 0 in the closure of the cone.
  Vec base = Vec::Zero(p);
  double best = 0.0;
  auto consider = [&](const Vec& v) {
    const double cost = m.dot(v) / std::max(1e-300, v.lpNorm<Eigen::Infinity>());
    if (cost < best) {
      best = cost;
      base = v;
    }
  };
  for (int g = 0; g < p; ++g) {
    if (sign[g] == Sign::Free || e[g] != 0.0) continue;
    Vec v = Vec::Zero(p);
    v[g] = s(g);
    consider(v);
  }
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      if (sign[a] == Sign::Free || sign[b] == Sign::Free) continue;
      const double ea = s(a) * e[a], eb = s(b) * e[b];
      if (!(ea > 0.0 && eb < 0.0)) continue;
      Vec v = Vec::Zero(p);
      v[a] = s(a) / ea;
      v[b] = s(b) / -eb;
      consider(v);
    }
  {
    // Free groups move against the mean, projected onto e-perp.
    Vec v = Vec::Zero(p);
    for (int g = 0; g < p; ++g)
      if (sign[g] == Sign::Free) v[g] = -m[g];
    Vec ef = Vec::Zero(p);
    for (int g = 0; g < p; ++g)
      if (sign[g] == Sign::Free) ef[g] = e[g];
    if (ef.squaredNorm() > 0.0) v -= ef * (ef.dot(v) / ef.squaredNorm());
    if (v.squaredNorm() > 0.0) consider(v);
  }
  if (!(best < 0.0)) throw Error(ErrorCode::Domain, "no tilt direction with negative drift satisfies the constraints");

  // Strictly interior direction satisfying e.v = 0.
  Vec strict = Vec::Zero(p);
  for (int g = 0; g < p; ++g) strict[g] = s(g);
  double pos = 0.0, neg = 0.0;
  for (int g = 0; g < p; ++g) {
    const double c = strict[g] * e[g];
    if (c > 0) pos += c;
    if (c < 0) neg -= c;
  }
  if (pos > 0.0 || neg > 0.0) {
    if (pos > 0.0 && neg > 0.0) {
      for (int g = 0; g < p; ++g)
        if (strict[g] * e[g] < 0.0) strict[g] *= pos / neg;
    } else {
      // Only free groups can absorb the imbalance.
      Vec ef = Vec::Zero(p);
      for (int g = 0; g < p; ++g)
        if (sign[g] == Sign::Free) ef[g] = e[g];
      if (ef.squaredNorm() == 0.0) throw Error(ErrorCode::Domain, "sign pattern admits no strictly feasible tilt");
      strict -= ef * (e.dot(strict) / ef.dot(e));
    }
  }
  double eps = 1.0;
  for (int it = 0; it < 200; ++it, eps *= 0.5) {
    const Vec y = base + eps * strict;
    if (m.dot(y) < 0.0) return y;
  }
  throw Error(ErrorCode::Domain, "failed to build a strictly feasible tilt");
}

void scale_to_boundary(const ReducedCgf& f, ConeResult& r, const ConeProgram& prog) {
  const Vec y = r.z.head(prog.p);
  auto phi = [&](double s) {
    const Vec ys = s * y;
    return f.in_domain(ys) ? f.value(ys) : kInf;
  };
  const double v1 = phi(1.0);
  if (v1 == 0.0) return;
  double lo, hi;
  if (v1 < 0.0) {
    lo = 1.0;
    hi = 2.0;
    for (int i = 0; i < 200 && phi(hi) < 0.0; ++i) {
      lo = hi;
      hi *= 2.0;
    }
    if (phi(hi) < 0.0) return;
  } else {
    hi = 1.0;
    lo = 0.5;
    for (int i = 0; i < 200 && !(phi(lo) < 0.0); ++i) {
      hi = lo;
      lo *= 0.5;
    }
    if (!(phi(lo) < 0.0)) return;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  double s = std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi;
  // Newton polish on the radial root.
  for (int i = 0; i < 3; ++i) {
    const double v = phi(s);
    const double dv = f.grad(s * y).dot(y);
    if (v == 0.0 || !(dv > 0.0)) break;
    const double ns = s - v / dv;
    if (!(std::abs(phi(ns)) < std::abs(v))) break;
    s = ns;
  }
  r.z *= s;
  r.value = prog.c.dot(r.z);
}

double kkt_residual(const ReducedCgf& f, const ConeProgram& prog, const ConeResult& r) {
  const Vec y = r.z.head(prog.p);
  if (!f.in_domain(y)) return kInf;
  const Rows rows = constraint_rows(prog);
  const double lam = f.value(y);
  const Vec g = embed_grad(f.grad(y), prog.n());
  const Vec k = r.kappa.size() ? kappa_rows(prog, rows, r.kappa) : Vec::Zero(rows.H.rows());
  Vec st = prog.c - r.lambda0 * g - rows.H.transpose() * k;
  if (prog.E.rows() > 0 && r.eta.size() == prog.E.rows()) st -= prog.E.transpose() * r.eta;
  const double zs = std::max(1.0, r.z.lpNorm<Eigen::Infinity>());
  const double cs = std::max(1.0, prog.c.lpNorm<Eigen::Infinity>());
  double res = std::abs(lam);
  res = std::max(res, st.lpNorm<Eigen::Infinity>() / cs);
  res = std::max(res, std::max(0.0, -r.lambda0));
  const Vec hz = rows.H * r.z;
  for (int i = 0; i < hz.size(); ++i) {
    res = std::max(res, std::max(0.0, hz[i]) / zs);
    res = std::max(res, std::max(0.0, -k[i]) / cs);
    res = std::max(res, std::abs(k[i] * hz[i]) / (cs * zs));
  }
  if (prog.E.rows() > 0) res = std::max(res, (prog.E * r.z).lpNorm<Eigen::Infinity>() / zs);
  return res;
}

ConeResult solve_faces(const ReducedCgf& f, const ConeProgram& prog, int max_signed) {
  prog.validate();
  if (!f.quadratic() || prog.q != 0 || prog.G.rows() != 0)
    throw Error(ErrorCode::Unsupported, "face enumeration needs a quadratic cgf and sign-only constraints");
  const int p = prog.p;
  std::vector<int> signed_groups;
  for (int g = 0; g < p; ++g)
    if (prog.sign[g] != Sign::Free) signed_groups.push_back(g);
  const int k = static_cast<int>(signed_groups.size());
  if (k > max_signed) throw Error(ErrorCode::Limit, "too many signed groups for face enumeration");

  const Vec& m = f.qm();
  const Mat& Q = f.qQ();
  ConeResult best;
  best.value = -kInf;
  int best_pinned = 0;
  for (long mask = 0; mask < (1L << k); ++mask) {
    std::vector<char> pinned(p, 0);
    int np = 0;
    for (int j = 0; j < k; ++j)
      if (mask & (1L << j)) {
        pinned[signed_groups[j]] = 1;
        ++np;
      }
    std::vector<int> cols;
    for (int g = 0; g < p; ++g)
      if (!pinned[g]) cols.push_back(g);
    const Mat N = null_space(prog.E, cols, p);
    Vec y = Vec::Zero(p);
    double value = 0.0, lambda0 = 0.0;
    if (N.cols() > 0) {
      const Vec c1 = N.transpose() * prog.c;
      const Vec m1 = N.transpose() * m;
      const Mat Q1 = N.transpose() * Q * N;
      Eigen::LLT<Mat> llt(Q1);
      const Vec Qc = llt.solve(c1), Qm = llt.solve(m1);
      const double a = c1.dot(Qc), b = m1.dot(Qm), x = c1.dot(Qm);
      if (a > 1e-300 && b > 1e-300) {
        lambda0 = std::sqrt(a / b);
        y = N * (Qc * std::sqrt(b / a) - Qm);
        value = std::sqrt(a * b) - x;
      }
    }
    bool ok = true;
    const double ys = std::max(1.0, y.lpNorm<Eigen::Infinity>());
    for (int g : signed_groups)
      if (!pinned[g] && sgn(prog.sign[g]) * y[g] < -1e-12 * ys) ok = false;
    if (!ok) continue;
    if (value > best.value + 1e-14 * std::abs(value) || (value >= best.value && np < best_pinned)) {
      best.z = y;
      best.value = value;
      best.lambda0 = lambda0;
      best_pinned = np;
      for (int g : signed_groups)
        if (pinned[g]) best.z[g] = 0.0;
        else if (sgn(prog.sign[g]) * best.z[g] < 0.0) best.z[g] = 0.0;
    }
  }
  if (!std::isfinite(best.value)) throw Error(ErrorCode::NotConverged, "no sign-feasible face");

  // Multipliers for the chosen face.
  const Vec y = best.z;
  const Vec r = prog.c - best.lambda0 * f.grad(y);
  std::vector<int> free_cols;
  for (int g = 0; g < p; ++g)
    if (prog.sign[g] == Sign::Free || y[g] != 0.0) free_cols.push_back(g);
  best.eta = Vec();
  if (prog.E.rows() > 0) {
    Mat Ef(prog.E.rows(), free_cols.size());
    Vec rf(free_cols.size());
    for (std::size_t j = 0; j < free_cols.size(); ++j) {
      Ef.col(j) = prog.E.col(free_cols[j]);
      rf[j] = r[free_cols[j]];
    }
    best.eta = free_cols.empty() ? Vec::Zero(prog.E.rows()) : solve_eta(Ef, rf);
  }
  const Vec r2 = prog.E.rows() > 0 ? Vec(r - prog.E.transpose() * best.eta) : r;
  best.kappa = Vec::Zero(p);
  for (int g : signed_groups)
    if (y[g] == 0.0) best.kappa[g] = -sgn(prog.sign[g]) * r2[g];
  scale_to_boundary(f, best, prog);
  best.residual = kkt_residual(f, prog, best);
  best.converged = true;
  best.iterations = 1 << k;
  best.method = "faces";
  return best;
}

ConeResult solve_nested(const ReducedCgf& f, const ConeProgram& prog) {
  prog.validate();
  if (!f.separable() || prog.q != 0 || prog.G.rows() != 0 || prog.E.rows() > 1)
    throw Error(ErrorCode::Unsupported, "nested solver needs a separable cgf and sign-only constraints");
  const int p = prog.p;
  const Vec n = f.counts();
  const bool eq = prog.E.rows() == 1;
  double escale = 0.0;
  if (eq) {
    escale = prog.E(0, 0) / n[0];
    for (int g = 0; g < p; ++g)
      if (std::abs(prog.E(0, g) - escale * n[g]) > 1e-12 * std::abs(escale) * n[g] || escale == 0.0)
        throw Error(ErrorCode::Unsupported, "nested solver needs the equality row proportional to group sizes");
  }
  const auto& sc = f.scalars();

  auto tilt = [&](double lambda0, double eta) {
    Vec y(p);
    for (int g = 0; g < p; ++g) {
      const double tau = (prog.c[g] / n[g] - eta) / lambda0;
      double v = sc[g].inv_d1(tau);
      if (prog.sign[g] == Sign::NonNeg) v = std::max(v, 0.0);
      if (prog.sign[g] == Sign::NonPos) v = std::min(v, 0.0);
      y[g] = v;
    }
    return y;
  };
  auto balanced = [&](double lambda0, double& eta_out) {
    if (!eq) {
      eta_out = 0.0;
      return tilt(lambda0, 0.0);
    }
    auto S = [&](double eta) { return n.dot(tilt(lambda0, eta)); };
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 400 && !(S(lo) > 0.0); ++i) lo *= 2.0;
    for (int i = 0; i < 400 && !(S(hi) < 0.0); ++i) hi *= 2.0;
    for (int i = 0; i < 300 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++i) {
      const double mid = 0.5 * (lo + hi);
      const double s = S(mid);
      if (s == 0.0) {
        lo = hi = mid;
        break;
      }
      (s > 0.0 ? lo : hi) = mid;
    }
    eta_out = 0.5 * (lo + hi);
    Vec y = tilt(lambda0, eta_out);
    // Remove the residual imbalance along the free-moving groups.
    const double imb = n.dot(y);
    if (y.allFinite() && imb != 0.0) {
      double w = 0.0;
      for (int g = 0; g < p; ++g)
        if (prog.sign[g] == Sign::Free || y[g] != 0.0) w += n[g] * n[g];
      if (w > 0.0)
        for (int g = 0; g < p; ++g)
          if (prog.sign[g] == Sign::Free || y[g] != 0.0) y[g] -= imb * n[g] / w;
    }
    return y;
  };
  auto h = [&](double t, Vec* y_out, double* eta_out) {
    double eta = 0.0;
    Vec y = balanced(std::exp(t), eta);
    if (y_out) *y_out = y;
    if (eta_out) *eta_out = eta;
    if (!y.allFinite() || !f.in_domain(y)) return kInf;
    return f.value(y);
  };
  double lo = 0.0, hi = 0.0;
  if (h(0.0, nullptr, nullptr) > 0.0) {
    for (int i = 0; i < 200 && h(hi, nullptr, nullptr) > 0.0; ++i) {
      lo = hi;
      hi += 1.0;
    }
  } else {
    for (int i = 0; i < 200 && !(h(lo, nullptr, nullptr) > 0.0); ++i) {
      hi = lo;
      lo -= 1.0;
    }
  }
  if (!(h(lo, nullptr, nullptr) > 0.0) || h(hi, nullptr, nullptr) > 0.0)
    throw Error(ErrorCode::NotConverged, "nested solver could not bracket the multiplier");
  int it = 0;
  for (; it < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid, nullptr, nullptr) > 0.0 ? lo : hi) = mid;
  }
  ConeResult r;
  double eta = 0.0;
  Vec y;
  h(hi, &y, &eta);
  r.z = y;
  r.lambda0 = std::exp(hi);
  r.value = prog.c.dot(y);
  if (eq) {
    r.eta = Vec::Constant(1, eta / escale);
  }
  r.kappa = Vec::Zero(p);
  const Vec gr = f.grad(y);
  for (int g = 0; g < p; ++g) {
    if (prog.sign[g] == Sign::Free || y[g] != 0.0) continue;
    double res = prog.c[g] - r.lambda0 * gr[g];
    if (eq) res -= prog.E(0, g) * r.eta[0];
    r.kappa[g] = -sgn(prog.sign[g]) * res;
  }
  scale_to_boundary(f, r, prog);
  r.residual = kkt_residual(f, prog, r);
  r.converged = true;
  r.iterations = it;
  r.method = "nested";
  return r;
}

namespace {

struct BarrierState {
  const ReducedCgf& f;
  const ConeProgram& prog;
  const Rows& rows;
  const Mat& N;

  bool feasible(const Vec& z) const {
    if ((rows.H * z).maxCoeff() >= 0.0 && rows.H.rows() > 0) return false;
    const Vec y = z.head(prog.p);
    if (!f.in_domain(y)) return false;
    const double v = f.value(y);
    return std::isfinite(v) && v < 0.0;
  }
  double F(const Vec& z, double t) const {
    double v = -t * prog.c.dot(z) - std::log(-f.value(z.head(prog.p)));
    const Vec hz = rows.H * z;
    for (int i = 0; i < hz.size(); ++i) v -= std::log(-hz[i]);
    return v;
  }
};

// Newton on the active-set KKT equations. Returns false when it stalls.
bool polish(const ReducedCgf& f, const ConeProgram& prog, const Rows& rows, const Mat& N, const std::vector<int>& act,
            Vec& w, double& lambda0, Vec& kact) {
  const int r = static_cast<int>(N.cols());
  const int a = static_cast<int>(act.size());
  const int p = prog.p;
  Mat HA(a, prog.n());
  for (int i = 0; i < a; ++i) HA.row(i) = rows.H.row(act[i]);
  auto residual = [&](const Vec& ww, double l0, const Vec& kk, Vec& out) {
    const Vec z = N * ww;
    const Vec y = z.head(p);
    if (!f.in_domain(y)) return false;
    const Vec g = embed_grad(f.grad(y), prog.n());
    out.resize(r + a + 1);
    out.head(r) = N.transpose() * (prog.c - l0 * g - HA.transpose() * kk);
    out.segment(r, a) = HA * z;
    out[r + a] = f.value(y);
    return out.allFinite();
  };
  Vec F;
  if (!residual(w, lambda0, kact, F)) return false;
  const double scale = std::max(1.0, prog.c.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < 60; ++it) {
    const double norm = F.lpNorm<Eigen::Infinity>();
    if (norm < 1e-15 * scale) return true;
    const Vec z = N * w;
    const Vec y = z.head(p);
    const Vec g = embed_grad(f.grad(y), prog.n());
    Mat Hz = Mat::Zero(prog.n(), prog.n());
    Hz.topLeftCorner(p, p) = f.hess(y);
    Mat J = Mat::Zero(r + a + 1, r + 1 + a);
    J.block(0, 0, r, r) = -lambda0 * N.transpose() * Hz * N;
    J.block(0, r, r, 1) = -N.transpose() * g;
    J.block(0, r + 1, r, a) = -N.transpose() * HA.transpose();
    J.block(r, 0, a, r) = HA * N;
    J.block(r + a, 0, 1, r) = (g.transpose() * N);
    const Vec step = J.completeOrthogonalDecomposition().solve(-F);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      const Vec w2 = w + alpha * step.head(r);
      const double l2 = lambda0 + alpha * step[r];
      const Vec k2 = kact + alpha * step.tail(a);
      Vec F2;
      if (residual(w2, l2, k2, F2) && F2.lpNorm<Eigen::Infinity>() < norm) {
        w = w2;
        lambda0 = l2;
        kact = k2;
        F = F2;
        moved = true;
        break;
      }
    }
    if (!moved) return norm < 1e-11 * scale;
  }
  return F.lpNorm<Eigen::Infinity>() < 1e-11 * scale;
}

}  // namespace

ConeResult solve_barrier(const ReducedCgf& f, const ConeProgram& prog, const BarrierOptions& opt) {
  prog.validate();
  const int n = prog.n();
  const Rows rows = constraint_rows(prog);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const Mat N = null_space(prog.E, all, n);
  if (N.cols() == 0) throw Error(ErrorCode::InvalidArgument, "equality constraints leave no free direction");
  BarrierState st{f, prog, rows, N};

  Vec z0 = prog.interior;
  if (z0.size() == 0) {
    if (prog.q != 0) throw Error(ErrorCode::InvalidArgument, "auxiliary variables need an explicit interior point");
    z0 = sign_interior(f, prog.sign, prog.E);
  }
  Vec w = N.transpose() * z0;
  {
    double s = 1.0;
    int i = 0;
    for (; i < 200 && !st.feasible(N * (s * w)); ++i) s *= 0.5;
    if (i == 200) throw Error(ErrorCode::Domain, "interior point is not strictly feasible");
    w *= s;
  }
  const int k = static_cast<int>(rows.H.rows()) + 1;
  double t = std::min(1.0, k / std::max(1e-8, std::abs(prog.c.dot(N * w))));
  int newton = 0;
  for (int outer = 0; outer < 200; ++outer) {
    for (int inner = 0; inner < 100 && newton < opt.max_newton; ++newton, ++inner) {
      const Vec z = N * w;
      const Vec y = z.head(prog.p);
      const double lam = f.value(y);
      const Vec g = embed_grad(f.grad(y), n);
      Vec grad = -t * prog.c + g / (-lam);
      Mat H = Mat::Zero(n, n);
      H += g * g.transpose() / (lam * lam);
      H.topLeftCorner(prog.p, prog.p) += f.hess(y) / (-lam);
      const Vec hz = rows.H * z;
      for (int i = 0; i < hz.size(); ++i) {
        grad += rows.H.row(i).transpose() / (-hz[i]);
        H += rows.H.row(i).transpose() * rows.H.row(i) / (hz[i] * hz[i]);
      }
      const Vec gw = N.transpose() * grad;
      const Mat Hw = N.transpose() * H * N;
      const double F0 = st.F(z, t);
      const double hs = std::max(1e-300, Hw.diagonal().cwiseAbs().maxCoeff());
      bool moved = false, small = false;
      // Damped retries when the Newton step is not a descent direction.
      for (double reg : {0.0, 1e-10, 1e-6, 1e-2, 1.0}) {
        Mat Hr = Hw;
        Hr.diagonal().array() += reg * hs;
        Eigen::LDLT<Mat> ldlt(Hr);
        const Vec dw = ldlt.solve(-gw);
        const double dec = -gw.dot(dw);
        if (!std::isfinite(dec) || !(dec > 0.0)) continue;
        // Below this the decrement is lost in the rounding of F.
        if (reg == 0.0 && !(dec > std::max(1e-10, 1e-13 * std::abs(F0)))) {
          small = true;
          break;
        }
        double alpha = 1.0;
        for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
          const Vec w2 = w + alpha * dw;
          const Vec z2 = N * w2;
          if (!st.feasible(z2)) continue;
          if (st.F(z2, t) <= F0 - 0.25 * alpha * dec) {
            w = w2;
            moved = true;
            break;
          }
        }
        if (moved) break;
      }
      if (small || !moved) break;
    }
    const double value = prog.c.dot(N * w);
    if (k / t < opt.gap_tol * std::max(1.0, std::abs(value)) || newton >= opt.max_newton) break;
    t *= opt.mu;
  }

  ConeResult bar;
  bar.z = N * w;
  const Vec y = bar.z.head(prog.p);
  const double lam = f.value(y);
  bar.lambda0 = 1.0 / (t * -lam);
  const Vec hz = rows.H * bar.z;
  Vec krow(hz.size());
  for (int i = 0; i < hz.size(); ++i) krow[i] = 1.0 / (t * -hz[i]);
  bar.kappa = kappa_layout(prog, rows, krow);
  const Vec gfull = embed_grad(f.grad(y), n);
  if (prog.E.rows() > 0) bar.eta = solve_eta(prog.E, prog.c - bar.lambda0 * gfull - rows.H.transpose() * krow);
  bar.value = prog.c.dot(bar.z);
  bar.iterations = newton;
  bar.method = "barrier";
  ConeResult fallback = bar;
  scale_to_boundary(f, fallback, prog);
  fallback.residual = kkt_residual(f, prog, fallback);
  fallback.converged = fallback.residual <= 1e-8;

  // Active-set polish. Initial working set: multiplier larger than slack.
  auto initial = [&](double factor) {
    std::vector<int> act;
    for (int i = 0; i < hz.size(); ++i)
      if (krow[i] * factor > -hz[i]) act.push_back(i);
    return act;
  };
  const double factors[] = {1.0, 1e3, 1e-3, 1e6};
  for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
    std::vector<int> act = initial(factors[attempt % 4]);
    for (int iter = 0; iter < opt.active_set_cap; ++iter) {
      Vec ww = N.transpose() * bar.z;
      double l0 = bar.lambda0;
      Vec ka(act.size());
      for (std::size_t j = 0; j < act.size(); ++j) ka[j] = krow[act[j]];
      if (!polish(f, prog, rows, N, act, ww, l0, ka)) break;
      const Vec z = N * ww;
      const Vec hz2 = rows.H * z;
      const double zs = std::max(1.0, z.lpNorm<Eigen::Infinity>());
      int worst_add = -1, worst_drop = -1;
      double vmax = 1e-12 * zs, kmin = -1e-10;
      std::vector<char> in(hz2.size(), 0);
      for (int i : act) in[i] = 1;
      for (int i = 0; i < hz2.size(); ++i)
        if (!in[i] && hz2[i] > vmax) {
          vmax = hz2[i];
          worst_add = i;
        }
      for (std::size_t j = 0; j < act.size(); ++j)
        if (ka[j] < kmin) {
          kmin = ka[j];
          worst_drop = static_cast<int>(j);
        }
      if (worst_add >= 0) {
        act.push_back(worst_add);
        std::sort(act.begin(), act.end());
        continue;
      }
      if (worst_drop >= 0) {
        act.erase(act.begin() + worst_drop);
        continue;
      }
      if (!(l0 > 0.0)) break;
      ConeResult out;
      out.z = z;
      out.lambda0 = l0;
      Vec kfull = Vec::Zero(hz2.size());
      for (std::size_t j = 0; j < act.size(); ++j) kfull[act[j]] = std::max(0.0, ka[j]);
      out.kappa = kappa_layout(prog, rows, kfull);
      // Active rows hold exactly.
      for (int i : act)
        if (i < static_cast<int>(rows.sign_group.size())) out.z[rows.sign_group[i]] = 0.0;
      if (prog.E.rows() > 0)
        out.eta = solve_eta(prog.E, prog.c - l0 * embed_grad(f.grad(out.z.head(prog.p)), n) -
                                        rows.H.transpose() * kfull);
      out.value = prog.c.dot(out.z);
      scale_to_boundary(f, out, prog);
      out.residual = kkt_residual(f, prog, out);
      out.iterations = newton + iter + 1;
      out.method = "active-set";
      if (out.residual <= fallback.residual || out.residual <= 1e-10) {
        out.converged = out.residual <= 1e-8;
        return out;
      }
      break;
    }
  }
  return fallback;
}

}  // namespace rarewalk
