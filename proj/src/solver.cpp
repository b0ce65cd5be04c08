#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rarewalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConverged = 1e-8;

enum class Obj { Linear, MinSupport, Rearrangement };

// Request in full coordinates. sign: 2 pinned to zero, 1 nonneg, -1 nonpos, 0 free.
struct Spec {
  std::string kind;
  std::vector<int> index;
  Obj obj = Obj::Linear;
  Vec c;
  std::vector<int> sign;
  bool sum_zero = false;
  int L = 0;
};

Sign to_sign(int s) { return s > 0 ? Sign::NonNeg : (s < 0 ? Sign::NonPos : Sign::Free); }

void check_index(int k, int d) {
  if (k < 0 || k >= d) throw Error(ErrorCode::InvalidArgument, "index " + std::to_string(k) + " outside [0, d)");
}

void check_distinct(std::vector<int> v, int d) {
  for (int k : v) check_index(k, d);
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw Error(ErrorCode::InvalidArgument, "indices must be distinct");
}

std::string path_name(SolvePath p) {
  switch (p) {
    case SolvePath::Auto: return "auto";
    case SolvePath::Faces: return "faces";
    case SolvePath::Nested: return "nested";
    case SolvePath::Homogeneous: return "homogeneous";
    case SolvePath::ActiveSet: return "active-set";
  }
  return "";
}

ConeProgram build_program(const Spec& s, const ReducedCgf& f) {
  const int p = f.size();
  const Vec n = f.counts();
  const auto& members = f.map().members;
  ConeProgram prog;
  prog.p = p;
  prog.sign.resize(p);
  for (int g = 0; g < p; ++g) prog.sign[g] = to_sign(s.sign[members[g][0]]);
  Mat Ey;
  if (s.sum_zero) Ey = n.transpose();
  switch (s.obj) {
    case Obj::Linear: {
      prog.c = Vec::Zero(p);
      for (int g = 0; g < p; ++g)
        for (int i : members[g]) prog.c[g] += s.c[i];
      prog.E = Ey;
      break;
    }
    case Obj::MinSupport: {
      // z = (y, t): maximise t with t <= y_g.
      prog.q = 1;
      prog.c = Vec::Zero(p + 1);
      prog.c[p] = 1.0;
      prog.G = Mat::Zero(p, p + 1);
      for (int g = 0; g < p; ++g) {
        prog.G(g, g) = -1.0;
        prog.G(g, p) = 1.0;
      }
      const Vec y0 = sign_interior(f, prog.sign, Mat());
      prog.interior = Vec(p + 1);
      prog.interior.head(p) = y0;
      prog.interior[p] = 0.5 * y0.minCoeff();
      break;
    }
    case Obj::Rearrangement: {
      // z = (y, alpha, pi): maximise alpha with pi_g <= |y_g|, pi_g <= alpha,
      // sum_g n_g pi_g >= L alpha.
      const int q = 1 + p, nz = p + q, ia = p;
      prog.q = q;
      prog.c = Vec::Zero(nz);
      prog.c[ia] = 1.0;
      prog.G = Mat::Zero(2 * p + 1, nz);
      for (int g = 0; g < p; ++g) {
        const double sg = prog.sign[g] == Sign::NonNeg ? 1.0 : -1.0;
        prog.G(g, ia + 1 + g) = 1.0;
        prog.G(g, g) = -sg;
        prog.G(p + g, ia + 1 + g) = 1.0;
        prog.G(p + g, ia) = -1.0;
        prog.G(2 * p, ia + 1 + g) = -n[g];
      }
      prog.G(2 * p, ia) = s.L;
      if (s.sum_zero) {
        prog.E = Mat::Zero(1, nz);
        prog.E.leftCols(p) = Ey;
      }
      const Vec y0 = sign_interior(f, prog.sign, Ey);
      const double ntot = n.sum();
      const double alpha = 0.5 * y0.cwiseAbs().minCoeff();
      const double delta = 0.5 * (1.0 - s.L / ntot);
      if (!(alpha > 0.0) || !(delta > 0.0))
        throw Error(ErrorCode::Domain, "rearrangement program has no strictly feasible point");
      prog.interior = Vec(nz);
      prog.interior.head(p) = y0;
      prog.interior[ia] = alpha;
      prog.interior.tail(p).setConstant((1.0 - delta) * alpha);
      break;
    }
  }
  return prog;
}

ConeResult run_path(const ReducedCgf& f, const ConeProgram& prog, SolvePath path, bool linear) {
  int nsigned = 0;
  for (Sign s : prog.sign)
    if (s != Sign::Free) ++nsigned;
  switch (path) {
    case SolvePath::Faces: return solve_faces(f, prog);
    case SolvePath::Nested: return solve_nested(f, prog);
    case SolvePath::ActiveSet: return solve_barrier(f, prog);
    case SolvePath::Homogeneous: throw Error(ErrorCode::Unsupported, "homogeneous path applies to i.i.d. Siegmund beta only");
    case SolvePath::Auto: break;
  }
  if (linear && f.quadratic() && nsigned <= 12) return solve_faces(f, prog);
  if (linear && f.separable() && prog.E.rows() <= 1) return solve_nested(f, prog);
  return solve_barrier(f, prog);
}

std::vector<double> label_of(const Spec& s, const std::vector<int>& classes, int i) {
  return {static_cast<double>(classes[i]), static_cast<double>(s.sign[i]), s.obj == Obj::Linear ? s.c[i] : 0.0};
}

TiltSolution solve_spec(const Model& model, const Spec& s, const SolveOptions& opt, SolverCache* cache) {
  const int d = model.dim();
  std::vector<int> classes(d);
  if (opt.symmetry) {
    classes = model.symmetry_classes();
  } else {
    for (int i = 0; i < d; ++i) classes[i] = i;
  }
  std::map<std::vector<double>, int> ids;
  std::map<std::vector<double>, int> count;
  std::vector<int> labels(d, -1);
  for (int i = 0; i < d; ++i) {
    if (s.sign[i] == 2) continue;
    const auto key = label_of(s, classes, i);
    auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
    labels[i] = it->second;
    ++count[key];
  }
  std::ostringstream key;
  key.precision(17);
  key << s.kind << '|' << static_cast<int>(s.obj) << '|' << s.L << '|' << s.sum_zero << '|' << path_name(opt.path)
      << '|' << opt.symmetry;
  for (const auto& [k, c] : count) {
    key << '|';
    for (double v : k) key << v << ',';
    key << c;
  }
  SolverCache::Entry e;
  const bool hit = cache && cache->find(key.str(), e);
  if (!hit) {
    const GroupMap map = GroupMap::from_labels(labels);
    const ReducedCgf f(model, map);
    const ConeProgram prog = build_program(s, f);
    const ConeResult r = run_path(f, prog, opt.path, s.obj == Obj::Linear);
    const int unpinned = static_cast<int>(std::count_if(s.sign.begin(), s.sign.end(), [](int v) { return v != 2; }));
    e.value = r.value;
    e.lambda0 = r.lambda0;
    e.residual = r.residual;
    e.converged = r.residual <= kConverged;
    e.eta = r.eta;
    e.path = (f.size() < unpinned ? "symmetry/" : "") + r.method;
    for (int g = 0; g < f.size(); ++g) {
      const auto k = label_of(s, classes, map.members[g][0]);
      e.by_label[k] = r.z[g];
      e.kappa_by_label[k] = r.kappa.size() ? r.kappa[g] : 0.0;
    }
    if (cache) cache->put(key.str(), e);
  }
  TiltSolution out;
  out.kind = s.kind;
  out.index = s.index;
  out.tilt = Vec::Zero(d);
  out.kappa = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (s.sign[i] == 2) continue;
    const auto k = label_of(s, classes, i);
    out.tilt[i] = e.by_label.at(k);
    out.kappa[i] = e.kappa_by_label.at(k);
  }
  out.lambda0 = e.lambda0;
  out.eta = e.eta;
  out.residual = e.residual;
  out.converged = e.converged;
  out.path = e.path + (hit ? "+cache" : "");
  switch (s.obj) {
    case Obj::Linear: out.value = s.c.dot(out.tilt); break;
    case Obj::MinSupport: {
      double m = kInf;
      for (int i = 0; i < d; ++i)
        if (s.sign[i] != 2) m = std::min(m, out.tilt[i]);
      out.value = m;
      break;
    }
    case Obj::Rearrangement: out.value = rearrangement_min(out.tilt, s.L); break;
  }
  return out;
}

Spec beta_spec(const Problem& pb, const std::vector<int>& A, int d) {
  Spec s;
  s.kind = "beta";
  s.index = A;
  s.c = Vec::Zero(d);
  s.sign.assign(d, -1);
  for (int k : A) s.sign[k] = 1;
  switch (pb.kind) {
    case ProblemKind::Siegmund:
      for (int i = 0; i < d; ++i) s.c[i] = s.sign[i] > 0 ? pb.u : -pb.ell;
      break;
    case ProblemKind::Gap:
      for (int k : A) s.c[k] = 1.0;
      s.sum_zero = true;
      break;
    case ProblemKind::SumIntersection:
      s.obj = Obj::Rearrangement;
      s.L = pb.L;
      break;
  }
  return s;
}

TiltSolution beta_homogeneous(const Model& model, const Problem& pb, const std::vector<int>& A) {
  Scalar sc;
  if (pb.kind != ProblemKind::Siegmund || !iid_component(model, &sc))
    throw Error(ErrorCode::Unsupported, "homogeneous path needs an i.i.d. model and the Siegmund problem");
  const int d = model.dim();
  const int a = static_cast<int>(A.size());
  const HomogeneousTable t = homogeneous_siegmund(sc, d, pb.ell, pb.u);
  const HomogeneousPoint& hp = t.points[a - 1];
  TiltSolution out;
  out.kind = "beta";
  out.index = A;
  out.tilt = Vec::Constant(d, hp.vminus);
  for (int k : A) out.tilt[k] = hp.vplus;
  out.value = hp.rate;
  out.lambda0 = pb.u / sc.d1(hp.vplus);
  out.kappa = Vec::Zero(d);
  double res = std::abs(model.cgf(out.tilt));
  for (int i = 0; i < d; ++i) {
    if (out.tilt[i] > 0.0 || std::find(A.begin(), A.end(), i) != A.end()) continue;
    const double r = -pb.ell - out.lambda0 * sc.d1(out.tilt[i]);
    if (out.tilt[i] == 0.0) {
      out.kappa[i] = r;
      res = std::max(res, std::max(0.0, -r) / std::max(1.0, pb.ell));
    } else {
      res = std::max(res, std::abs(r) / std::max(1.0, pb.ell));
    }
  }
  out.residual = res;
  out.converged = res <= kConverged;
  out.path = "homogeneous";
  return out;
}

}  // namespace

json TiltSolution::to_json() const {
  json j;
  j["kind"] = kind;
  j["index"] = index;
  j["value"] = value;
  j["tilt"] = std::vector<double>(tilt.data(), tilt.data() + tilt.size());
  j["lambda0"] = lambda0;
  j["residual"] = residual;
  j["converged"] = converged;
  j["path"] = path;
  return j;
}

TiltSolution TiltSolution::from_json(const json& j) {
  TiltSolution s;
  s.kind = j.at("kind").get<std::string>();
  s.index = j.at("index").get<std::vector<int>>();
  s.value = j.at("value").get<double>();
  const auto t = j.at("tilt").get<std::vector<double>>();
  s.tilt = Eigen::Map<const Vec>(t.data(), static_cast<Eigen::Index>(t.size()));
  s.lambda0 = j.value("lambda0", 0.0);
  s.residual = j.value("residual", 0.0);
  s.converged = j.value("converged", true);
  s.path = j.value("path", std::string());
  s.kappa = Vec::Zero(s.tilt.size());
  return s;
}

bool SolverCache::find(const std::string& key, Entry& out) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(key);
  if (it == map_.end()) return false;
  out = it->second;
  return true;
}

void SolverCache::put(const std::string& key, Entry e) {
  std::lock_guard<std::mutex> lock(mu_);
  map_.emplace(key, std::move(e));
}

std::size_t SolverCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.size();
}

bool iid_component(const Model& model, Scalar* out) {
  if (auto* ind = dynamic_cast<const IndependentModel*>(&model)) {
    const auto& c = ind->components();
    for (const auto& s : c)
      if (!(s == c[0])) return false;
    if (out) *out = c[0];
    return true;
  }
  if (auto* mv = dynamic_cast<const MvNormalModel*>(&model)) {
    const Mat& S = mv->cov();
    const Vec mu = mv->mean();
    for (int i = 0; i < S.rows(); ++i) {
      if (mu[i] != mu[0] || S(i, i) != S(0, 0)) return false;
      for (int j = 0; j < S.cols(); ++j)
        if (i != j && S(i, j) != 0.0) return false;
    }
    if (out) *out = Scalar::normal(mu[0], S(0, 0));
    return true;
  }
  return false;
}

double radial_root(const Model& model, const Vec& v) {
  model.check_dim(v);
  const double slope = model.grad(Vec::Zero(v.size())).dot(v);
  if (!(slope < 0.0)) throw Error(ErrorCode::Domain, "direction has no negative drift, no positive root");
  auto phi = [&](double s) {
    const Vec t = s * v;
    return model.in_domain(t) ? model.cgf(t) : kInf;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && phi(hi) < 0.0; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (phi(hi) < 0.0) throw Error(ErrorCode::Domain, "no positive root along the direction");
  if (lo == 0.0) {
    // Find a negative point inside (0, hi).
    double s = hi;
    for (int i = 0; i < 200 && !(phi(s) < 0.0); ++i) s *= 0.5;
    if (!(phi(s) < 0.0)) throw Error(ErrorCode::Domain, "no negative point along the direction");
    lo = s;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  double s = std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi;
  for (int i = 0; i < 3; ++i) {
    const double f = phi(s);
    const double df = model.grad(s * v).dot(v);
    if (f == 0.0 || !(df > 0.0)) break;
    const double ns = s - f / df;
    if (!(std::abs(phi(ns)) < std::abs(f))) break;
    s = ns;
  }
  return s;
}

TiltSolution solve_beta(const Model& model, const Problem& pb, const std::vector<int>& A, const SolveOptions& opt,
                        SolverCache* cache) {
  const int d = model.dim();
  pb.validate(d);
  if (!is_rare_set(A, d, pb))
    throw Error(ErrorCode::InvalidArgument, "beta needs a rare index set, got " + set_label(A));
  if (opt.path == SolvePath::Homogeneous) return beta_homogeneous(model, pb, A);
  return solve_spec(model, beta_spec(pb, A, d), opt, cache);
}

TiltSolution solve_gamma_single(const Model& model, const Problem& pb, int k) {
  const int d = model.dim();
  if (pb.kind != ProblemKind::Siegmund) throw Error(ErrorCode::Unsupported, "gamma_single applies to the Siegmund problem");
  pb.validate(d);
  check_index(k, d);
  TiltSolution out;
  out.kind = "gamma";
  out.index = {k};
  const double z = model.marginal_root(k);
  out.tilt = Vec::Zero(d);
  out.tilt[k] = z;
  out.value = pb.u * z;
  out.lambda0 = pb.u / model.grad(out.tilt)[k];
  out.kappa = Vec::Zero(d);
  out.residual = std::abs(model.cgf(out.tilt));
  out.converged = out.residual <= kConverged;
  out.path = dynamic_cast<const MvNormalModel*>(&model) ? "closed-form" : "root";
  return out;
}

TiltSolution solve_gamma_pair(const Model& model, const Problem& pb, int k, int k2, const SolveOptions& opt,
                              SolverCache* cache) {
  const int d = model.dim();
  if (pb.kind != ProblemKind::Siegmund) throw Error(ErrorCode::Unsupported, "gamma_pair applies to the Siegmund problem");
  pb.validate(d);
  check_distinct({k, k2}, d);
  Spec s;
  s.kind = "gamma_pair";
  s.index = {std::min(k, k2), std::max(k, k2)};
  s.c = Vec::Zero(d);
  s.sign.assign(d, 2);
  for (int i : s.index) {
    s.c[i] = pb.u;
    s.sign[i] = 1;
  }
  return solve_spec(model, s, opt, cache);
}

TiltSolution solve_gap_pair(const Model& model, const Problem& pb, int l, int lp) {
  const int d = model.dim();
  if (pb.kind != ProblemKind::Gap) throw Error(ErrorCode::Unsupported, "gap_pair applies to the gap problem");
  pb.validate(d);
  check_index(l, d);
  check_index(lp, d);
  if (!(l < pb.m) || lp < pb.m) throw Error(ErrorCode::InvalidArgument, "gap_pair needs l in [m] and l' outside [m]");
  Vec v = Vec::Zero(d);
  v[l] = -1.0;
  v[lp] = 1.0;
  TiltSolution out;
  out.kind = "gap_pair";
  out.index = {l, lp};
  double t;
  if (auto* mv = dynamic_cast<const MvNormalModel*>(&model)) {
    const Mat& S = mv->cov();
    const Vec mu = mv->mean();
    const double var = S(l, l) + S(lp, lp) - 2.0 * S(l, lp);
    t = 2.0 * (mu[l] - mu[lp]) / var;
    if (!(t > 0.0)) throw Error(ErrorCode::Domain, "gap_pair needs mu_l > mu_l'");
    out.path = "closed-form";
  } else {
    t = radial_root(model, v);
    out.path = "root";
  }
  out.tilt = t * v;
  out.value = t;
  out.lambda0 = 1.0 / model.grad(out.tilt).dot(v);
  out.kappa = Vec::Zero(d);
  out.residual = std::abs(model.cgf(out.tilt));
  out.converged = out.residual <= kConverged;
  return out;
}

TiltSolution solve_gap_quad(const Model& model, const Problem& pb, int l1, int l2, int l1p, int l2p,
                            const SolveOptions& opt, SolverCache* cache) {
  const int d = model.dim();
  if (pb.kind != ProblemKind::Gap) throw Error(ErrorCode::Unsupported, "gap_quad applies to the gap problem");
  pb.validate(d);
  check_distinct({l1, l2, l1p, l2p}, d);
  if (!(l1 < pb.m && l2 < pb.m) || l1p < pb.m || l2p < pb.m)
    throw Error(ErrorCode::InvalidArgument, "gap_quad needs l1, l2 in [m] and l1', l2' outside [m]");
  Spec s;
  s.kind = "gap_quad";
  s.index = {std::min(l1, l2), std::max(l1, l2), std::min(l1p, l2p), std::max(l1p, l2p)};
  s.c = Vec::Zero(d);
  s.sign.assign(d, 2);
  s.sign[l1] = s.sign[l2] = -1;
  s.sign[l1p] = s.sign[l2p] = 1;
  s.c[l1p] = s.c[l2p] = 1.0;
  s.sum_zero = true;
  return solve_spec(model, s, opt, cache);
}

TiltSolution solve_si_zA(const Model& model, const Problem& pb, const std::vector<int>& A, const SolveOptions& opt,
                         SolverCache* cache) {
  const int d = model.dim();
  if (pb.kind != ProblemKind::SumIntersection) throw Error(ErrorCode::Unsupported, "si_zA applies to the sum-intersection problem");
  pb.validate(d);
  check_distinct(A, d);
  if (static_cast<int>(A.size()) != pb.L) throw Error(ErrorCode::InvalidArgument, "si_zA needs |A| = L");
  Spec s;
  s.kind = "si_zA";
  s.index = A;
  std::sort(s.index.begin(), s.index.end());
  s.obj = Obj::MinSupport;
  s.c = Vec::Zero(d);
  s.sign.assign(d, 2);
  for (int k : A) s.sign[k] = 1;
  s.L = pb.L;
  return solve_spec(model, s, opt, cache);
}

TiltSolution solve_si_sB(const Model& model, const Problem& pb, const std::vector<int>& B, const SolveOptions& opt,
                         SolverCache* cache) {
  const int d = model.dim();
  if (pb.kind != ProblemKind::SumIntersection) throw Error(ErrorCode::Unsupported, "si_sB applies to the sum-intersection problem");
  pb.validate(d);
  check_distinct(B, d);
  if (static_cast<int>(B.size()) != pb.L + 1) throw Error(ErrorCode::InvalidArgument, "si_sB needs |B| = L + 1");
  Spec s;
  s.kind = "si_sB";
  s.index = B;
  std::sort(s.index.begin(), s.index.end());
  s.obj = Obj::Rearrangement;
  s.c = Vec::Zero(d);
  s.sign.assign(d, 2);
  for (int k : B) s.sign[k] = 1;
  s.L = pb.L;
  return solve_spec(model, s, opt, cache);
}

HomogeneousTable homogeneous_siegmund(const Scalar& s, int d, double ell, double u) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  if (!(ell > 0.0 && u > 0.0)) throw Error(ErrorCode::InvalidArgument, "ell and u must be positive");
  HomogeneousTable t;
  t.z = siegmund_root(s);
  t.kappa0 = -s.mean();
  t.kappa1 = s.d1(t.z);
  t.gamma_is_beta = (ell / u) * t.kappa1 <= t.kappa0;
  const double vmin = s.inv_d1(u * t.kappa0 / ell);
  auto vminus = [&](double vp) { return std::min(0.0, s.inv_d1(-(ell / u) * s.d1(vp))); };
  for (int a = 1; a <= d; ++a) {
    HomogeneousPoint hp;
    hp.a = a;
    if (a == d || t.gamma_is_beta) {
      hp.vplus = t.z;
      hp.vminus = 0.0;
    } else {
      auto F = [&](double vp) {
        const double vm = vminus(vp);
        if (!std::isfinite(vm)) return kInf;
        return a * s.cgf(vp) + (d - a) * s.cgf(vm);
      };
      double lo = vmin, hi = t.z;
      for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < 0.0 ? lo : hi) = mid;
      }
      hp.vplus = std::abs(F(lo)) <= std::abs(F(hi)) ? lo : hi;
      hp.vminus = vminus(hp.vplus);
    }
    hp.rate = u * a * hp.vplus - ell * (d - a) * hp.vminus;
    t.points.push_back(hp);
  }
  return t;
}

json VBound::to_json() const {
  return {{"region", region},
          {"lower_bound", std::isfinite(lower_bound) ? json(lower_bound) : json("-inf")},
          {"feasible", feasible},
          {"gamma", std::vector<double>(gamma.data(), gamma.data() + gamma.size())},
          {"witness", std::vector<double>(witness.data(), witness.data() + witness.size())}};
}

VBound v_lower_bound(const Model& model, const Problem& pb, const std::vector<int>& A, const Vec& gamma,
                     const Vec& witness) {
  model.check_dim(gamma);
  model.check_dim(witness);
  if (!(model.in_domain(gamma) && model.cgf(gamma) <= 1e-10))
    throw Error(ErrorCode::Domain, "gamma must satisfy Lambda(gamma) <= 0");
  VBound b;
  b.region = A;
  b.gamma = gamma;
  b.witness = witness;
  const Vec diff = witness - gamma;
  b.feasible = model.in_domain(diff) && model.cgf(diff) <= 1e-10;
  b.lower_bound = b.feasible ? support_value(witness, A, pb) : -kInf;
  if (!std::isfinite(b.lower_bound)) b.feasible = false;
  return b;
}

double rate_function(const Vec& x, const Model& model) {
  auto* mv = dynamic_cast<const MvNormalModel*>(&model);
  if (!mv) throw Error(ErrorCode::Unsupported, "rate_function has a closed form for normal increments only");
  model.check_dim(x);
  Eigen::LLT<Mat> llt(mv->cov());
  const Vec mu = mv->mean();
  const Vec Sm = llt.solve(mu), Sx = llt.solve(x);
  return -x.dot(Sm) + std::sqrt(mu.dot(Sm) * x.dot(Sx));
}

}  // namespace rarewalk
