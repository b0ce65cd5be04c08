#include "proposal.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace rarewalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

std::string idx_label(const std::string& name, const std::vector<int>& v) {
  std::ostringstream os;
  os << name << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

void require_converged(const TiltSolution& s) {
  if (!s.converged) {
    std::ostringstream os;
    os << s.kind << set_label(s.index) << " did not converge (residual " << s.residual << ")";
    throw Error(ErrorCode::NotConverged, os.str());
  }
}

// Keeps the n smallest margins, smallest first.
struct MarginKeeper {
  std::size_t n;
  std::vector<MarginRow> rows;
  void add(const std::string& label, double lhs, double rhs) {
    MarginRow r{label, lhs, lhs - rhs};
    rows.push_back(r);
    std::sort(rows.begin(), rows.end(), [](const MarginRow& a, const MarginRow& b) { return a.margin < b.margin; });
    if (rows.size() > n) rows.pop_back();
  }
};

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::vector<int>> all_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(k);
  std::iota(c.begin(), c.end(), 0);
  do out.push_back(c);
  while (next_combination(c, n));
  return out;
}

std::uint64_t mask_of(const std::vector<int>& s) {
  std::uint64_t m = 0;
  for (int k : s) m |= std::uint64_t{1} << k;
  return m;
}

bool block_exchangeable(const Model& model, int m) {
  const auto c = model.symmetry_classes();
  for (int i = 1; i < m; ++i)
    if (c[i] != c[0]) return false;
  for (int i = m + 1; i < model.dim(); ++i)
    if (c[i] != c[m]) return false;
  return true;
}

std::vector<int> swap_set(int m, int l, int lp) {
  std::vector<int> A;
  for (int i = 0; i < m; ++i)
    if (i != l) A.push_back(i);
  A.push_back(lp);
  std::sort(A.begin(), A.end());
  return A;
}

void finish(EfficiencyReport& r) {
  r.holds = r.lhs >= r.rhs;
}

struct SiegmundPieces {
  std::vector<TiltSolution> betas, gammas;
  std::vector<TiltSolution> pairs;  // k < k2, row-major
};

int pair_index(int d, int k, int k2) {
  if (k > k2) std::swap(k, k2);
  return k * d - k * (k + 1) / 2 + (k2 - k - 1);
}

SiegmundPieces siegmund_pieces(const Model& model, const Problem& pb, bool need_gamma, bool need_pairs,
                               bool representatives, const BuildOptions& opt, SolverCache& cache) {
  const int d = model.dim();
  SiegmundPieces s;
  const int nk = representatives ? 1 : d;
  s.betas.resize(nk);
  parallel_for(nk, opt.workers, [&](std::size_t k) {
    s.betas[k] = solve_beta(model, pb, {static_cast<int>(k)}, opt.solve, &cache);
  });
  for (const auto& b : s.betas) require_converged(b);
  if (need_gamma) {
    s.gammas.resize(nk);
    for (int k = 0; k < nk; ++k) s.gammas[k] = solve_gamma_single(model, pb, k);
  }
  if (need_pairs && d >= 2) {
    const int np = representatives ? 1 : d * (d - 1) / 2;
    if (static_cast<std::size_t>(np) > opt.cap)
      throw Error(ErrorCode::Limit, "pair tilts exceed the cap: " + std::to_string(np) + " needed");
    s.pairs.resize(np);
    parallel_for(np, opt.workers, [&](std::size_t i) {
      int k = 0, rem = static_cast<int>(i);
      while (rem >= d - k - 1) {
        rem -= d - k - 1;
        ++k;
      }
      s.pairs[i] = solve_gamma_pair(model, pb, k, k + 1 + rem, opt.solve, &cache);
    });
    for (const auto& p : s.pairs) require_converged(p);
  }
  return s;
}

EfficiencyReport siegmund_report(const Model& model, const SiegmundPieces& s,
                                 const std::string& condition, bool representatives, const BuildOptions& opt) {
  const int d = model.dim();
  EfficiencyReport r;
  r.condition = condition;
  r.r_star = kInf;
  for (const auto& b : s.betas) r.r_star = std::min(r.r_star, b.value);
  r.rhs = 2.0 * r.r_star;
  r.lhs = kInf;
  MarginKeeper keep{opt.margin_rows, {}};
  if (d >= 2) {
    const int nk = representatives ? 1 : d;
    for (int k = 0; k < nk; ++k)
      for (int k2 = 0; k2 < (representatives ? 2 : d); ++k2) {
        if (k2 == k) continue;
        const TiltSolution& p = s.pairs[representatives ? 0 : pair_index(d, k, k2)];
        double lhs;
        std::string label;
        if (condition == "H1") {
          const double uz = s.gammas[k].value;
          lhs = uz + p.value;
          label = idx_label("gamma", {k}) + "+" + idx_label("gamma_pair", p.index);
        } else {
          lhs = 2.0 * p.value;
          label = "2*" + idx_label("gamma_pair", p.index);
        }
        r.lhs = std::min(r.lhs, lhs);
        keep.add(label, lhs, r.rhs);
      }
  }
  r.witness_gaps = keep.rows;
  if (representatives) r.note = "exchangeable model: one representative per symmetry class";
  finish(r);
  return r;
}

}  // namespace

std::size_t MixtureProposal::add(const Vec& theta, double lambda, const std::string& label) {
  thetas.push_back(theta);
  lambdas.push_back(lambda);
  provenance.push_back({label});
  return thetas.size() - 1;
}

void MixtureProposal::deduplicate(double tol) {
  const std::size_t n = thetas.size();
  if (n < 2) return;
  const int d = dim();
  std::mt19937_64 eng(0x5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec r(d);
  for (int i = 0; i < d; ++i) r[i] = u(eng);
  std::vector<double> proj(n);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    proj[i] = r.dot(thetas[i]);
    scale = std::max(scale, thetas[i].lpNorm<Eigen::Infinity>());
  }
  const double eps = tol * scale;
  const double window = eps * r.lpNorm<1>();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
  std::vector<std::size_t> rep(n);
  std::iota(rep.begin(), rep.end(), 0);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = order[a];
    for (std::size_t b = a; b-- > 0;) {
      const std::size_t j = order[b];
      if (proj[i] - proj[j] > window) break;
      if (rep[j] != j) continue;
      if ((thetas[i] - thetas[j]).lpNorm<Eigen::Infinity>() <= eps) {
        rep[i] = j;
        break;
      }
    }
  }
  // Representative of each class is its smallest index.
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = rep[i];
  std::vector<std::size_t> low(n, n);
  for (std::size_t i = 0; i < n; ++i) low[root[i]] = std::min(low[root[i]], i);
  std::vector<Vec> t2;
  std::vector<double> l2;
  std::vector<std::vector<std::string>> p2;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t keep = low[root[i]];
    if (slot[keep] < 0) {
      slot[keep] = static_cast<long>(t2.size());
      t2.push_back(thetas[keep]);
      l2.push_back(lambdas[keep]);
      p2.emplace_back();
    }
    for (const auto& s : provenance[i]) p2[slot[keep]].push_back(s);
  }
  thetas = std::move(t2);
  lambdas = std::move(l2);
  provenance = std::move(p2);
}

void MixtureProposal::validate(const Model& model) const {
  if (thetas.empty()) throw Error(ErrorCode::InvalidArgument, "proposal is empty");
  if (lambdas.size() != thetas.size() || provenance.size() != thetas.size())
    throw Error(ErrorCode::InvalidArgument, "proposal tables have different lengths");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    model.check_dim(thetas[i]);
    if (!model.in_domain(thetas[i])) throw Error(ErrorCode::Domain, "tilt " + std::to_string(i) + " outside the domain");
    const double l = model.cgf(thetas[i]);
    if (std::abs(l - lambdas[i]) > 1e-10 || lambdas[i] > 1e-10)
      throw Error(ErrorCode::Domain, "tilt " + std::to_string(i) + " has inconsistent or positive Lambda");
  }
}

json EfficiencyReport::to_json() const {
  json rows = json::array();
  for (const auto& r : witness_gaps) rows.push_back({{"label", r.label}, {"lhs", num(r.lhs)}, {"margin", num(r.margin)}});
  json j = {{"condition", condition}, {"holds", holds},       {"lhs", num(lhs)},
            {"rhs", num(rhs)},        {"r_star", num(r_star)}, {"witness_gaps", rows}};
  if (!note.empty()) j["note"] = note;
  return j;
}

bool exchangeable(const Model& model) {
  const auto c = model.symmetry_classes();
  return std::all_of(c.begin(), c.end(), [&](int x) { return x == c[0]; });
}

EfficiencyReport siegmund_condition(const Model& model, double ell, double u, const std::string& condition,
                                    const BuildOptions& opt) {
  if (condition == "direct") return check_direct_siegmund_homogeneous(model, ell, u, opt);
  if (condition != "H1" && condition != "H2") throw Error(ErrorCode::Unsupported, "unknown Siegmund condition " + condition);
  const Problem pb = Problem::siegmund(ell, u);
  pb.validate(model.dim());
  const bool rep = exchangeable(model) && model.dim() >= 2;
  SolverCache cache;
  const auto s = siegmund_pieces(model, pb, condition == "H1", true, rep, opt, cache);
  return siegmund_report(model, s, condition, rep, opt);
}

EfficiencyReport check_direct_siegmund_homogeneous(const Model& model, double ell, double u, const BuildOptions& opt) {
  const int d = model.dim();
  const Problem pb = Problem::siegmund(ell, u);
  pb.validate(d);
  if (!exchangeable(model)) throw Error(ErrorCode::Unsupported, "direct condition needs an exchangeable model");
  EfficiencyReport r;
  r.condition = "direct";
  Scalar sc;
  const bool iid = iid_component(model, &sc);
  SolveOptions so = opt.solve;
  if (iid && so.path == SolvePath::Auto) so.path = SolvePath::Homogeneous;
  SolverCache cache;
  const TiltSolution b1 = solve_beta(model, pb, {0}, so, &cache);
  require_converged(b1);
  r.r_star = b1.value;
  r.rhs = 2.0 * b1.value;
  r.lhs = kInf;
  MarginKeeper keep{opt.margin_rows, {}};
  std::vector<double> bounds(d + 1, kInf);
  parallel_for(d >= 2 ? d - 1 : 0, opt.workers, [&](std::size_t i) {
    const int m = static_cast<int>(i) + 2;
    std::vector<int> A(m);
    std::iota(A.begin(), A.end(), 0);
    const TiltSolution bA = solve_beta(model, pb, A, so, &cache);
    require_converged(bA);
    bounds[m] = v_lower_bound(model, pb, A, b1.tilt, bA.tilt + b1.tilt).lower_bound;
  });
  for (int m = 2; m <= d; ++m) {
    r.lhs = std::min(r.lhs, bounds[m]);
    keep.add("beta[{0.." + std::to_string(m - 1) + "}]+beta[{0}]", bounds[m], r.rhs);
  }
  r.witness_gaps = keep.rows;
  r.note = iid ? "i.i.d. coordinates: homogeneous KKT solutions" : "exchangeable model: A = {0..m-1}";
  finish(r);
  return r;
}

BuildResult build_siegmund(const Model& model, double ell, double u, const std::string& variant,
                           const BuildOptions& opt) {
  const int d = model.dim();
  const Problem pb = Problem::siegmund(ell, u);
  pb.validate(d);
  if (variant != "theta0" && variant != "theta1" && variant != "theta2")
    throw Error(ErrorCode::InvalidArgument, "Siegmund variant must be theta0, theta1 or theta2");
  SolverCache cache;
  const bool v1 = variant == "theta1", v2 = variant == "theta2";
  const auto s = siegmund_pieces(model, pb, v1 || d >= 2, d >= 2, false, opt, cache);
  BuildResult out;
  MixtureProposal& P = out.proposal;
  P.problem = pb;
  P.variant = variant;
  for (const auto& b : s.betas) {
    P.add(b.tilt, model.cgf(b.tilt), "beta[" + set_label(b.index) + "]");
    out.solutions.push_back(b);
  }
  if (v1)
    for (const auto& g : s.gammas) {
      P.add(g.tilt, model.cgf(g.tilt), idx_label("gamma", g.index));
      out.solutions.push_back(g);
    }
  if (v2)
    for (const auto& p : s.pairs) {
      P.add(p.tilt, model.cgf(p.tilt), idx_label("gamma_pair", p.index));
      out.solutions.push_back(p);
    }
  P.deduplicate();
  if (d == 1) {
    out.report.condition = "none";
    out.report.r_star = s.betas[0].value;
    out.report.rhs = 2.0 * out.report.r_star;
    out.report.lhs = kInf;
    out.report.note = "one-dimensional walk: the single tilt is the Siegmund root";
    finish(out.report);
  } else if (v1 || v2) {
    out.report = siegmund_report(model, s, v1 ? "H1" : "H2", false, opt);
  } else if (exchangeable(model)) {
    out.report = check_direct_siegmund_homogeneous(model, ell, u, opt);
  } else {
    out.report.condition = "direct";
    out.report.r_star = kInf;
    for (const auto& b : s.betas) out.report.r_star = std::min(out.report.r_star, b.value);
    out.report.rhs = 2.0 * out.report.r_star;
    out.report.lhs = -kInf;
    out.report.note = "direct condition is only evaluated for exchangeable models";
    out.report.holds = false;
  }
  return out;
}

namespace {

struct GapPieces {
  std::vector<TiltSolution> betas;   // (l, l') row-major over [m] x [m, d)
  std::vector<TiltSolution> pairs;   // same layout
  std::vector<TiltSolution> quads;   // pairs of pairs
  std::vector<std::array<int, 4>> quad_index;
};

GapPieces gap_pieces(const Model& model, const Problem& pb, bool need_pairs, bool need_quads, bool rep,
                     const BuildOptions& opt, SolverCache& cache) {
  const int d = model.dim(), m = pb.m;
  GapPieces g;
  const int nl = rep ? 1 : m, nlp = rep ? 1 : d - m;
  g.betas.resize(nl * nlp);
  parallel_for(g.betas.size(), opt.workers, [&](std::size_t i) {
    const int l = static_cast<int>(i) / nlp, lp = m + static_cast<int>(i) % nlp;
    g.betas[i] = solve_beta(model, pb, swap_set(m, l, lp), opt.solve, &cache);
  });
  for (const auto& b : g.betas) require_converged(b);
  if (need_pairs) {
    g.pairs.resize(nl * nlp);
    parallel_for(g.pairs.size(), opt.workers, [&](std::size_t i) {
      g.pairs[i] = solve_gap_pair(model, pb, static_cast<int>(i) / nlp, m + static_cast<int>(i) % nlp);
    });
    for (const auto& p : g.pairs) require_converged(p);
  }
  if (need_quads) {
    if (rep) {
      g.quad_index.push_back({0, 1, m, m + 1});
    } else {
      const double count = binomial(m, 2) * binomial(d - m, 2);
      if (count > static_cast<double>(opt.cap))
        throw Error(ErrorCode::Limit, "four-index tilts exceed the cap: " + std::to_string(static_cast<long long>(count)) +
                                          " needed");
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
          for (int c = m; c < d; ++c)
            for (int e = c + 1; e < d; ++e) g.quad_index.push_back({a, b, c, e});
    }
    g.quads.resize(g.quad_index.size());
    parallel_for(g.quads.size(), opt.workers, [&](std::size_t i) {
      const auto& q = g.quad_index[i];
      g.quads[i] = solve_gap_quad(model, pb, q[0], q[1], q[2], q[3], opt.solve, &cache);
    });
    for (const auto& q : g.quads) require_converged(q);
  }
  return g;
}

EfficiencyReport gap_report(const Model& model, const Problem& pb, const GapPieces& g, const std::string& condition,
                            bool rep, const BuildOptions& opt) {
  const int d = model.dim(), m = pb.m;
  const int nlp = rep ? 1 : d - m;
  EfficiencyReport r;
  r.condition = condition;
  r.r_star = kInf;
  for (const auto& b : g.betas) r.r_star = std::min(r.r_star, b.value);
  r.rhs = 2.0 * r.r_star;
  r.lhs = kInf;
  MarginKeeper keep{opt.margin_rows, {}};
  auto zt = [&](int l, int lp) -> const TiltSolution& {
    if (rep) return g.pairs[0];
    return g.pairs[l * nlp + (lp - m)];
  };
  for (std::size_t i = 0; i < g.quads.size(); ++i) {
    const auto& q = g.quad_index[i];
    const double s = g.quads[i].value;
    if (condition == "H2'") {
      r.lhs = std::min(r.lhs, 2.0 * s);
      keep.add("2*" + idx_label("gap_quad", g.quads[i].index), 2.0 * s, r.rhs);
      continue;
    }
    for (int l : {q[0], q[1]})
      for (int lp : {q[2], q[3]}) {
        const double lhs = zt(l, lp).value + s;
        r.lhs = std::min(r.lhs, lhs);
        keep.add(idx_label("gap_pair", {l, lp}) + "+" + idx_label("gap_quad", g.quads[i].index), lhs, r.rhs);
      }
  }
  r.witness_gaps = keep.rows;
  if (rep) r.note = "block-exchangeable model: one representative per symmetry class";
  finish(r);
  return r;
}

}  // namespace

EfficiencyReport gap_condition(const Model& model, int m, const std::string& condition, const BuildOptions& opt) {
  const int d = model.dim();
  const Problem pb = Problem::gap(m);
  pb.validate(d);
  if (m < 2 || m > d - 2) throw Error(ErrorCode::InvalidArgument, "gap conditions need 2 <= m <= d-2");
  if (condition != "H1'" && condition != "H2'") throw Error(ErrorCode::Unsupported, "unknown gap condition " + condition);
  const bool rep = block_exchangeable(model, m);
  SolverCache cache;
  const auto g = gap_pieces(model, pb, condition == "H1'", true, rep, opt, cache);
  return gap_report(model, pb, g, condition, rep, opt);
}

BuildResult build_gap(const Model& model, int m, const std::string& variant, const BuildOptions& opt) {
  const int d = model.dim();
  const Problem pb = Problem::gap(m);
  pb.validate(d);
  if (m < 2 || m > d - 2) throw Error(ErrorCode::InvalidArgument, "gap proposals need 2 <= m <= d-2");
  if (variant != "theta0" && variant != "theta1" && variant != "theta2")
    throw Error(ErrorCode::InvalidArgument, "gap variant must be theta0, theta1 or theta2");
  const bool v2 = variant == "theta2";
  const bool rep = block_exchangeable(model, m);
  SolverCache cache;
  // Full tilt tables for the proposal; conditions may use representatives.
  const auto g = gap_pieces(model, pb, true, v2, false, opt, cache);
  BuildResult out;
  MixtureProposal& P = out.proposal;
  P.problem = pb;
  P.variant = variant;
  for (const auto& b : g.betas) {
    P.add(b.tilt, model.cgf(b.tilt), "beta[" + set_label(b.index) + "]");
    out.solutions.push_back(b);
  }
  const std::size_t n0 = P.size();
  if (variant != "theta2")
    for (const auto& p : g.pairs) {
      P.add(p.tilt, model.cgf(p.tilt), idx_label("gap_pair", p.index));
      out.solutions.push_back(p);
    }
  if (v2)
    for (const auto& q : g.quads) {
      P.add(q.tilt, model.cgf(q.tilt), idx_label("gap_quad", q.index));
      out.solutions.push_back(q);
    }
  P.deduplicate();
  bool pairs_covered = true;
  if (variant == "theta0") {
    // Theta0 equals Theta1 when every pair tilt coincides with a beta.
    pairs_covered = P.size() == n0;
    MixtureProposal only;
    only.problem = pb;
    only.variant = variant;
    for (std::size_t i = 0; i < P.size(); ++i) {
      bool has_beta = false;
      for (const auto& s : P.provenance[i]) has_beta = has_beta || s.rfind("beta", 0) == 0;
      if (has_beta) {
        only.thetas.push_back(P.thetas[i]);
        only.lambdas.push_back(P.lambdas[i]);
        only.provenance.push_back(P.provenance[i]);
      }
    }
    P = std::move(only);
  }
  const std::string cond = v2 ? "H2'" : "H1'";
  if (rep) {
    SolverCache c2;
    out.report = gap_report(model, pb, gap_pieces(model, pb, true, true, true, opt, c2), cond, true, opt);
  } else {
    auto gq = g;
    if (!v2) gq = gap_pieces(model, pb, true, true, false, opt, cache);
    out.report = gap_report(model, pb, gq, cond, false, opt);
  }
  if (!pairs_covered) {
    out.report.holds = false;
    out.report.note += std::string(out.report.note.empty() ? "" : "; ") +
                       "theta0 does not contain every two-index tilt, so H1' does not certify it";
  }
  return out;
}

namespace {

struct SiValues {
  double rmin = kInf, lhs = kInf;
  std::vector<MarginRow> rows;
};

}  // namespace

EfficiencyReport si_condition(const Model& model, int L, const BuildOptions& opt) {
  const int d = model.dim();
  const Problem pb = Problem::sum_intersection(L);
  pb.validate(d);
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "sum-intersection conditions need L >= 2");
  EfficiencyReport r;
  r.condition = "H-SI";
  SolverCache cache;
  MarginKeeper keep{opt.margin_rows, {}};
  if (exchangeable(model)) {
    std::vector<int> A(L), B(L + 1);
    std::iota(A.begin(), A.end(), 0);
    std::iota(B.begin(), B.end(), 0);
    const auto b = solve_beta(model, pb, A, opt.solve, &cache);
    const auto z = solve_si_zA(model, pb, A, opt.solve, &cache);
    const auto s = solve_si_sB(model, pb, B, opt.solve, &cache);
    for (const auto* t : {&b, &z, &s}) require_converged(*t);
    r.r_star = b.value;
    r.rhs = 2.0 * b.value;
    r.lhs = z.value + s.value;
    keep.add("gammaA[" + set_label(A) + "]+gammaB[" + set_label(B) + "]", r.lhs, r.rhs);
    r.note = "exchangeable model: one representative per set size";
  } else {
    if (d > 63) throw Error(ErrorCode::Limit, "full sum-intersection enumeration supports d <= 63");
    const auto As = all_subsets(d, L);
    const auto Bs = all_subsets(d, L + 1);
    if (As.size() * 2 + Bs.size() > opt.cap)
      throw Error(ErrorCode::Limit, "sum-intersection tilts exceed the cap: " + std::to_string(As.size() * 2 + Bs.size()) +
                                        " needed");
    std::vector<TiltSolution> betas(As.size()), zs(As.size()), ss(Bs.size());
    parallel_for(As.size(), opt.workers, [&](std::size_t i) {
      betas[i] = solve_beta(model, pb, As[i], opt.solve, &cache);
      zs[i] = solve_si_zA(model, pb, As[i], opt.solve, &cache);
    });
    parallel_for(Bs.size(), opt.workers, [&](std::size_t i) { ss[i] = solve_si_sB(model, pb, Bs[i], opt.solve, &cache); });
    std::unordered_map<std::uint64_t, double> sv;
    for (std::size_t i = 0; i < Bs.size(); ++i) {
      require_converged(ss[i]);
      sv[mask_of(Bs[i])] = ss[i].value;
    }
    r.r_star = kInf;
    for (std::size_t i = 0; i < As.size(); ++i) {
      require_converged(betas[i]);
      require_converged(zs[i]);
      r.r_star = std::min(r.r_star, betas[i].value);
    }
    r.rhs = 2.0 * r.r_star;
    r.lhs = kInf;
    for (std::size_t i = 0; i < As.size(); ++i) {
      const std::uint64_t ma = mask_of(As[i]);
      for (int k = 0; k < d; ++k) {
        if (ma >> k & 1) continue;
        const double lhs = zs[i].value + sv.at(ma | std::uint64_t{1} << k);
        r.lhs = std::min(r.lhs, lhs);
        auto B = As[i];
        B.push_back(k);
        std::sort(B.begin(), B.end());
        keep.add("gammaA[" + set_label(As[i]) + "]+gammaB[" + set_label(B) + "]", lhs, r.rhs);
      }
    }
  }
  r.witness_gaps = keep.rows;
  finish(r);
  return r;
}

BuildResult build_sum_intersection(const Model& model, int L, const BuildOptions& opt) {
  const int d = model.dim();
  const Problem pb = Problem::sum_intersection(L);
  pb.validate(d);
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "sum-intersection proposals need 2 <= L <= d-1");
  const double need = 2.0 * binomial(d, L);
  if (need > static_cast<double>(opt.cap))
    throw Error(ErrorCode::Limit, "sum-intersection mixture needs " + std::to_string(static_cast<long long>(need)) +
                                      " tilts, above the cap of " + std::to_string(opt.cap));
  const auto As = all_subsets(d, L);
  SolverCache cache;
  std::vector<TiltSolution> betas(As.size()), zs(As.size());
  parallel_for(As.size(), opt.workers, [&](std::size_t i) {
    betas[i] = solve_beta(model, pb, As[i], opt.solve, &cache);
    zs[i] = solve_si_zA(model, pb, As[i], opt.solve, &cache);
  });
  BuildResult out;
  MixtureProposal& P = out.proposal;
  P.problem = pb;
  P.variant = "theta_si";
  for (std::size_t i = 0; i < As.size(); ++i) {
    require_converged(betas[i]);
    P.add(betas[i].tilt, model.cgf(betas[i].tilt), "beta[" + set_label(As[i]) + "]");
    out.solutions.push_back(betas[i]);
  }
  for (std::size_t i = 0; i < As.size(); ++i) {
    require_converged(zs[i]);
    P.add(zs[i].tilt, model.cgf(zs[i].tilt), "gammaA[" + set_label(As[i]) + "]");
    out.solutions.push_back(zs[i]);
  }
  P.deduplicate();
  out.report = si_condition(model, L, opt);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

json proposal_manifest(const MixtureProposal& p, const EfficiencyReport& r, const Model& model) {
  json tilts = json::array();
  for (std::size_t i = 0; i < p.size(); ++i)
    tilts.push_back({{"theta", std::vector<double>(p.thetas[i].data(), p.thetas[i].data() + p.thetas[i].size())},
                     {"lambda", p.lambdas[i]},
                     {"labels", p.provenance[i]}});
  json j = {{"format", "rarewalk-proposal"},
            {"version", 1},
            {"problem", p.problem.to_json()},
            {"model", model.to_json()},
            {"variant", p.variant},
            {"size", p.size()},
            {"r_star", num(r.r_star)},
            {"report", r.to_json()},
            {"tilts", tilts}};
  if (!r.holds)
    j["warning"] = "sufficient condition " + r.condition +
                   " does not hold: asymptotic efficiency is unproven, estimates remain unbiased";
  return j;
}

MixtureProposal proposal_from_manifest(const json& j) {
  if (j.value("format", std::string()) != "rarewalk-proposal")
    throw Error(ErrorCode::Parse, "not a proposal manifest");
  MixtureProposal p;
  p.problem = Problem::from_json(j.at("problem"));
  p.variant = j.value("variant", std::string());
  for (const auto& t : j.at("tilts")) {
    const auto v = t.at("theta").get<std::vector<double>>();
    p.thetas.push_back(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    p.lambdas.push_back(t.at("lambda").get<double>());
    p.provenance.push_back(t.value("labels", std::vector<std::string>{}));
  }
  return p;
}

json modified_siegmund_demo(int d) {
  if (d < 2 || d % 2) throw Error(ErrorCode::InvalidArgument, "modified Siegmund demo needs an even d >= 2");
  const double c = binomial(d, d / 2);
  return {{"d", d},
          {"required_components", c},
          {"log10_required", std::log10(c)},
          {"note", "every asymptotically efficient mixture must contain the optimal tilt of each of the C(d, d/2) "
                   "balanced regions; no proposal is built"}};
}

}  // namespace rarewalk
