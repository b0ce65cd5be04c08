#include "engine.hpp"

#include "format.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rarewalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kStepCeiling = 50'000'000;

// Scale of the drift that drives the walk into a region, per problem kind.
double drift_scale(const Vec& g, const Problem& pb) {
  const int d = static_cast<int>(g.size());
  switch (pb.kind) {
    case ProblemKind::Siegmund: {
      double s = kInf;
      for (int i = 0; i < d; ++i) s = std::min(s, std::abs(g[i]) / (g[i] > 0 ? pb.u : pb.ell));
      return s;
    }
    case ProblemKind::Gap: {
      std::vector<double> v(g.data(), g.data() + d);
      std::sort(v.begin(), v.end(), std::greater<double>());
      return v[pb.m - 1] - v[pb.m];
    }
    case ProblemKind::SumIntersection: {
      std::vector<double> v(d);
      for (int i = 0; i < d; ++i) v[i] = std::abs(g[i]);
      std::sort(v.begin(), v.end());
      double s = 0.0;
      for (int i = 0; i < pb.L; ++i) s += v[i];
      return s;
    }
  }
  return 0.0;
}

struct Block {
  Welford acc;
  std::map<std::string, long> tally;
  long truncated = 0;
  long ties = 0;
};

}  // namespace

void RunConfig::validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "b must be positive");
  if (n_paths == 0) throw Error(ErrorCode::InvalidArgument, "n_paths must be positive");
  if (max_steps < 0) throw Error(ErrorCode::InvalidArgument, "max_steps must be nonnegative");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be at least 1");
  if (block == 0) throw Error(ErrorCode::InvalidArgument, "block must be positive");
}

void Welford::add(double x) {
  ++n;
  const double dx = x - mean;
  mean += dx / static_cast<double>(n);
  m2 += dx * (x - mean);
  sumsq_mean += (x * x - sumsq_mean) / static_cast<double>(n);
}

void Welford::merge(const Welford& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
  const double delta = o.mean - mean;
  mean += delta * nb / nt;
  m2 += o.m2 + delta * delta * na * nb / nt;
  sumsq_mean += (o.sumsq_mean - sumsq_mean) * nb / nt;
  n += o.n;
}

double logsumexp(const double* x, std::size_t n) {
  double mx = -kInf;
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, x[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - mx);
  return mx + std::log(s);
}

ExitOutcome simulate_path(const Model& model, const Sampler& sampler, const Problem& pb, double b, long max_steps,
                          Stream& rng, ClassifyWork& work) {
  const int d = model.dim();
  ExitOutcome out;
  out.S = Vec::Zero(d);
  std::vector<double> step(d);
  for (long t = 1; t <= max_steps; ++t) {
    sampler.draw(rng, step.data());
    for (int i = 0; i < d; ++i) out.S[i] += step[i];
    if (classify_state(out.S.data(), d, b, pb, work, &out.region)) {
      out.stopped = true;
      out.wrong = out.region.rare;
      out.steps = t;
      return out;
    }
  }
  out.truncated = true;
  out.steps = max_steps;
  return out;
}

ExitOutcome simulate_path(const Model& model, const Vec& theta, const Problem& pb, double b, long max_steps,
                          Stream& rng) {
  pb.validate(model.dim());
  if (!(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "b must be positive");
  if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be positive");
  const auto sampler = model.tilted(theta);
  ClassifyWork w;
  return simulate_path(model, *sampler, pb, b, max_steps, rng, w);
}

long default_max_steps(const Model& model, const MixtureProposal& p, double b) {
  double worst = 0.0;
  for (const auto& th : p.thetas) worst = std::max(worst, 1.0 / drift_scale(model.grad(th), p.problem));
  const double steps = std::ceil(50.0 * b * worst);
  if (!std::isfinite(steps) || steps > static_cast<double>(kStepCeiling)) return kStepCeiling;
  return std::max(100L, static_cast<long>(steps));
}

MixtureRunner::MixtureRunner(const Model& model, const MixtureProposal& p) : model_(model), p_(p) {
  if (p.size() == 0) throw Error(ErrorCode::InvalidArgument, "proposal is empty");
  p.problem.validate(model.dim());
  const int d = model.dim();
  thetas_.resize(static_cast<Eigen::Index>(p.size()), d);
  lambdas_.resize(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    model.check_dim(p.thetas[i]);
    thetas_.row(static_cast<Eigen::Index>(i)) = p.thetas[i].transpose();
    lambdas_[static_cast<Eigen::Index>(i)] = p.lambdas[i];
    samplers_.push_back(model.tilted(p.thetas[i]));
  }
  log_size_ = std::log(static_cast<double>(p.size()));
}

PathResult MixtureRunner::run(double b, long max_steps, std::uint64_t seed, std::uint64_t index,
                              ClassifyWork& work) const {
  Stream rng = make_stream(seed, index);
  PathResult r;
  r.component = samplers_.size() == 1 ? 0 : rng.index(samplers_.size());
  r.outcome = simulate_path(model_, *samplers_[r.component], p_.problem, b, max_steps, rng, work);
  if (r.outcome.wrong) {
    r.log_weights = thetas_ * r.outcome.S - static_cast<double>(r.outcome.steps) * lambdas_;
    r.estimate = std::exp(log_size_ - logsumexp(r.log_weights.data(), static_cast<std::size_t>(r.log_weights.size())));
  }
  return r;
}

EstimatorRun estimate_wrong_exit(const Model& model, const MixtureProposal& p, const RunConfig& cfg) {
  cfg.validate();
  if (p.dim() != model.dim())
    throw Error(ErrorCode::Dimension, "proposal dimension " + std::to_string(p.dim()) + " does not match model dimension " +
                                          std::to_string(model.dim()));
  const MixtureRunner runner(model, p);
  const long max_steps = cfg.max_steps > 0 ? cfg.max_steps : default_max_steps(model, p, cfg.b);
  const std::size_t nb = (cfg.n_paths + cfg.block - 1) / cfg.block;
  std::vector<Block> blocks(nb);
  parallel_for(nb, cfg.workers, [&](std::size_t k) {
    Block& blk = blocks[k];
    ClassifyWork work;
    const std::size_t lo = k * cfg.block, hi = std::min(cfg.n_paths, lo + cfg.block);
    for (std::size_t i = lo; i < hi; ++i) {
      const PathResult r = runner.run(cfg.b, max_steps, cfg.seed, i, work);
      blk.acc.add(r.estimate);
      if (r.outcome.truncated) {
        ++blk.truncated;
        ++blk.tally["truncated"];
      } else {
        ++blk.tally[r.outcome.region.rare ? r.outcome.region.label() : "reference"];
      }
    }
    blk.ties = work.boundary_ties;
  });
  Welford acc;
  EstimatorRun run;
  for (const auto& blk : blocks) {
    acc.merge(blk.acc);
    for (const auto& [k, v] : blk.tally) run.exit_tally[k] += v;
    run.truncation_count += blk.truncated;
    run.boundary_ties += blk.ties;
  }
  run.n = acc.n;
  run.mean = acc.mean;
  run.second_moment = acc.sumsq_mean;
  const double var = acc.n > 1 ? acc.m2 / static_cast<double>(acc.n - 1) : 0.0;
  run.std_error = std::sqrt(var / static_cast<double>(acc.n));
  run.relative_error = run.mean > 0.0 ? run.std_error / run.mean : kInf;
  run.max_steps = max_steps;
  run.components = p.size();
  return run;
}

MixtureProposal zero_proposal(const Problem& pb, int d) {
  MixtureProposal p;
  p.problem = pb;
  p.variant = "plain";
  p.add(Vec::Zero(d), 0.0, "zero");
  return p;
}

EstimatorRun plain_mc(const Model& model, const Problem& pb, const RunConfig& cfg) {
  const MixtureProposal p = zero_proposal(pb, model.dim());
  return estimate_wrong_exit(model, p, cfg);
}

std::vector<DecayRow> decay_scan(const Model& model, const MixtureProposal& p, const std::vector<double>& b_grid,
                                 const RunConfig& cfg) {
  if (b_grid.empty()) throw Error(ErrorCode::InvalidArgument, "b grid is empty");
  for (std::size_t i = 1; i < b_grid.size(); ++i)
    if (!(b_grid[i] > b_grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "b grid must be strictly ascending");
  std::vector<DecayRow> rows;
  for (double b : b_grid) {
    RunConfig c = cfg;
    c.b = b;
    rows.push_back({b, estimate_wrong_exit(model, p, c)});
  }
  return rows;
}

SlopeFit fit_decay_slope(const std::vector<DecayRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!(r.run.mean > 0.0)) continue;
    const double y = -std::log(r.run.mean);
    sx += r.b;
    sy += y;
    sxx += r.b * r.b;
    sxy += r.b * y;
    ++n;
  }
  SlopeFit f;
  f.points = n;
  if (n < 2) return f;
  const double nn = static_cast<double>(n);
  const double den = nn * sxx - sx * sx;
  f.slope = (nn * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / nn;
  return f;
}

std::string decay_csv(const std::vector<DecayRow>& rows) {
  std::ostringstream os;
  os << "b,p_hat,neg_log10_p,rel_err,std_error,n,truncations\n";
  for (const auto& r : rows) {
    const double nl = r.run.mean > 0.0 ? -std::log10(r.run.mean) : kInf;
    os << fmt(r.b) << ',' << fmt(r.run.mean) << ',' << fmt(nl) << ',' << fmt(r.run.relative_error) << ',' << fmt(r.run.std_error) << ','
       << r.run.n << ',' << r.run.truncation_count << '\n';
  }
  return os.str();
}

json EstimatorRun::to_json() const {
  auto num = [](double x) -> json {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  };
  return {{"n", n},
          {"p_hat", num(mean)},
          {"second_moment", num(second_moment)},
          {"std_error", num(std_error)},
          {"relative_error", num(relative_error)},
          {"exit_tally", exit_tally},
          {"truncation_count", truncation_count},
          {"boundary_ties", boundary_ties},
          {"max_steps", max_steps},
          {"components", components}};
}

}  // namespace rarewalk
