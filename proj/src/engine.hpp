#pragma once

#include "proposal.hpp"

#include <map>
#include <string>
#include <vector>

namespace rarewalk {

struct ExitOutcome {
  bool stopped = false;    // reached some region before max_steps
  bool wrong = false;      // stopped in a rare region
  bool truncated = false;  // max_steps reached first
  Region region;
  long steps = 0;
  Vec S;  // terminal position
};

struct RunConfig {
  double b = 1.0;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  long max_steps = 0;  // 0: derived from the proposal drifts
  int workers = 1;
  std::size_t block = 1024;  // paths per accumulation block

  void validate() const;
};

struct PathResult {
  std::size_t component = 0;
  ExitOutcome outcome;
  Vec log_weights;  // theta . S_T - T Lambda(theta), only filled when wrong
  double estimate = 0.0;
};

struct EstimatorRun {
  std::size_t n = 0;
  double mean = 0.0;
  double second_moment = 0.0;
  double std_error = 0.0;
  double relative_error = 0.0;
  std::map<std::string, long> exit_tally;
  long truncation_count = 0;
  long boundary_ties = 0;
  long max_steps = 0;
  std::size_t components = 0;

  json to_json() const;
};

// Streaming mean / sum of squared deviations.
struct Welford {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0, sumsq_mean = 0.0;  // sumsq_mean: running mean of x^2
  void add(double x);
  void merge(const Welford& o);
};

double logsumexp(const double* x, std::size_t n);

// Walk under a fixed sampler until it stops or max_steps elapse.
ExitOutcome simulate_path(const Model& model, const Sampler& sampler, const Problem& pb, double b, long max_steps,
                          Stream& rng, ClassifyWork& work);
ExitOutcome simulate_path(const Model& model, const Vec& theta, const Problem& pb, double b, long max_steps,
                          Stream& rng);

// Default step cap: 50 b / drift scale, maximized over the components.
long default_max_steps(const Model& model, const MixtureProposal& p, double b);

// One realization of the mixture estimator for path `index`.
class MixtureRunner {
 public:
  MixtureRunner(const Model& model, const MixtureProposal& p);
  PathResult run(double b, long max_steps, std::uint64_t seed, std::uint64_t index, ClassifyWork& work) const;
  std::size_t size() const { return samplers_.size(); }

 private:
  const Model& model_;
  const MixtureProposal& p_;
  std::vector<std::unique_ptr<Sampler>> samplers_;
  Mat thetas_;  // components x d
  Vec lambdas_;
  double log_size_;
};

EstimatorRun estimate_wrong_exit(const Model& model, const MixtureProposal& p, const RunConfig& cfg);
EstimatorRun plain_mc(const Model& model, const Problem& pb, const RunConfig& cfg);

// Proposal with the single tilt 0.
MixtureProposal zero_proposal(const Problem& pb, int d);

struct DecayRow {
  double b = 0.0;
  EstimatorRun run;
};

std::vector<DecayRow> decay_scan(const Model& model, const MixtureProposal& p, const std::vector<double>& b_grid,
                                 const RunConfig& cfg);

struct SlopeFit {
  double slope = 0.0, intercept = 0.0;
  std::size_t points = 0;
};

// Least squares of -log p on b over rows with p > 0.
SlopeFit fit_decay_slope(const std::vector<DecayRow>& rows);

// CSV with header b,p_hat,neg_log10_p,rel_err,std_error,n,truncations.
std::string decay_csv(const std::vector<DecayRow>& rows);

}  // namespace rarewalk
