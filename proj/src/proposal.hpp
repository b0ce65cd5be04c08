#pragma once

#include "solver.hpp"

#include <string>
#include <vector>

namespace rarewalk {

struct MixtureProposal {
  Problem problem;
  std::string variant;
  std::vector<Vec> thetas;
  std::vector<double> lambdas;
  std::vector<std::vector<std::string>> provenance;

  int dim() const { return thetas.empty() ? 0 : static_cast<int>(thetas[0].size()); }
  std::size_t size() const { return thetas.size(); }
  // Appends theta unless it duplicates an existing entry; returns its slot.
  std::size_t add(const Vec& theta, double lambda, const std::string& label);
  void deduplicate(double tol = 1e-12);
  void validate(const Model& model) const;
};

struct MarginRow {
  std::string label;
  double lhs = 0.0;
  double margin = 0.0;  // lhs - rhs
};

struct EfficiencyReport {
  std::string condition;  // H1, H2, H1', H2', H-SI, direct
  bool holds = false;
  double lhs = 0.0, rhs = 0.0, r_star = 0.0;
  std::vector<MarginRow> witness_gaps;  // smallest margins first
  std::string note;
  json to_json() const;
};

struct BuildOptions {
  SolveOptions solve;
  std::size_t cap = 200000;  // maximal number of enumerated tilts
  int workers = 1;
  std::size_t margin_rows = 20;
};

struct BuildResult {
  MixtureProposal proposal;
  EfficiencyReport report;
  std::vector<TiltSolution> solutions;  // tilts entering the proposal and the report
};

// variant: "theta0", "theta1", "theta2".
BuildResult build_siegmund(const Model& model, double ell, double u, const std::string& variant,
                           const BuildOptions& opt = {});
BuildResult build_gap(const Model& model, int m, const std::string& variant, const BuildOptions& opt = {});
BuildResult build_sum_intersection(const Model& model, int L, const BuildOptions& opt = {});

// Conditions alone; exchangeable models collapse to one representative per size.
EfficiencyReport siegmund_condition(const Model& model, double ell, double u, const std::string& condition,
                                    const BuildOptions& opt = {});
EfficiencyReport gap_condition(const Model& model, int m, const std::string& condition, const BuildOptions& opt = {});
EfficiencyReport si_condition(const Model& model, int L, const BuildOptions& opt = {});

// v_A(beta^{1}) >= 2 min_k r_{k} for A = {1..m}, m = 2..d.
EfficiencyReport check_direct_siegmund_homogeneous(const Model& model, double ell, double u,
                                                   const BuildOptions& opt = {});

bool exchangeable(const Model& model);

json proposal_manifest(const MixtureProposal& p, const EfficiencyReport& r, const Model& model);
MixtureProposal proposal_from_manifest(const json& j);

// Size C(d, d/2) of the tilt set the modified Siegmund problem would need.
json modified_siegmund_demo(int d);

double binomial(int n, int k);

}  // namespace rarewalk
