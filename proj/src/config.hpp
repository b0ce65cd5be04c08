#pragma once

#include "engine.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rarewalk {

struct OracleSpec {
  double b = 1.0;
  std::size_t n_plain = 1000000;
  std::size_t n_mixture = 100000;
};

struct ExperimentConfig {
  std::string name;
  json model_spec;
  std::shared_ptr<Model> model;
  Problem problem;
  std::string variant;    // theta0 / theta1 / theta2 / theta_si
  std::string condition;  // empty: the variant's own condition
  std::size_t cap = 200000;
  std::vector<double> b_grid;
  RunConfig run;
  std::optional<OracleSpec> oracle;
  json table;  // table / sweep sections, checked by the experiment runners
  json sweep;
  std::string out_dir = "out";
  bool paper_scale = false;
  json raw;  // document after the paper-scale patch

  BuildOptions build_options() const;
};

// Builds a model from its JSON description. Accepted forms:
//   {"family":"mvnormal","mean":..., "cov":[[...]]}
//   {"family":"mvnormal","d":n,"mean":..., "variance":v,"rho":r}
//   {"family":"independent","components":[...]} / {"d":n,"component":{...}} / {"blocks":[{"count":k,...}]}
// "mean" may be a number, an array, or {"blocks":[[count, value], ...]}.
std::shared_ptr<Model> parse_model(const json& j, const std::string& path = "model");
Scalar parse_component(const json& j, const std::string& path);
Problem parse_problem(const json& j, const std::string& path = "problem");

// Validates the whole document; errors name the offending field.
ExperimentConfig parse_config(const json& doc, bool paper_scale = false);
ExperimentConfig load_config(const std::string& file, bool paper_scale = false);

json read_json_file(const std::string& file);

}  // namespace rarewalk
