#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rarewalk {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using json = nlohmann::json;

enum class ErrorCode {
  InvalidArgument = 1,
  Dimension,
  Domain,
  NotConverged,
  Unsupported,
  Limit,
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Per-path random stream. Seeded from (seed, path index) so results do not
// depend on how paths are split across workers.
struct Stream {
  std::mt19937_64 engine;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::exponential_distribution<double> expo{1.0};
  std::vector<double> scratch;

  explicit Stream(std::uint64_t s) : engine(s) {}
  double gauss() { return normal(engine); }
  double exponential(double rate) { return expo(engine) / rate; }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
  }
};

std::uint64_t splitmix64(std::uint64_t x);
Stream make_stream(std::uint64_t seed, std::uint64_t path_index);

// One-dimensional increment family.
struct Scalar {
  enum class Kind { Normal, ShiftedExponential };
  Kind kind = Kind::Normal;
  double p1 = 0.0;  // normal: mean, exponential: rate
  double p2 = 1.0;  // normal: variance, exponential: shift

  static Scalar normal(double mean, double variance);
  static Scalar shifted_exponential(double rate, double shift);

  double cgf(double t) const;  // +inf outside the domain
  double d1(double t) const;
  double d2(double t) const;
  bool in_domain(double t) const;
  double upper() const;  // supremum of the domain
  double mean() const;
  // Solution of cgf'(t) = y. Returns -inf when y lies below the range of cgf'
  // and +inf above it.
  double inv_d1(double y) const;
  double draw(double t, Stream& s) const;

  json to_json() const;
  bool operator==(const Scalar& o) const { return kind == o.kind && p1 == o.p1 && p2 == o.p2; }
};

// Unique positive root of a scalar cgf with negative mean.
double siegmund_root(const Scalar& s);

class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual void draw(Stream& s, double* out) const = 0;
};

class Model {
 public:
  explicit Model(int d) : d_(d) {}
  virtual ~Model() = default;

  int dim() const { return d_; }
  virtual double cgf(const Vec& theta) const = 0;
  virtual Vec grad(const Vec& theta) const = 0;
  virtual Mat hessian(const Vec& theta) const = 0;
  virtual bool in_domain(const Vec& theta) const = 0;
  virtual Vec mean() const = 0;
  virtual std::unique_ptr<Sampler> tilted(const Vec& theta) const = 0;
  // Root of t -> cgf(t e_k).
  virtual double marginal_root(int k) const = 0;
  // Class label per coordinate; the law is invariant under permutations
  // that only move coordinates within a class.
  virtual std::vector<int> symmetry_classes() const = 0;
  virtual json to_json() const = 0;

  void check_dim(const Vec& theta) const;

 private:
  int d_;
};

class MvNormalModel : public Model {
 public:
  MvNormalModel(Vec mean, Mat cov);
  static std::unique_ptr<MvNormalModel> exchangeable(int d, double mean, double variance, double rho);

  double cgf(const Vec& theta) const override;
  Vec grad(const Vec& theta) const override;
  Mat hessian(const Vec& theta) const override;
  bool in_domain(const Vec& theta) const override;
  Vec mean() const override { return mu_; }
  std::unique_ptr<Sampler> tilted(const Vec& theta) const override;
  double marginal_root(int k) const override;
  std::vector<int> symmetry_classes() const override;
  json to_json() const override;

  const Mat& cov() const { return sigma_; }
  const Mat& chol() const { return chol_; }

 private:
  Vec mu_;
  Mat sigma_;
  Mat chol_;
};

class IndependentModel : public Model {
 public:
  explicit IndependentModel(std::vector<Scalar> comps);

  double cgf(const Vec& theta) const override;
  Vec grad(const Vec& theta) const override;
  Mat hessian(const Vec& theta) const override;
  bool in_domain(const Vec& theta) const override;
  Vec mean() const override;
  std::unique_ptr<Sampler> tilted(const Vec& theta) const override;
  double marginal_root(int k) const override;
  std::vector<int> symmetry_classes() const override;
  json to_json() const override;

  const std::vector<Scalar>& components() const { return comps_; }

 private:
  std::vector<Scalar> comps_;
};

}  // namespace rarewalk
