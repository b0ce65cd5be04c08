#pragma once

#include "cgf.hpp"

#include <string>
#include <vector>

namespace rarewalk {

enum class Sign { Free, NonNeg, NonPos };

// theta_i = y[group_of[i]]; group -1 pins theta_i to zero.
struct GroupMap {
  int d = 0;
  std::vector<int> group_of;
  std::vector<std::vector<int>> members;

  static GroupMap identity(int d);
  // Groups are the distinct non-negative labels, numbered by first appearance.
  static GroupMap from_labels(const std::vector<int>& labels);
  int groups() const { return static_cast<int>(members.size()); }
  Vec counts() const;
  Vec expand(const Vec& y) const;
  Vec reduce(const Vec& g) const;  // J^T g
};

// Cgf of the reduced variable y, Lambda(J y).
class ReducedCgf {
 public:
  ReducedCgf(const Model& model, GroupMap map);

  int size() const { return map_.groups(); }
  double value(const Vec& y) const;
  Vec grad(const Vec& y) const;
  Mat hess(const Vec& y) const;
  bool in_domain(const Vec& y) const;

  bool quadratic() const { return quadratic_; }
  const Vec& qm() const { return qm_; }
  const Mat& qQ() const { return qQ_; }

  // Sum over groups of n_g Lambda_g(y_g).
  bool separable() const { return separable_; }
  const std::vector<Scalar>& scalars() const { return scalars_; }

  const GroupMap& map() const { return map_; }
  const Model& model() const { return model_; }
  Vec counts() const { return counts_; }

 private:
  const Model& model_;
  GroupMap map_;
  Vec counts_;
  bool quadratic_ = false;
  Vec qm_;
  Mat qQ_;
  bool separable_ = false;
  std::vector<Scalar> scalars_;
};

// maximise c.z over z = (y, aux) subject to Lambda(J y) <= 0, sign(y),
// G z <= 0 and E z = 0. All linear constraints are homogeneous.
struct ConeProgram {
  int p = 0;
  int q = 0;
  Vec c;
  std::vector<Sign> sign;  // size p
  Mat G;                   // rows x (p+q)
  Mat E;                   // rows x (p+q)
  Vec interior;            // strictly feasible direction, mean.y < 0

  int n() const { return p + q; }
  void validate() const;
};

struct ConeResult {
  Vec z;
  double value = 0.0;
  double lambda0 = 0.0;
  Vec eta;    // equality multipliers
  Vec kappa;  // sign multipliers (p) then G multipliers
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string method;
};

// Strictly feasible y for sign-only problems with optional equality rows.
// Throws when no direction with mean.y < 0 exists.
Vec sign_interior(const ReducedCgf& f, const std::vector<Sign>& sign, const Mat& E);

// Exact for quadratic cgfs: enumerates the faces of the sign orthant.
ConeResult solve_faces(const ReducedCgf& f, const ConeProgram& prog, int max_signed = 14);

// Separable cgfs with at most one equality row proportional to counts:
// nested root finding on (lambda0, eta).
ConeResult solve_nested(const ReducedCgf& f, const ConeProgram& prog);

// Log barrier followed by active-set Newton polish. Any cgf.
struct BarrierOptions {
  int max_newton = 2000;
  double mu = 8.0;
  double gap_tol = 1e-11;
  int active_set_cap = 200;
  int restarts = 3;
};
ConeResult solve_barrier(const ReducedCgf& f, const ConeProgram& prog, const BarrierOptions& opt = {});

// KKT residual of (z, lambda0, eta, kappa) for prog.
double kkt_residual(const ReducedCgf& f, const ConeProgram& prog, const ConeResult& r);

// Scales z radially so that Lambda(J y) = 0.
void scale_to_boundary(const ReducedCgf& f, ConeResult& r, const ConeProgram& prog);

// Orthonormal basis of ker(E) within the given column set (others fixed to 0).
Mat null_space(const Mat& E, const std::vector<int>& cols, int n);

}  // namespace rarewalk
