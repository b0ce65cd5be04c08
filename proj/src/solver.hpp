#pragma once

#include "conic.hpp"
#include "regions.hpp"

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace rarewalk {

enum class SolvePath { Auto, Faces, Nested, Homogeneous, ActiveSet };

struct SolveOptions {
  SolvePath path = SolvePath::Auto;
  bool symmetry = true;
};

struct TiltSolution {
  std::string kind;         // beta, gamma, gamma_pair, gap_pair, gap_quad, si_zA, si_sB
  std::vector<int> index;   // defining index set, 0-based
  double value = 0.0;
  Vec tilt;
  double lambda0 = 0.0;     // multiplier of Lambda <= 0
  Vec kappa;                // sign multipliers per coordinate
  Vec eta;                  // equality multipliers
  bool converged = false;
  double residual = 0.0;
  std::string path;

  json to_json() const;
  static TiltSolution from_json(const json& j);
};

// Memo of reduced solutions keyed by the symmetry signature of the request.
class SolverCache {
 public:
  struct Entry {
    std::map<std::vector<double>, double> by_label;  // label tuple -> group value
    double value, lambda0, residual;
    std::map<std::vector<double>, double> kappa_by_label;
    Vec eta;
    bool converged;
    std::string path;
  };
  bool find(const std::string& key, Entry& out) const;
  void put(const std::string& key, Entry e);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Entry> map_;
};

TiltSolution solve_beta(const Model& model, const Problem& pb, const std::vector<int>& A, const SolveOptions& opt = {},
                        SolverCache* cache = nullptr);
TiltSolution solve_gamma_single(const Model& model, const Problem& pb, int k);
TiltSolution solve_gamma_pair(const Model& model, const Problem& pb, int k, int k2, const SolveOptions& opt = {},
                              SolverCache* cache = nullptr);
TiltSolution solve_gap_pair(const Model& model, const Problem& pb, int l, int lp);
TiltSolution solve_gap_quad(const Model& model, const Problem& pb, int l1, int l2, int l1p, int l2p,
                            const SolveOptions& opt = {}, SolverCache* cache = nullptr);
TiltSolution solve_si_zA(const Model& model, const Problem& pb, const std::vector<int>& A, const SolveOptions& opt = {},
                         SolverCache* cache = nullptr);
TiltSolution solve_si_sB(const Model& model, const Problem& pb, const std::vector<int>& B, const SolveOptions& opt = {},
                         SolverCache* cache = nullptr);

// s > 0 with Lambda(s v) = 0; needs grad Lambda(0).v < 0.
double radial_root(const Model& model, const Vec& v);

// Homogeneous i.i.d. Siegmund problem: beta^A has v_a^+ on A and v_a^- off A,
// |A| = a.
struct HomogeneousPoint {
  int a = 0;
  double vplus = 0.0, vminus = 0.0, rate = 0.0;
};
struct HomogeneousTable {
  double z = 0.0, kappa0 = 0.0, kappa1 = 0.0;
  bool gamma_is_beta = false;  // (ell/u) kappa1 <= kappa0
  std::vector<HomogeneousPoint> points;  // a = 1..d
};
HomogeneousTable homogeneous_siegmund(const Scalar& s, int d, double ell, double u);

struct VBound {
  std::vector<int> region;
  Vec gamma, witness;
  double lower_bound = 0.0;
  bool feasible = false;
  json to_json() const;
};
VBound v_lower_bound(const Model& model, const Problem& pb, const std::vector<int>& A, const Vec& gamma,
                     const Vec& witness);

// Support function of {Lambda <= 0} for normal increments.
double rate_function(const Vec& x, const Model& model);

// Common identical component of an i.i.d. model, if any.
bool iid_component(const Model& model, Scalar* out);

}  // namespace rarewalk
