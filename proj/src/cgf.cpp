#include "cgf.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace rarewalk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream make_stream(std::uint64_t seed, std::uint64_t path_index) {
  return Stream(splitmix64(seed ^ splitmix64(path_index)));
}

Scalar Scalar::normal(double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance))
    throw Error(ErrorCode::InvalidArgument, "normal component needs finite mean and variance > 0");
  return Scalar{Kind::Normal, mean, variance};
}

Scalar Scalar::shifted_exponential(double rate, double shift) {
  if (!(rate > 0.0) || !std::isfinite(rate) || !std::isfinite(shift))
    throw Error(ErrorCode::InvalidArgument, "exponential component needs rate > 0 and finite shift");
  return Scalar{Kind::ShiftedExponential, rate, shift};
}

bool Scalar::in_domain(double t) const {
  if (kind == Kind::Normal) return std::isfinite(t);
  return t < p1;
}

double Scalar::upper() const { return kind == Kind::Normal ? kInf : p1; }

double Scalar::cgf(double t) const {
  if (kind == Kind::Normal) return p1 * t + 0.5 * p2 * t * t;
  if (!(t < p1)) return kInf;
  return p2 * t - std::log1p(-t / p1);
}

double Scalar::d1(double t) const {
  if (kind == Kind::Normal) return p1 + p2 * t;
  return p2 + 1.0 / (p1 - t);
}

double Scalar::d2(double t) const {
  if (kind == Kind::Normal) return p2;
  const double r = p1 - t;
  return 1.0 / (r * r);
}

double Scalar::mean() const { return kind == Kind::Normal ? p1 : p2 + 1.0 / p1; }

double Scalar::inv_d1(double y) const {
  if (kind == Kind::Normal) return (y - p1) / p2;
  if (y <= p2) return -kInf;
  return p1 - 1.0 / (y - p2);
}

double Scalar::draw(double t, Stream& s) const {
  if (kind == Kind::Normal) return p1 + p2 * t + std::sqrt(p2) * s.gauss();
  return s.exponential(p1 - t) + p2;
}

json Scalar::to_json() const {
  if (kind == Kind::Normal) return {{"type", "normal"}, {"mean", p1}, {"variance", p2}};
  return {{"type", "shifted_exponential"}, {"rate", p1}, {"shift", p2}};
}

double siegmund_root(const Scalar& s) {
  if (!(s.mean() < 0.0))
    throw Error(ErrorCode::Domain, "siegmund root needs a component with negative mean");
  if (s.kind == Scalar::Kind::Normal) return -2.0 * s.p1 / s.p2;

  // Bracket: grow hi until cgf(hi) > 0, approaching the domain edge
  // geometrically when the domain is bounded.
  double lo = 0.0, hi = 1.0;
  const double top = s.upper();
  for (int it = 0; it < 2000; ++it) {
    if (!s.in_domain(hi)) hi = lo + 0.5 * (top - lo);
    if (s.cgf(hi) > 0.0) break;
    lo = hi;
    hi = std::isfinite(top) ? lo + 0.5 * (top - lo) : 2.0 * hi;
    if (it == 1999) throw Error(ErrorCode::NotConverged, "no positive root of the cgf");
  }
  // cgf <= 0 on (0, z] and > 0 beyond z.
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (s.cgf(mid) > 0.0) hi = mid; else lo = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double step = s.cgf(z) / s.d1(z);
    z -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, z)) break;
  }
  if (std::abs(s.cgf(z)) > 1e-12) throw Error(ErrorCode::NotConverged, "siegmund root polish failed");
  return z;
}

void Model::check_dim(const Vec& theta) const {
  if (theta.size() != d_)
    throw Error(ErrorCode::Dimension, "tilt has length " + std::to_string(theta.size()) +
                                          ", model dimension is " + std::to_string(d_));
}

namespace {

class NormalSampler : public Sampler {
 public:
  NormalSampler(Vec mean, const Mat& chol) : mean_(std::move(mean)), chol_(chol) {}
  void draw(Stream& s, double* out) const override {
    const int d = static_cast<int>(mean_.size());
    s.scratch.resize(d);
    double* z = s.scratch.data();
    for (int i = 0; i < d; ++i) z[i] = s.gauss();
    for (int i = 0; i < d; ++i) {
      double acc = mean_[i];
      const double* row = chol_.data();
      for (int j = 0; j <= i; ++j) acc += row[i + j * d] * z[j];
      out[i] = acc;
    }
  }

 private:
  Vec mean_;
  const Mat& chol_;
};

class IndependentSampler : public Sampler {
 public:
  IndependentSampler(const std::vector<Scalar>& comps, Vec theta) : comps_(comps), theta_(std::move(theta)) {}
  void draw(Stream& s, double* out) const override {
    for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].draw(theta_[i], s);
  }

 private:
  const std::vector<Scalar>& comps_;
  Vec theta_;
};

}  // namespace

MvNormalModel::MvNormalModel(Vec mean, Mat cov) : Model(static_cast<int>(mean.size())), mu_(std::move(mean)), sigma_(std::move(cov)) {
  const int d = dim();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "model dimension must be positive");
  if (sigma_.rows() != d || sigma_.cols() != d)
    throw Error(ErrorCode::Dimension, "covariance shape does not match mean length");
  if (!mu_.allFinite() || !sigma_.allFinite())
    throw Error(ErrorCode::InvalidArgument, "mean and covariance must be finite");
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sigma_.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::InvalidArgument, "covariance is not symmetric");
  for (int i = 0; i < d; ++i)
    if (mu_[i] == 0.0) throw Error(ErrorCode::InvalidArgument, "coordinate " + std::to_string(i) + " has zero drift");
  Eigen::LLT<Mat> llt(sigma_);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "covariance is not positive definite");
  chol_ = llt.matrixL();
}

std::unique_ptr<MvNormalModel> MvNormalModel::exchangeable(int d, double mean, double variance, double rho) {
  Mat cov = Mat::Constant(d, d, rho * variance);
  cov.diagonal().setConstant(variance);
  return std::make_unique<MvNormalModel>(Vec::Constant(d, mean), cov);
}

double MvNormalModel::cgf(const Vec& theta) const {
  check_dim(theta);
  return mu_.dot(theta) + 0.5 * theta.dot(sigma_ * theta);
}

Vec MvNormalModel::grad(const Vec& theta) const {
  check_dim(theta);
  return mu_ + sigma_ * theta;
}

Mat MvNormalModel::hessian(const Vec& theta) const {
  check_dim(theta);
  return sigma_;
}

bool MvNormalModel::in_domain(const Vec& theta) const { return theta.size() == dim() && theta.allFinite(); }

std::unique_ptr<Sampler> MvNormalModel::tilted(const Vec& theta) const {
  if (!in_domain(theta)) throw Error(ErrorCode::Domain, "tilt outside the cgf domain");
  return std::make_unique<NormalSampler>(grad(theta), chol_);
}

double MvNormalModel::marginal_root(int k) const {
  if (k < 0 || k >= dim()) throw Error(ErrorCode::InvalidArgument, "index out of range");
  if (!(mu_[k] < 0.0)) throw Error(ErrorCode::Domain, "marginal root needs a negative drift");
  return -2.0 * mu_[k] / sigma_(k, k);
}

std::vector<int> MvNormalModel::symmetry_classes() const {
  const int d = dim();
  std::map<std::pair<double, double>, int> ids;
  std::vector<int> cls(d);
  for (int i = 0; i < d; ++i) {
    auto key = std::make_pair(mu_[i], sigma_(i, i));
    auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
    cls[i] = it->second;
  }
  // The candidate partition is valid only if every block of the covariance
  // (diagonal excluded) is constant.
  const int nc = static_cast<int>(ids.size());
  Mat ref = Mat::Constant(nc, nc, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      double& r = ref(cls[i], cls[j]);
      if (std::isnan(r)) r = sigma_(i, j);
      else if (r != sigma_(i, j)) {
        std::vector<int> trivial(d);
        for (int k = 0; k < d; ++k) trivial[k] = k;
        return trivial;
      }
    }
  return cls;
}

json MvNormalModel::to_json() const {
  std::vector<double> m(mu_.data(), mu_.data() + mu_.size());
  json cov = json::array();
  for (int i = 0; i < dim(); ++i) {
    std::vector<double> row(dim());
    for (int j = 0; j < dim(); ++j) row[j] = sigma_(i, j);
    cov.push_back(row);
  }
  return {{"family", "mvnormal"}, {"mean", m}, {"cov", cov}};
}

IndependentModel::IndependentModel(std::vector<Scalar> comps) : Model(static_cast<int>(comps.size())), comps_(std::move(comps)) {
  if (comps_.empty()) throw Error(ErrorCode::InvalidArgument, "model dimension must be positive");
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i].mean() == 0.0) throw Error(ErrorCode::InvalidArgument, "coordinate " + std::to_string(i) + " has zero drift");
}

double IndependentModel::cgf(const Vec& theta) const {
  check_dim(theta);
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double v = comps_[i].cgf(theta[i]);
    if (!std::isfinite(v)) return kInf;
    s += v;
  }
  return s;
}

Vec IndependentModel::grad(const Vec& theta) const {
  check_dim(theta);
  if (!in_domain(theta)) throw Error(ErrorCode::Domain, "gradient requested outside the cgf domain");
  Vec g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = comps_[i].d1(theta[i]);
  return g;
}

Mat IndependentModel::hessian(const Vec& theta) const {
  check_dim(theta);
  if (!in_domain(theta)) throw Error(ErrorCode::Domain, "hessian requested outside the cgf domain");
  Mat h = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) h(i, i) = comps_[i].d2(theta[i]);
  return h;
}

bool IndependentModel::in_domain(const Vec& theta) const {
  if (theta.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (!comps_[i].in_domain(theta[i])) return false;
  return true;
}

Vec IndependentModel::mean() const {
  Vec m(dim());
  for (int i = 0; i < dim(); ++i) m[i] = comps_[i].mean();
  return m;
}

std::unique_ptr<Sampler> IndependentModel::tilted(const Vec& theta) const {
  check_dim(theta);
  if (!in_domain(theta)) throw Error(ErrorCode::Domain, "tilt outside the cgf domain");
  return std::make_unique<IndependentSampler>(comps_, theta);
}

double IndependentModel::marginal_root(int k) const {
  if (k < 0 || k >= dim()) throw Error(ErrorCode::InvalidArgument, "index out of range");
  return siegmund_root(comps_[k]);
}

std::vector<int> IndependentModel::symmetry_classes() const {
  std::vector<int> cls(dim());
  std::vector<Scalar> seen;
  for (int i = 0; i < dim(); ++i) {
    int id = -1;
    for (std::size_t j = 0; j < seen.size(); ++j)
      if (seen[j] == comps_[i]) { id = static_cast<int>(j); break; }
    if (id < 0) { id = static_cast<int>(seen.size()); seen.push_back(comps_[i]); }
    cls[i] = id;
  }
  return cls;
}

json IndependentModel::to_json() const {
  json comps = json::array();
  for (const auto& c : comps_) comps.push_back(c.to_json());
  return {{"family", "independent"}, {"components", comps}};
}

}  // namespace rarewalk
