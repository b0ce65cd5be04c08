#include <doctest.h>

#include "proposal.hpp"

#include <cmath>
#include <cstring>

using namespace rarewalk;

namespace {

bool contains(const MixtureProposal& p, const Vec& t) {
  for (const auto& x : p.thetas)
    if ((x - t).norm() <= 1e-12) return true;
  return false;
}

bool subset(const MixtureProposal& a, const MixtureProposal& b) {
  for (const auto& t : a.thetas)
    if (!contains(b, t)) return false;
  return true;
}

}  // namespace

TEST_CASE("siegmund variants nest") {
  Vec mu(4);
  mu << -0.5, -0.8, -0.3, -1.0;
  Mat S(4, 4);
  S << 1.0, 0.2, 0.1, 0.0, 0.2, 1.5, 0.3, 0.1, 0.1, 0.3, 0.8, -0.1, 0.0, 0.1, -0.1, 1.2;
  MvNormalModel m(mu, S);
  const auto t0 = build_siegmund(m, 1.0, 1.0, "theta0");
  const auto t1 = build_siegmund(m, 1.0, 1.0, "theta1");
  const auto t2 = build_siegmund(m, 1.0, 1.0, "theta2");
  CHECK(t0.proposal.size() == 4);
  CHECK(t1.proposal.size() <= 8);
  CHECK(t2.proposal.size() <= 4 + 6);
  CHECK(subset(t0.proposal, t1.proposal));
  CHECK(subset(t0.proposal, t2.proposal));
  CHECK(t1.report.condition == "H1");
  CHECK(t2.report.condition == "H2");
  CHECK(t0.report.condition == "direct");
  CHECK(!t0.report.holds);  // not exchangeable, so nothing is certified
  for (const auto* b : {&t0, &t1, &t2}) CHECK_NOTHROW(b->proposal.validate(m));
}

TEST_CASE("H1 implies H2 on the exchangeable normal") {
  for (double u : {3.0, 1.0, 0.5}) {
    for (int i = 0; i <= 90; i += 5) {
      auto m = MvNormalModel::exchangeable(30, -0.5, 1.0, i / 100.0);
      const auto h1 = siegmund_condition(*m, 1.0, u, "H1");
      const auto h2 = siegmund_condition(*m, 1.0, u, "H2");
      if (h1.holds) CHECK(h2.holds);
      CHECK(h1.r_star == doctest::Approx(h2.r_star));
    }
  }
}

TEST_CASE("H1 boundary at d = 50, u = 1") {
  CHECK(siegmund_condition(*MvNormalModel::exchangeable(50, -0.5, 1.0, 0.45), 1.0, 1.0, "H1").holds);
  CHECK(!siegmund_condition(*MvNormalModel::exchangeable(50, -0.5, 1.0, 0.46), 1.0, 1.0, "H1").holds);
}

TEST_CASE("direct condition boundary at d = 100") {
  BuildOptions o;
  CHECK(check_direct_siegmund_homogeneous(*MvNormalModel::exchangeable(100, -0.5, 1.0, 0.51), 1.0, 1.0, o).holds);
  CHECK(!check_direct_siegmund_homogeneous(*MvNormalModel::exchangeable(100, -0.5, 1.0, 0.52), 1.0, 1.0, o).holds);
}

TEST_CASE("direct condition on i.i.d. coordinates") {
  IndependentModel m(std::vector<Scalar>(20, Scalar::shifted_exponential(2.0, -std::log(2.0))));
  const auto r = check_direct_siegmund_homogeneous(m, 1.0, 1.0);
  CHECK(r.holds);
  CHECK(r.lhs > r.rhs);
}

TEST_CASE("collapse when gamma coincides with beta") {
  // (ell/u) kappa1 <= kappa0: the singleton beta is the marginal root tilt, so Theta1 = Theta0
  IndependentModel m(std::vector<Scalar>(6, Scalar::normal(-0.5, 1.0)));
  const auto t0 = build_siegmund(m, 1.0, 2.0, "theta0");
  const auto t1 = build_siegmund(m, 1.0, 2.0, "theta1");
  CHECK(t1.proposal.size() == t0.proposal.size());
  bool merged = false;
  for (const auto& p : t1.proposal.provenance) merged = merged || p.size() == 2;
  CHECK(merged);
}

TEST_CASE("one-dimensional siegmund") {
  IndependentModel m({Scalar::normal(-0.5, 1.0)});
  const auto b = build_siegmund(m, 1.0, 1.0, "theta0");
  REQUIRE(b.proposal.size() == 1);
  CHECK(b.proposal.thetas[0][0] == doctest::Approx(1.0));
  CHECK(b.report.holds);
}

TEST_CASE("exchangeable gap: two-index and mixed tilts coincide") {
  Vec mu(10);
  for (int i = 0; i < 10; ++i) mu[i] = i < 5 ? 0.5 : -0.5;
  Mat S = Mat::Constant(10, 10, 0.1);
  S.diagonal().setOnes();
  MvNormalModel m(mu, S);
  const auto t0 = build_gap(m, 5, "theta0");
  const auto t1 = build_gap(m, 5, "theta1");
  CHECK(t0.proposal.size() == t1.proposal.size());
  CHECK(subset(t1.proposal, t0.proposal));
  CHECK(t1.report.condition == "H1'");
  CHECK(t1.report.holds);
  CHECK(t0.report.holds);
}

TEST_CASE("gap conditions against the variance") {
  auto model = [](double v) {
    std::vector<Scalar> c;
    for (int i = 0; i < 50; ++i) c.push_back(i < 25 ? Scalar::normal(0.5, 1.0) : Scalar::normal(-0.5, v));
    return IndependentModel(c);
  };
  CHECK(gap_condition(model(1.0), 25, "H1'").holds);
  CHECK(!gap_condition(model(0.05), 25, "H1'").holds);
  CHECK(!gap_condition(model(0.05), 25, "H2'").holds);
  CHECK(!gap_condition(model(10.0), 25, "H1'").holds);
  CHECK(gap_condition(model(10.0), 25, "H2'").holds);
}

TEST_CASE("sum-intersection sizes and cap") {
  CHECK(binomial(50, 2) == 1225);
  CHECK(binomial(50, 3) == 19600);
  auto m = MvNormalModel::exchangeable(50, -0.5, 1.0, 0.1);
  const auto b = build_sum_intersection(*m, 2);
  CHECK(b.proposal.size() == 2450);
  CHECK(b.report.condition == "H-SI");
  CHECK(b.report.holds);
  BuildOptions o;
  o.cap = 1000;
  try {
    build_sum_intersection(*m, 2, o);
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Limit);
    CHECK(std::strstr(e.what(), "2450") != nullptr);
  }
}

TEST_CASE("sum-intersection size for L = 3" * doctest::timeout(120)) {
  auto m = MvNormalModel::exchangeable(50, -0.5, 1.0, 0.1);
  BuildOptions o;
  o.workers = 2;
  CHECK(build_sum_intersection(*m, 3, o).proposal.size() == 39200);
}

TEST_CASE("sum-intersection condition boundaries") {
  for (auto [L, lo, hi] : {std::tuple{2, 0.23, 0.24}, std::tuple{3, 0.14, 0.15}}) {
    CHECK(si_condition(*MvNormalModel::exchangeable(50, -0.5, 1.0, lo), L).holds);
    CHECK(!si_condition(*MvNormalModel::exchangeable(50, -0.5, 1.0, hi), L).holds);
  }
}

TEST_CASE("full enumeration matches the exchangeable shortcut") {
  Vec mu = Vec::Constant(6, -0.5);
  Mat S = Mat::Constant(6, 6, 0.2);
  S.diagonal().setOnes();
  S(0, 1) = S(1, 0) = 0.2000000001;  // breaks exact exchangeability
  MvNormalModel a(mu, S);
  auto b = MvNormalModel::exchangeable(6, -0.5, 1.0, 0.2);
  const auto ra = si_condition(a, 2), rb = si_condition(*b, 2);
  CHECK(ra.lhs == doctest::Approx(rb.lhs).epsilon(1e-6));
  CHECK(ra.rhs == doctest::Approx(rb.rhs).epsilon(1e-6));
}

TEST_CASE("manifest round trip keeps lambdas bit for bit") {
  auto m = MvNormalModel::exchangeable(6, -0.5, 1.0, 0.3);
  const auto b = build_siegmund(*m, 1.0, 1.0, "theta2");
  const json j = json::parse(proposal_manifest(b.proposal, b.report, *m).dump());
  const auto p = proposal_from_manifest(j);
  REQUIRE(p.size() == b.proposal.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(std::memcmp(&p.lambdas[i], &b.proposal.lambdas[i], sizeof(double)) == 0);
    CHECK(p.thetas[i] == b.proposal.thetas[i]);
    CHECK(p.provenance[i] == b.proposal.provenance[i]);
  }
  CHECK(j["format"] == "rarewalk-proposal");
  CHECK_THROWS_AS(proposal_from_manifest(json{{"format", "other"}}), Error);
}

TEST_CASE("manifest warns when the condition fails") {
  auto m = MvNormalModel::exchangeable(50, -0.5, 1.0, 0.8);
  const auto b = build_siegmund(*m, 1.0, 1.0, "theta1");
  CHECK(!b.report.holds);
  CHECK(proposal_manifest(b.proposal, b.report, *m).contains("warning"));
}

TEST_CASE("validation rejects a perturbed lambda") {
  auto m = MvNormalModel::exchangeable(4, -0.5, 1.0, 0.3);
  auto b = build_siegmund(*m, 1.0, 1.0, "theta0");
  b.proposal.lambdas[0] += 1e-6;
  CHECK_THROWS_AS(b.proposal.validate(*m), Error);
}

TEST_CASE("deduplication keeps provenance") {
  MixtureProposal p;
  Vec a(2), c(2);
  a << 1.0, -0.5;
  c << 0.2, 0.1;
  p.thetas = {a, c, a + Vec::Constant(2, 1e-15)};
  p.lambdas = {0.0, 0.0, 0.0};
  p.provenance = {{"x"}, {"y"}, {"z"}};
  p.deduplicate();
  REQUIRE(p.size() == 2);
  CHECK(p.provenance[0] == std::vector<std::string>{"x", "z"});
}

TEST_CASE("modified siegmund count") {
  const json j = modified_siegmund_demo(20);
  CHECK(j["required_components"].get<double>() == 184756);
  CHECK_THROWS_AS(modified_siegmund_demo(7), Error);
}
