#include <doctest.h>

#include "lp_oracle.hpp"
#include "regions.hpp"

#include <random>

using namespace rarewalk;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}
}  // namespace

TEST_CASE("siegmund classification") {
  const Problem p = Problem::siegmund(1.0, 2.0);
  CHECK(!classify_state(vec({3.0, -0.5}), 1.0, p));
  auto r = classify_state(vec({-1.5, -3.0}), 1.0, p);
  REQUIRE(r);
  CHECK(!r->rare);
  r = classify_state(vec({2.5, -1.5, 4.0}), 1.0, p);
  REQUIRE(r);
  CHECK(r->rare);
  CHECK(r->set == std::vector<int>{0, 2});
  CHECK(r->label() == "rare{0,2}");
}

TEST_CASE("gap classification and ties") {
  const Problem p = Problem::gap(2);
  CHECK(!classify_state(vec({3.0, 2.0, 1.5, 0.0}), 1.0, p));
  auto r = classify_state(vec({3.0, 2.0, 0.5, 0.0}), 1.0, p);
  REQUIRE(r);
  CHECK(!r->rare);
  r = classify_state(vec({3.0, 0.0, 1.5, 4.5}), 1.0, p);
  REQUIRE(r);
  CHECK(r->rare);
  CHECK(r->set == std::vector<int>{0, 3});
  // a gap of exactly b does not stop
  ClassifyWork w;
  const Vec x = vec({2.0, 2.0, 1.0, 0.0});
  CHECK(!classify_state(x.data(), 4, 1.0, p, w, nullptr));
  CHECK(w.boundary_ties == 1);
  // equal leaders inside the top block are fine
  CHECK(classify_state(vec({2.0, 2.0, 0.5, 0.0}), 1.0, p));
}

TEST_CASE("sum-intersection classification") {
  const Problem p = Problem::sum_intersection(2);
  CHECK(!classify_state(vec({5.0, -0.2, 0.7}), 1.0, p));
  auto r = classify_state(vec({-2.0, -1.0, 0.6}), 1.0, p);
  REQUIRE(r);
  CHECK(!r->rare);
  r = classify_state(vec({2.0, 1.0, -0.6}), 1.0, p);
  REQUIRE(r);
  CHECK(r->rare);
  CHECK(r->set == std::vector<int>{0, 1});
}

TEST_CASE("rare sets") {
  CHECK(is_rare_set({1}, 3, Problem::siegmund(1, 1)));
  CHECK(!is_rare_set({}, 3, Problem::siegmund(1, 1)));
  CHECK(!is_rare_set({0, 1}, 4, Problem::gap(2)));
  CHECK(is_rare_set({0, 2}, 4, Problem::gap(2)));
  CHECK(!is_rare_set({0}, 4, Problem::gap(2)));
  CHECK(is_rare_set({0, 3}, 4, Problem::sum_intersection(2)));
  CHECK(!is_rare_set({3}, 4, Problem::sum_intersection(2)));
  CHECK(!is_rare_set({2, 1}, 4, Problem::siegmund(1, 1)));
}

TEST_CASE("support values") {
  const Problem s = Problem::siegmund(1.0, 3.0);
  CHECK(support_value(vec({0.5, -0.1}), {0}, s) == doctest::Approx(1.6));
  CHECK(support_value(vec({-0.5, -0.1}), {0}, s) == -INFINITY);
  const Problem g = Problem::gap(1);
  CHECK(support_value(vec({-1.0, 1.0, 0.0}), {1}, g) == doctest::Approx(1.0));
  CHECK(support_value(vec({-1.0, 0.5, 0.0}), {1}, g) == -INFINITY);
}

TEST_CASE("rearrangement value against the LP oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::uniform_int_distribution<int> D(1, 6);
  for (int it = 0; it < 300; ++it) {
    const int d = D(gen);
    const int L = std::uniform_int_distribution<int>(1, std::min(4, d))(gen);
    std::vector<double> th(d);
    for (auto& v : th) v = U(gen);
    if (it % 7 == 0) th[0] = 0.0;
    const Vec t = Eigen::Map<Vec>(th.data(), d);
    CHECK(rearrangement_min(t, L) == doctest::Approx(lp_oracle::rearrangement_lp(th, L)).epsilon(1e-12));
  }
}

TEST_CASE("rearrangement value on a small hand case") {
  // |theta| = 3, 2, 1. L = 2: l = 1 gives 2 + 1, l = 2 gives 6 / 2.
  CHECK(rearrangement_min(vec({1.0, -3.0, 2.0}), 2) == doctest::Approx(3.0));
  CHECK(rearrangement_min(vec({1.0, -3.0, 2.0}), 1) == doctest::Approx(6.0));
  CHECK_THROWS_AS(rearrangement_min(vec({1.0}), 2), Error);
}
