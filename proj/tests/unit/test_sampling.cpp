#include <algorithm>
#include <cmath>
#include <set>

#include "acceldse/rng.hpp"
#include "acceldse/sampling.hpp"
#include "doctest.h"

using namespace acceldse;

namespace {

// Stratum index multiset per dimension must be exactly {0..n-1}.
bool is_latin(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  for (std::size_t d = 0; d < pts[0].size(); ++d) {
    std::vector<std::size_t> strata;
    for (const auto& p : pts)
      strata.push_back(std::min(n - 1, static_cast<std::size_t>(p[d] * static_cast<double>(n))));
    std::sort(strata.begin(), strata.end());
    for (std::size_t i = 0; i < n; ++i)
      if (strata[i] != i) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lhs stratification across sizes") {
  for (std::size_t n : {4u, 16u, 24u}) {
    const auto pts = lhs(3, n, 7);
    REQUIRE(pts.size() == n);
    CHECK(is_latin(pts));
    for (const auto& p : pts)
      for (double c : p) {
        CHECK(c >= 0.0);
        CHECK(c < 1.0);
      }
  }
}

TEST_CASE("lhs dim=1 n=4 occupies every quarter") {
  const auto pts = lhs(1, 4, 42);
  std::set<int> strata;
  for (const auto& p : pts) strata.insert(static_cast<int>(p[0] * 4.0));
  CHECK(strata == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("lhs maximin selection beats every internal candidate") {
  const auto chosen = lhs(2, 8, 19);
  const double best = min_pairwise_distance(chosen);
  for (const auto& cand : lhs_candidates(2, 8, 19))
    CHECK(best >= min_pairwise_distance(cand) - 1e-12);
}

TEST_CASE("lhs determinism") {
  CHECK(lhs(3, 24, 7) == lhs(3, 24, 7));
}

TEST_CASE("lhs rejects empty designs") {
  CHECK_THROWS(lhs(0, 4, 1));
  CHECK_THROWS(lhs(2, 0, 1));
}

TEST_CASE("halton radical-inverse values") {
  HaltonSampler s(2);
  const auto pts = s.next(4);
  // base 2: 1/2, 1/4, 3/4, 1/8 ; base 3 first point: 1/3
  CHECK(pts[0][0] == doctest::Approx(0.5));
  CHECK(pts[1][0] == doctest::Approx(0.25));
  CHECK(pts[2][0] == doctest::Approx(0.75));
  CHECK(pts[3][0] == doctest::Approx(0.125));
  CHECK(pts[0][1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("halton prefix extension") {
  HaltonSampler whole(3);
  const auto all = whole.next(16);
  HaltonSampler split(3);
  auto first = split.next(8);
  const auto second = split.next(8);
  first.insert(first.end(), second.begin(), second.end());
  CHECK(all == first);
}

TEST_CASE("halton rejects oversized dimension") {
  CHECK_THROWS(HaltonSampler(65));
}

TEST_CASE("sobol first points in 1D") {
  SobolSampler s(1);
  const auto pts = s.next(3);
  CHECK(pts[0][0] == doctest::Approx(0.5));
  CHECK(pts[1][0] == doctest::Approx(0.75));
  CHECK(pts[2][0] == doctest::Approx(0.25));
}

TEST_CASE("sobol prefix extension is bitwise equal") {
  SobolSampler whole(5);
  const auto all = whole.next(30);
  SobolSampler split(5);
  auto first = split.next(10);
  const auto second = split.next(20);
  first.insert(first.end(), second.begin(), second.end());
  CHECK(all == first);  // exact == on doubles checks bitwise equality here
}

TEST_CASE("sobol 2D coordinates are dyadic with denominator <= 2^7") {
  SobolSampler s(2);
  for (const auto& p : s.next(64))
    for (double c : p) {
      const double scaled = c * 128.0;
      CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
      CHECK(c >= 0.0);
      CHECK(c < 1.0);
    }
}

TEST_CASE("sobol dimension limits") {
  CHECK(SobolSampler::max_dim() >= 16);
  CHECK_THROWS(SobolSampler(SobolSampler::max_dim() + 1));
  SobolSampler s(SobolSampler::max_dim());
  CHECK(s.next(4).size() == 4);
}

TEST_CASE("star discrepancy known values") {
  CHECK(star_discrepancy_bruteforce({{0.5}}) == doctest::Approx(0.5));
  CHECK(star_discrepancy_bruteforce({{0.25}, {0.75}}) == doctest::Approx(0.25));
}

TEST_CASE("star discrepancy size limits") {
  std::vector<Point> big(257, Point{0.5});
  CHECK_THROWS(star_discrepancy_bruteforce(big));
  CHECK_THROWS(star_discrepancy_bruteforce({{0.1, 0.2, 0.3, 0.4}}));
}

TEST_CASE("sobol is more uniform than seeded random points") {
  SobolSampler s(2);
  const double sobol_d = star_discrepancy_bruteforce(s.next(16));
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<Point> rand_pts;
    for (int i = 0; i < 16; ++i) rand_pts.push_back({rng.uniform(), rng.uniform()});
    if (sobol_d < star_discrepancy_bruteforce(rand_pts)) ++wins;
  }
  CHECK(wins >= 4);
}
