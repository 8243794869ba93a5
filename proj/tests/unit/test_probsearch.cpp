#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slm/probsearch.hpp"

using namespace slm;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("coefficient_range") {
  ProbSearchParams p;
  p.alpha0 = 10.0;
  p.alpha = 0.5;
  CHECK(coefficient_range(1, p) == 6);
  CHECK(coefficient_range(1, p) == static_cast<int>(std::floor(10.0 * std::exp(-0.5))));
  CHECK(coefficient_range(5, p) == 0);  // 10 e^-2.5 = 0.82
  p.alpha = 0.0;
  for (std::size_t d = 1; d < 20; ++d) CHECK(coefficient_range(d, p) == 10);
}

TEST_CASE("selection_probability") {
  ProbSearchParams p;
  p.beta = 0.5;
  CHECK(selection_probability(1, p) == 1.0);
  CHECK(selection_probability(3, p) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  p.beta = 0.0;
  for (std::size_t d = 1; d < 10; ++d) CHECK(selection_probability(d, p) == 1.0);
}

TEST_CASE("range and probability are non-increasing in rank") {
  ProbSearchParams p;
  for (double a : {0.0, 0.1, 0.3, 1.0}) {
    p.alpha = a;
    p.beta = a;
    for (std::size_t d = 1; d < 30; ++d) {
      CHECK(coefficient_range(d + 1, p) <= coefficient_range(d, p));
      CHECK(selection_probability(d + 1, p) <= selection_probability(d, p));
    }
  }
}

TEST_CASE("only the top rank eligible gives a signed one-hot vector") {
  ProbSearchParams p;
  p.R = 1;
  p.beta = 1e6;
  std::vector<std::size_t> order{3, 0, 2, 1};
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    auto a = sample_projection(order, 4, p, rng);
    CHECK(a.nonzeros() == 1);
    CHECK(std::abs(a.coeffs[3]) == 1.0);
  }
}

TEST_CASE("sampled vectors are unit norm with at most R nonzeros") {
  ProbSearchParams p;
  Rng rng(4);
  for (std::size_t dims : {1u, 5u, 10u, 40u}) {
    for (std::size_t r : {1u, 2u, 8u}) {
      if (r > dims) continue;
      p.R = r;
      auto order = iota(dims);
      for (int i = 0; i < 50; ++i) {
        auto a = sample_projection(order, dims, p, rng);
        CHECK(a.coeffs.size() == dims);
        CHECK(a.nonzeros() >= 1);
        CHECK(a.nonzeros() <= r);
        CHECK(norm(a.coeffs) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  ProbSearchParams p;
  p.alpha0 = 3.0;
  p.alpha = 0.3;
  p.beta = 0.2;
  p.R = 3;
  DftRanking ranking;
  ranking.order = {4, 9, 0, 1, 2, 3, 5, 6, 7, 8};
  ranking.losses.assign(10, 0.5);
  Rng a(77), b(77);
  for (int i = 0; i < 10; ++i) CHECK(sample_projection(ranking, p, a).coeffs == sample_projection(ranking, p, b).coeffs);
}

TEST_CASE("ranks beyond the coefficient range stay zero") {
  ProbSearchParams p;
  p.alpha0 = 1.5;  // A_1 = 1, A_d = 0 for d >= 2
  p.alpha = 0.3;
  p.beta = 0.0;
  p.R = 5;
  Rng rng(3);
  auto a = sample_projection(iota(5), 5, p, rng);
  CHECK(a.nonzeros() == 1);
  CHECK(std::abs(a.coeffs[0]) == 1.0);

  p.alpha0 = 0.5;  // every range is zero
  CHECK_THROWS_AS(sample_projection(iota(5), 5, p, rng), Error);
}

TEST_CASE("parameter validation") {
  ProbSearchParams p;
  CHECK_NOTHROW(p.validate(4));
  p.R = 5;
  CHECK_THROWS_AS(p.validate(4), Error);
  p = {};
  p.q = 600;
  CHECK_THROWS_AS(p.validate(4), Error);
  p = {};
  p.cos_max = 0.0;
  CHECK_THROWS_AS(p.validate(4), Error);
  CHECK(ProbSearchParams{}.effective_R(20) == 8);
  CHECK(ProbSearchParams{}.effective_R(3) == 3);
}

TEST_CASE("select_diverse") {
  SUBCASE("identical vectors keep only the lower loss") {
    std::vector<ProjectionVector> c{{{1, 0}}, {{1, 0}}};
    std::vector<double> losses{0.4, 0.2};
    CHECK(select_diverse(c, losses, 2, 0.9) == std::vector<std::size_t>{1});
  }
  SUBCASE("orthogonal pair is kept") {
    std::vector<ProjectionVector> c{{{1, 0}}, {{0, 1}}};
    std::vector<double> losses{0.4, 0.2};
    CHECK(select_diverse(c, losses, 2, 0.9) == std::vector<std::size_t>{1, 0});
  }
  SUBCASE("vectors at 30 degrees against cos_max 0.8") {
    const double t = std::numbers::pi / 6.0;
    std::vector<ProjectionVector> c{{{1, 0}}, {{std::cos(t), std::sin(t)}}};
    CHECK(cosine_similarity(c[0].coeffs, c[1].coeffs) == doctest::Approx(std::sqrt(3.0) / 2.0));
    std::vector<double> losses{0.1, 0.2};
    CHECK(select_diverse(c, losses, 2, 0.8) == std::vector<std::size_t>{0});
    CHECK(select_diverse(c, losses, 2, 0.9) == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("antiparallel counts as correlated") {
    std::vector<ProjectionVector> c{{{1, 0}}, {{-1, 0}}};
    std::vector<double> losses{0.1, 0.2};
    CHECK(select_diverse(c, losses, 2, 0.9).size() == 1);
  }
  SUBCASE("stops at q") {
    std::vector<ProjectionVector> c{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}};
    std::vector<double> losses{0.3, 0.2, 0.1};
    CHECK(select_diverse(c, losses, 2, 0.5) == std::vector<std::size_t>{2, 1});
  }
  CHECK_THROWS_AS(select_diverse({}, {}, 1, 0.9), Error);
}

TEST_CASE("accepted pairs respect cos_max") {
  ProbSearchParams p;
  p.R = 3;
  Rng rng(12);
  auto order = iota(6);
  std::vector<ProjectionVector> cands;
  std::vector<double> losses;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    cands.push_back(sample_projection(order, 6, p, rng));
    losses.push_back(unit(rng));
  }
  for (double cos_max : {0.3, 0.7, 0.9}) {
    auto kept = select_diverse(cands, losses, 10, cos_max);
    CHECK(!kept.empty());
    CHECK(losses[kept[0]] == *std::min_element(losses.begin(), losses.end()));
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j)
        CHECK(std::abs(cosine_similarity(cands[kept[i]].coeffs, cands[kept[j]].coeffs)) <= cos_max);
  }
}
