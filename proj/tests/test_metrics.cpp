#include <doctest.h>

#include <cmath>
#include <random>

#include "glaucofuse/error.hpp"
#include "glaucofuse/metrics.hpp"
#include "oracles.hpp"

using namespace glaucofuse;

namespace {

constexpr Label G = Label::Glaucoma;
constexpr Label N = Label::Normal;

std::vector<ScoredSample> random_set(std::mt19937_64& rng, std::size_t max_n, bool coarse) {
  std::uniform_int_distribution<std::size_t> size(2, max_n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = size(rng);
  std::vector<ScoredSample> s(n);
  for (auto& x : s) {
    x.score = coarse ? std::round(u(rng) * 10.0) / 10.0 : u(rng);
    x.label = u(rng) < 0.5 ? G : N;
  }
  s[0].label = G;
  s[1].label = N;
  return s;
}

}  // namespace

TEST_CASE("confusion examples") {
  CHECK(confusion({}, 0.5) == Confusion{});
  const std::vector<ScoredSample> s{{0.9, G}, {0.2, N}};
  CHECK(confusion(s, 0.5) == Confusion{1, 0, 1, 0});
  const std::vector<ScoredSample> t{{0.1, G}, {0.3, G}, {0.0, N}, {0.7, N}, {0.2, N}};
  CHECK(confusion(t, 0.0) == Confusion{2, 0, 0, 3});
  CHECK(confusion(t, 0.3) == Confusion{1, 1, 2, 1});  // closed on the positive side
}

TEST_CASE("confusion counts partition the samples") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_set(rng, 40, true);
    CHECK(confusion(s, 0.5).total() == s.size());
  }
}

TEST_CASE("sens_spec examples") {
  const auto p = sens_spec({10, 0, 10, 0});
  CHECK(p.sensitivity == 1.0);
  CHECK(p.specificity == 1.0);
  const auto q = sens_spec({1, 1, 3, 1});
  CHECK(q.sensitivity == 0.5);
  CHECK(q.specificity == 0.75);
  CHECK(sens_spec({0, 5, 2, 2}).sensitivity == 0.0);
  try {
    sens_spec({0, 0, 2, 1});
    FAIL("expected NoPositives");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoPositives);
  }
  try {
    sens_spec({2, 1, 0, 0});
    FAIL("expected NoNegatives");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoNegatives);
  }
}

TEST_CASE("f1_harmonic examples and bound") {
  CHECK(std::abs(f1_harmonic(0.8655, 0.8457) - 0.8555) <= 1e-4);
  CHECK(std::abs(f1_harmonic(0.95, 0.8722) - 0.9094) <= 1e-4);
  CHECK(f1_harmonic(0.0, 0.0) == 0.0);
  CHECK(f1_harmonic(0.3, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(f1_harmonic(a, b) <= (a + b) / 2.0 + 1e-15);
  }
}

TEST_CASE("roc_auc examples") {
  const std::vector<ScoredSample> separated{{0.1, N}, {0.2, N}, {0.8, G}, {0.9, G}};
  CHECK(roc_auc(separated).auc == 1.0);
  const std::vector<ScoredSample> mixed{{0.1, N}, {0.4, N}, {0.35, G}, {0.8, G}};
  CHECK(roc_auc(mixed).auc == 0.75);
  const std::vector<ScoredSample> flat{{0.5, N}, {0.5, N}, {0.5, G}};
  const auto c = roc_auc(flat);
  CHECK(c.auc == 0.5);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points.front() == RocPoint{0, 0});
  CHECK(c.points.back() == RocPoint{1, 1});

  const std::vector<ScoredSample> one{{0.5, G}, {0.7, G}};
  try {
    roc_auc(one);
    FAIL("expected SingleClassData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingleClassData);
  }
}

TEST_CASE("roc_auc equals the Mann-Whitney statistic") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_set(rng, 30, i % 2 == 0);
    CHECK(std::abs(roc_auc(s).auc - testing::mann_whitney_auc(s)) <= 1e-12);
  }
}

TEST_CASE("roc points are monotone from (0,0) to (1,1)") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto c = roc_auc(random_set(rng, 30, true));
    CHECK(c.points.front() == RocPoint{0, 0});
    CHECK(c.points.back() == RocPoint{1, 1});
    for (std::size_t k = 1; k < c.points.size(); ++k) {
      CHECK(c.points[k].fpr >= c.points[k - 1].fpr);
      CHECK(c.points[k].tpr >= c.points[k - 1].tpr);
    }
  }
}

TEST_CASE("AUC is invariant under strictly monotone transforms") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto s = random_set(rng, 30, i % 2 == 0);
    const double before = roc_auc(s).auc;
    for (auto& x : s) x.score = std::exp(3.0 * x.score) - 7.0;
    CHECK(roc_auc(s).auc == doctest::Approx(before).epsilon(1e-15));
  }
}

TEST_CASE("select_threshold examples") {
  const std::vector<ScoredSample> separated{{0.1, N}, {0.2, N}, {0.3, N}, {0.7, G}, {0.9, G}};
  const double t = select_threshold(separated);
  CHECK(t == doctest::Approx(0.5));
  const auto ss = sens_spec(confusion(separated, t));
  CHECK(f1_harmonic(ss.sensitivity, ss.specificity) == 1.0);

  // every normal outscores every glaucoma: only threshold 1 rejects them all
  const std::vector<ScoredSample> inverted{{0.9, N}, {0.95, N}, {0.97, N}, {0.1, G}, {0.2, G}};
  CHECK(select_threshold(inverted) == 1.0);

  const std::vector<ScoredSample> one{{0.5, N}};
  CHECK_THROWS_AS(select_threshold(one), Error);
}

TEST_CASE("select_threshold is not dominated by a dense grid") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_set(rng, 200, i % 3 == 0);
    CHECK(!testing::grid_dominates(s, select_threshold(s)));
  }
}

TEST_CASE("evaluate fills a report") {
  const std::vector<ScoredSample> s{{0.1, N}, {0.4, N}, {0.35, G}, {0.8, G}};
  const auto r = evaluate(s, 0.3);
  CHECK(r.auc == 0.75);
  CHECK(r.threshold == 0.3);
  CHECK(r.counts == Confusion{2, 0, 1, 1});
  CHECK(r.sensitivity == 1.0);
  CHECK(r.specificity == 0.5);
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.roc_points.size() >= 2);
}
