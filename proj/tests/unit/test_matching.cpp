#include <cmath>
#include <vector>

#include "doctest.h"
#include "toolsel/core/error.hpp"
#include "toolsel/core/random.hpp"
#include "toolsel/matching/similarity.hpp"

using namespace toolsel;
using namespace toolsel::matching;

namespace {

AttributeVector filled(double v) {
  AttributeVector a;
  a.fill(v);
  return a;
}

}  // namespace

TEST_CASE("metric names") {
  CHECK(parse_metric("cosine") == SimilarityMetric::cosine);
  CHECK(parse_metric("euclid") == SimilarityMetric::negative_euclidean);
  CHECK(parse_metric("negative_euclidean") == SimilarityMetric::negative_euclidean);
  CHECK(!parse_metric("dot"));
  CHECK(metric_name(SimilarityMetric::negative_euclidean) == "negative_euclidean");
}

TEST_CASE("cosine examples") {
  const AttributeVector ones = filled(1.0), sevens = filled(7.0);
  CHECK(cosine_similarity(ones, sevens) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(sevens, sevens) == doctest::Approx(1.0).epsilon(1e-15));

  AttributeVector a = ones, b = ones;
  a[0] = 3;
  a[1] = 4;
  b[0] = 4;
  b[1] = 3;
  // Extended-precision reference: dot = 35, |a|^2 = |b|^2 = 36.
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < 13; ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  const long double ref = dot / (std::sqrt(na) * std::sqrt(nb));
  CHECK(std::abs(static_cast<long double>(cosine_similarity(a, b)) - ref) < 1e-15L);
  CHECK(std::abs(cosine_similarity(a, b) - 35.0 / 36.0) < 1e-15);

  CHECK_THROWS_AS(cosine_similarity(filled(0.0), ones), NumericError);
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>(3, 1.0), ones), InvalidArgument);
}

TEST_CASE("negative euclidean examples") {
  const AttributeVector ones = filled(1.0), twos = filled(2.0), sevens = filled(7.0);
  CHECK(negative_euclidean(ones, ones) == 0.0);
  CHECK(negative_euclidean(ones, twos) == doctest::Approx(-std::sqrt(13.0)).epsilon(1e-15));
  CHECK(negative_euclidean(ones, sevens) == doctest::Approx(-6.0 * std::sqrt(13.0)).epsilon(1e-15));
  CHECK(negative_euclidean(ones, sevens) == doctest::Approx(-21.6333).epsilon(1e-5));
}

TEST_CASE("ablation mask") {
  AttributeVector v;
  for (std::size_t i = 0; i < 13; ++i) v[i] = static_cast<double>(i + 1);
  const std::vector<double> full = apply_mask(v, {});
  CHECK(full == std::vector<double>(v.begin(), v.end()));
  const std::vector<double> no_first = apply_mask(v, AblationMask::removing(0));
  CHECK(no_first.size() == 12);
  CHECK(no_first.front() == 2.0);

  AttributeVector t1 = filled(3.0), t2 = filled(3.0);
  t2[6] = 6.0;
  const AblationMask no_grasp = AblationMask::removing(6);
  CHECK(cosine_similarity(apply_mask(t1, no_grasp), apply_mask(t2, no_grasp)) == 1.0);
  CHECK(cosine_similarity(t1, t2) < 1.0);

  CHECK_THROWS_AS(AblationMask::removing(13), InvalidArgument);
  std::set<std::size_t> all;
  for (std::size_t i = 0; i < 13; ++i) all.insert(i);
  CHECK_THROWS_AS(AblationMask{all}, InvalidArgument);
  all.erase(4);
  const AblationMask one_left(all);
  CHECK(one_left.kept_count() == 1);
  CHECK(apply_mask(v, one_left) == std::vector<double>{5.0});
}

TEST_CASE("ranking") {
  SUBCASE("exact match first under negative euclidean") {
    std::vector<Candidate> c{{10, filled(2.0)}, {11, filled(5.0)}, {12, filled(6.0)}};
    AttributeVector q = filled(5.0);
    const auto r = rank_candidates(q, c, SimilarityMetric::negative_euclidean);
    CHECK(r.front().id == 11);
    CHECK(r.front().score == 0.0);
    CHECK(select_tool(q, c, SimilarityMetric::negative_euclidean) == ScoredCandidate{11, 0.0});
  }
  SUBCASE("identical candidates tie by id") {
    std::vector<Candidate> c{{9, filled(3.0)}, {2, filled(3.0)}, {5, filled(3.0)}};
    for (auto metric : {SimilarityMetric::cosine, SimilarityMetric::negative_euclidean}) {
      const auto r = rank_candidates(filled(4.0), c, metric);
      CHECK(r[0].id == 2);
      CHECK(r[1].id == 5);
      CHECK(r[2].id == 9);
    }
  }
  SUBCASE("hand-built three candidate ordering") {
    AttributeVector q = filled(1.0), a = filled(1.0), b = filled(1.0), c = filled(1.0);
    q[0] = 7;
    a[0] = 6;         // close to q
    b[1] = 7;         // orthogonal-ish direction
    c[0] = 7;
    c[2] = 3;         // between the two
    std::vector<Candidate> cands{{1, b}, {2, c}, {3, a}};
    for (auto metric : {SimilarityMetric::cosine, SimilarityMetric::negative_euclidean}) {
      const auto r = rank_candidates(q, cands, metric);
      // Exhaustive re-scoring.
      std::vector<ScoredCandidate> oracle;
      for (const auto& cand : cands) oracle.push_back({cand.id, similarity(metric, q, cand.attributes)});
      std::sort(oracle.begin(), oracle.end(), [](auto& x, auto& y) {
        return x.score > y.score || (x.score == y.score && x.id < y.id);
      });
      CHECK(r == oracle);
      CHECK(r.back().id == 1);
    }
  }
  SUBCASE("single candidate") {
    std::vector<Candidate> c{{4, filled(2.0)}};
    CHECK(select_tool(filled(6.0), c, SimilarityMetric::cosine).id == 4);
  }
  SUBCASE("errors") {
    std::vector<Candidate> none;
    CHECK_THROWS_AS(select_tool(filled(1.0), none, SimilarityMetric::cosine), InvalidArgument);
    std::vector<Candidate> zero{{1, filled(1.0)}, {77, filled(0.0)}};
    try {
      rank_candidates(filled(1.0), zero, SimilarityMetric::cosine);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("77") != std::string::npos);
    }
  }
}

TEST_CASE("similarity invariants on random pairs") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    AttributeVector a, b;
    for (std::size_t k = 0; k < 13; ++k) {
      a[k] = rng.uniform(-5, 5);
      b[k] = rng.uniform(-5, 5);
    }
    const double s = rng.uniform(0.01, 100);
    AttributeVector sa;
    for (std::size_t k = 0; k < 13; ++k) sa[k] = s * a[k];
    CHECK(std::abs(cosine_similarity(sa, b) - cosine_similarity(a, b)) <= 1e-12);
    CHECK(std::abs(cosine_similarity(a, b) - cosine_similarity(b, a)) <= 1e-12);
    CHECK(std::abs(negative_euclidean(a, b) - negative_euclidean(b, a)) <= 1e-12);
    const double c = cosine_similarity(a, b);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
  }
}
