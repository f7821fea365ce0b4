#include <doctest.h>

#include <cmath>
#include <random>

#include "medsim/error.hpp"
#include "medsim/sparse_features.hpp"
#include "oracles.hpp"

using namespace medsim;
using kg::Category;

namespace {

kg::AnnotationCatalog catalog_with(Category c, std::map<std::string, int> dfs,
                                   size_t drug_count) {
  kg::AnnotationCatalog catalog;
  catalog.drug_count = drug_count;
  for (auto& [id, df] : dfs) catalog.category(c)[id] = {id, df};
  return catalog;
}

}  // namespace

TEST_CASE("idf matches the literal formula") {
  auto catalog = catalog_with(Category::side_effect, {{"s", 9}}, 99);
  const double got = sparse::idf("s", catalog, Category::side_effect);
  CHECK(got == doctest::Approx(0.460517).epsilon(1e-6));
  CHECK(oracle::rel_err(got, oracle::idf_paper(99, 9)) < 1e-12);
}

TEST_CASE("idf on the smallest legal catalog") {
  auto catalog = catalog_with(Category::side_effect, {{"s", 1}}, 1);
  CHECK(sparse::idf("s", catalog, Category::side_effect) ==
        doctest::Approx(std::log(2.0) / 2.0));
}

TEST_CASE("idf of an unknown annotation throws") {
  auto catalog = catalog_with(Category::side_effect, {{"s", 1}}, 1);
  try {
    sparse::idf("absent", catalog, Category::side_effect);
    FAIL("expected UnknownAnnotation");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_annotation);
  }
}

TEST_CASE("classic idf variant matches its oracle") {
  auto catalog = catalog_with(Category::target, {{"t", 4}}, 20);
  const double got =
      sparse::idf("t", catalog, Category::target, sparse::IdfVariant::classic);
  CHECK(oracle::rel_err(got, oracle::idf_classic(20, 4)) < 1e-12);
}

TEST_CASE("idf is strictly decreasing in DF") {
  const size_t n = 50;
  std::map<std::string, int> dfs;
  for (int df = 1; df <= static_cast<int>(n); ++df)
    dfs["a" + std::to_string(df)] = df;
  auto catalog = catalog_with(Category::side_effect, dfs, n);
  double prev = 1e300;
  for (int df = 1; df <= static_cast<int>(n); ++df) {
    const double w =
        sparse::idf("a" + std::to_string(df), catalog, Category::side_effect);
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("build_vector weights every annotation of the category") {
  auto catalog = catalog_with(Category::side_effect, {{"s1", 1}, {"s2", 3}}, 5);
  kg::DrugRecord d;
  d.id = "d";
  d.side_effects = {"s1", "s2"};
  auto vec = sparse::build_vector(d, Category::side_effect, catalog);
  REQUIRE(vec.entries.size() == 2);
  CHECK(vec.entries.at("s1") ==
        doctest::Approx(sparse::idf("s1", catalog, Category::side_effect)));
  CHECK(vec.entries.at("s2") ==
        doctest::Approx(sparse::idf("s2", catalog, Category::side_effect)));

  kg::DrugRecord empty;
  empty.id = "e";
  CHECK(sparse::build_vector(empty, Category::side_effect, catalog).empty());
}

TEST_CASE("cosine of a vector with itself is exactly 1") {
  sparse::SparseWeightedVector v;
  v.entries = {{"a", 0.3}, {"b", 1.7}};
  CHECK(*sparse::cosine(v, v) == 1.0);
}

TEST_CASE("cosine of disjoint supports is 0") {
  sparse::SparseWeightedVector v1, v2;
  v1.entries = {{"a", 1.0}};
  v2.entries = {{"b", 1.0}};
  CHECK(*sparse::cosine(v1, v2) == 0.0);
}

TEST_CASE("cosine worked example 4/5") {
  sparse::SparseWeightedVector v1, v2;
  v1.entries = {{"a", 1.0}, {"b", 2.0}};
  v2.entries = {{"b", 2.0}, {"c", 1.0}};
  const double got = *sparse::cosine(v1, v2);
  CHECK(got == doctest::Approx(0.8));
  CHECK(oracle::rel_err(got, oracle::cosine_dense(v1.entries, v2.entries)) < 1e-12);
}

TEST_CASE("empty vectors yield MISSING, not zero") {
  sparse::SparseWeightedVector v1, empty;
  v1.entries = {{"a", 1.0}};
  CHECK(!sparse::cosine(v1, empty).has_value());
  CHECK(!sparse::cosine(empty, empty).has_value());
}

TEST_CASE("cosine rejects category mismatches") {
  sparse::SparseWeightedVector v1, v2;
  v1.category = Category::side_effect;
  v2.category = Category::target;
  v1.entries = v2.entries = {{"a", 1.0}};
  try {
    sparse::cosine(v1, v2);
    FAIL("expected CategoryMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::category_mismatch);
  }
}

TEST_CASE("cosine properties on random sparse vectors") {
  std::mt19937_64 rng(23);
  auto random_vector = [&](int max_keys) {
    sparse::SparseWeightedVector v;
    const int k = 1 + static_cast<int>(rng() % max_keys);
    for (int i = 0; i < k; ++i)
      v.entries["k" + std::to_string(rng() % 12)] =
          0.01 + static_cast<double>(rng() % 1000) / 250.0;
    return v;
  };
  for (int round = 0; round < 200; ++round) {
    auto v1 = random_vector(6);
    auto v2 = random_vector(6);
    const double c12 = *sparse::cosine(v1, v2);
    const double c21 = *sparse::cosine(v2, v1);
    CHECK(c12 == c21);  // symmetric exactly
    CHECK(c12 >= 0.0);
    CHECK(c12 <= 1.0);
    CHECK(oracle::rel_err(c12 + 1.0,
                          oracle::cosine_dense(v1.entries, v2.entries) + 1.0) < 1e-12);

    const double scale = 0.25 + static_cast<double>(rng() % 100) / 10.0;
    auto scaled = v1;
    for (auto& [k, w] : scaled.entries) w *= scale;
    CHECK(std::abs(*sparse::cosine(scaled, v2) - c12) < 1e-12);
  }
}
