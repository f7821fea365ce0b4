#include <doctest.h>

#include <algorithm>
#include <random>

#include "medsim/error.hpp"
#include "medsim/kg_store.hpp"

using namespace medsim;
using kg::Category;
using kg::DrugRecord;
using kg::Store;
using kg::TaxonomyGraph;

namespace {

DrugRecord drug(std::string id, std::string name) {
  DrugRecord d;
  d.id = std::move(id);
  d.name = std::move(name);
  return d;
}

TaxonomyGraph two_level_taxonomy() {
  TaxonomyGraph g;
  g.add_edge("root", "classA");
  g.add_edge("classA", "leaf1");
  g.add_edge("classA", "leaf2");
  return g;
}

}  // namespace

TEST_CASE("two drugs sharing a side effect give DF 2") {
  auto a = drug("d1", "Alpha");
  a.side_effects = {"s", "only_a"};
  auto b = drug("d2", "Beta");
  b.side_effects = {"s"};
  Store store = Store::build({a, b}, {});
  CHECK(store.catalog().df(Category::side_effect, "s") == 2);
  CHECK(store.catalog().df(Category::side_effect, "only_a") == 1);
  CHECK(store.catalog().drug_count == 2);
}

TEST_CASE("annotation ids are lowercased and trimmed before storage") {
  auto a = drug("d1", "Alpha");
  a.targets = {"  TG_01 ", "tg_01"};
  Store store = Store::build({a}, {});
  CHECK(store.drugs()[0].targets == std::set<std::string>{"tg_01"});
  CHECK(store.catalog().df(Category::target, "tg_01") == 1);
}

TEST_CASE("duplicate drug ids are rejected") {
  CHECK_THROWS_WITH_AS(Store::build({drug("d1", "A"), drug("d1", "B")}, {}),
                       doctest::Contains("duplicate drug id"), Error);
}

TEST_CASE("dangling taxonomy attachment is rejected") {
  auto a = drug("d1", "Alpha");
  a.taxonomy_node = "nowhere";
  try {
    Store::build({a}, two_level_taxonomy());
    FAIL("expected DanglingTaxonomyRef");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dangling_taxonomy_ref);
  }
}

TEST_CASE("cyclic taxonomy is rejected") {
  TaxonomyGraph g;
  g.add_edge("A", "B");
  g.add_edge("B", "A");
  try {
    Store::build({drug("d1", "Alpha")}, g);
    FAIL("expected CyclicTaxonomy");
  } catch (const Error& e) {
    CHECK(e.code() == errc::cyclic_taxonomy);
  }
}

TEST_CASE("drugs without taxonomy attachment are retained") {
  Store store = Store::build({drug("d1", "Alpha")}, two_level_taxonomy());
  CHECK(store.drugs().size() == 1);
  CHECK(!store.drugs()[0].taxonomy_node);
}

TEST_CASE("resolve prefers exact id, falls back to unique name") {
  auto a = drug("DB01059", "Nitrofurantoin");
  a.taxonomy_node = "leaf1";
  auto b = drug("DB00001", "Other");
  Store store = Store::build({a, b}, two_level_taxonomy());

  CHECK(store.resolve("DB01059").id == "DB01059");
  CHECK(store.resolve("nitrofurantoin").id == "DB01059");
  CHECK(store.resolve("NITROFURANTOIN").id == "DB01059");

  try {
    store.resolve("missing");
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_found);
  }
}

TEST_CASE("resolve reports ambiguous names") {
  Store store = Store::build({drug("d1", "Cefalexin"), drug("d2", "CEFALEXIN")}, {});
  try {
    store.resolve("cefalexin");
    FAIL("expected AmbiguousName");
  } catch (const Error& e) {
    CHECK(e.code() == errc::ambiguous_name);
  }
}

TEST_CASE("resolve by id returns every stored record") {
  std::vector<DrugRecord> drugs;
  for (int i = 0; i < 20; ++i) drugs.push_back(drug("id" + std::to_string(i), "name" + std::to_string(i)));
  Store store = Store::build(drugs, {});
  for (const auto& d : store.drugs()) CHECK(store.resolve(d.id).id == d.id);
}

TEST_CASE("DF matches a brute-force recount and is input-order invariant") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 30; ++round) {
    std::vector<DrugRecord> drugs;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      auto d = drug("d" + std::to_string(i), "n" + std::to_string(i));
      const int k = static_cast<int>(rng() % 5);
      for (int j = 0; j < k; ++j)
        d.side_effects.insert("s" + std::to_string(rng() % 6));
      drugs.push_back(d);
    }
    Store store = Store::build(drugs, {});

    for (const auto& [annotation, info] : store.catalog().category(Category::side_effect)) {
      int count = 0;
      for (const auto& d : drugs)
        if (d.side_effects.count(annotation)) ++count;
      CHECK(info.df == count);
    }

    std::vector<DrugRecord> shuffled = drugs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    Store store2 = Store::build(shuffled, {});
    for (Category c : kg::kAllCategories) {
      const auto& m1 = store.catalog().category(c);
      const auto& m2 = store2.catalog().category(c);
      REQUIRE(m1.size() == m2.size());
      auto it2 = m2.begin();
      for (const auto& [id, info] : m1) {
        CHECK(id == it2->first);
        CHECK(info.df == it2->second.df);
        ++it2;
      }
    }
  }
}

TEST_CASE("every node of a validated taxonomy hangs off a root") {
  TaxonomyGraph g = two_level_taxonomy();
  g.add_node("isolated");  // trivially a root
  CHECK_NOTHROW(g.validate());
}
