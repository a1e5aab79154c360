#include <doctest.h>

#include <random>

#include "curelite/common/error.hpp"
#include "curelite/eist/lineage.hpp"
#include "support/oracle.hpp"

using namespace curelite;
using namespace curelite::eist;

namespace {

const SourceId kA{1}, kB{2}, kC{3};
const SourceId kT = SourceId::truth();

Lineage L(std::vector<Lineage::Conjunct> c) { return Lineage::from_conjuncts(std::move(c)); }

// Truth-table equivalence over sources 1..n (T always true).
bool equivalent(const Lineage& x, const Lineage& y, std::uint32_t n) {
  for (std::uint32_t world = 0; world < (1u << n); ++world) {
    std::vector<SourceId> correct;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (world & (1u << i)) correct.push_back(SourceId(i + 1));
    }
    if (testing::holds_in_world(x, correct) != testing::holds_in_world(y, correct)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("mk_base_lineage builds one singleton derivation per contributor") {
  const std::vector<SourceId> fred{kB};
  CHECK(mk_base_lineage(fred) == L({{kB}}));

  const std::vector<SourceId> fred_karen{kB, kC};
  CHECK(mk_base_lineage(fred_karen).conjuncts() == std::vector<Lineage::Conjunct>{{kB}, {kC}});

  const std::vector<SourceId> mixed{kT, kB};
  CHECK_THROWS_AS(mk_base_lineage(mixed), Error);
  try {
    mk_base_lineage(mixed);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MixedFactContributors);
  }
  CHECK_THROWS_AS(mk_base_lineage(std::vector<SourceId>{}), Error);
  CHECK(mk_base_lineage(std::vector<SourceId>{kT}).is_fact());
}

TEST_CASE("lineage_and distributes conjuncts and absorbs T") {
  CHECK(lineage_and(L({{kA}}), L({{kB}})) == L({{kA, kB}}));

  const auto product = lineage_and(L({{kA}, {kB}}), L({{kC}}));
  CHECK(product.conjuncts() == std::vector<Lineage::Conjunct>{{kA, kC}, {kB, kC}});
  // (a|b)&c against the expected form over all 8 worlds.
  CHECK(equivalent(product, L({{kA, kC}, {kB, kC}}), 3));

  CHECK(lineage_and(Lineage::fact(), L({{kA}})) == L({{kA}}));
  CHECK(lineage_and(Lineage::fact(), Lineage::fact()).is_fact());
}

TEST_CASE("lineage_or is idempotent and absorbing") {
  CHECK(lineage_or(L({{kA}}), L({{kA}})) == L({{kA}}));
  const auto absorbed = lineage_or(L({{kA}}), L({{kA, kB}}));
  CHECK(absorbed == L({{kA}}));
  CHECK(equivalent(absorbed, L({{kA}, {kA, kB}}), 2));
  CHECK(lineage_or(L({{kB}}), L({{kC}})).conjuncts() == std::vector<Lineage::Conjunct>{{kB}, {kC}});
  CHECK(lineage_or(L({{kA}}), Lineage::fact()).is_fact());
}

TEST_CASE("normal form keeps T alone") {
  CHECK(L({{kT, kA}}) == L({{kA}}));
  CHECK(L({{kT}, {kA, kB}}).is_fact());
  CHECK_THROWS_AS(L({}), Error);
  CHECK_THROWS_AS(L({{}}), Error);
}

TEST_CASE("lineage algebra properties on random small lineages") {
  std::mt19937_64 rng(20261015);
  for (int iter = 0; iter < 300; ++iter) {
    const auto x = testing::random_lineage(rng, 5, 4, 3);
    const auto y = testing::random_lineage(rng, 5, 4, 3);
    const auto z = testing::random_lineage(rng, 5, 4, 3);

    CHECK(minimize(minimize(x.conjuncts())) == minimize(x.conjuncts()));
    CHECK(minimize(x.conjuncts()) == x.conjuncts());

    CHECK(lineage_and(x, y) == lineage_and(y, x));
    CHECK(lineage_or(x, y) == lineage_or(y, x));
    CHECK(lineage_and(lineage_and(x, y), z) == lineage_and(x, lineage_and(y, z)));
    CHECK(lineage_or(lineage_or(x, y), z) == lineage_or(x, lineage_or(y, z)));
    // Distributivity, structurally (both sides in normal form).
    CHECK(lineage_and(x, lineage_or(y, z)) == lineage_or(lineage_and(x, y), lineage_and(x, z)));
    CHECK(equivalent(lineage_and(x, y), lineage_and(y, x), 5));
  }
}
