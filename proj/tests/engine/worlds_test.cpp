#include <doctest.h>

#include <chrono>
#include <cmath>

#include "curelite/engine/script.hpp"
#include "support/worlds.hpp"

using namespace curelite;
using namespace curelite::engine;

TEST_CASE("per-row reliability equals possible-world enumeration") {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::size_t rows = 0;
  for (int i = 0; i < 50; ++i) {
    auto db = testing::random_db(rng);
    auto spec = testing::random_query(rng, db);
    const auto text = testing::render_query(spec, db);
    CAPTURE(text);
    auto snap = db.db->snapshot();
    auto rs = evaluate(plan(compile_select(text, snap->catalog), *snap), snap, eist::ReliabilityMode::Probabilistic,
                       db.reliabilities);
    auto oracle = testing::world_oracle(spec, db);
    REQUIRE(rs.rows.size() == oracle.size());
    for (const auto& row : rs.rows) {
      auto it = oracle.find(row.values);
      REQUIRE(it != oracle.end());
      CHECK(std::abs(row.p_reliability - it->second) < 1e-10);
    }
    rows += rs.rows.size();
  }
  CHECK(rows > 0);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(30));
}

TEST_CASE("raising one override never lowers a row") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    auto db = testing::random_db(rng);
    auto spec = testing::random_query(rng, db);
    auto snap = db.db->snapshot();
    auto p = plan(compile_select(testing::render_query(spec, db), snap->catalog), *snap);
    auto before = evaluate(p, snap, eist::ReliabilityMode::Probabilistic, db.reliabilities);

    auto raised = db.reliabilities;
    auto it = raised.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, raised.size() - 1)(rng));
    it->second = std::uniform_real_distribution<double>(it->second, 1.0)(rng);
    auto after = evaluate(p, snap, eist::ReliabilityMode::Probabilistic, raised);
    REQUIRE(before.rows.size() == after.rows.size());
    for (std::size_t r = 0; r < before.rows.size(); ++r) {
      CHECK(after.rows[r].p_reliability >= before.rows[r].p_reliability - 1e-15);
      CHECK(after.rows[r].f_reliability >= before.rows[r].f_reliability);
    }
  }
}
