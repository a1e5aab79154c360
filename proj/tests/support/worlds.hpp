#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "curelite/engine/database.hpp"
#include "curelite/engine/evaluate.hpp"

namespace curelite::testing {

// Random pure-eIST databases and SPJ queries, plus a possible-worlds oracle
// that evaluates the query separately in every source-correctness world.

struct RandomDb {
  std::unique_ptr<engine::Database> db;
  std::vector<std::string> relations;                   // R0, R1, ...
  std::vector<std::vector<std::string>> attributes;     // per relation
  engine::Overrides reliabilities;                      // per source, used as overrides
};

// At most `max_sources` sources, `max_tuples` tuples per relation; all
// attributes are STRING and form the primary key.
RandomDb random_db(std::mt19937_64& rng, std::size_t max_sources = 5, std::size_t max_tuples = 6);

struct QueryColumn {
  std::size_t binding = 0;
  std::string attribute;
};

struct QuerySpec {
  std::vector<std::size_t> bindings;  // relation index per FROM entry
  std::vector<QueryColumn> projection;
  // Explicit column equalities; `lhs.binding` is the later binding.
  std::vector<std::pair<QueryColumn, QueryColumn>> equalities;
  struct Constant {
    QueryColumn column;
    bool negated = false;
    std::string value;
  };
  std::vector<Constant> constants;
};

// Up to three bindings (at most two joins), self-joins allowed.
QuerySpec random_query(std::mt19937_64& rng, const RandomDb& db);

std::string render_query(const QuerySpec& q, const RandomDb& db);

// Row values to the probability that the row is in the answer.
std::map<eist::Row, double> world_oracle(const QuerySpec& q, const RandomDb& db);

}  // namespace curelite::testing
