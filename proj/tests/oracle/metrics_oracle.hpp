#pragma once

// Reference scorer for randomized metric tests. Cells are drawn from pools
// whose equivalence classes are fixed by construction, so the reference
// never calls into the matching code: two cells agree iff they share a class.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tabgen/table.hpp"

namespace oracle {

struct PoolCell {
  int cls = 0;
  int variant = 0;
};

struct PoolTable {
  std::vector<bool> is_key;
  std::vector<std::vector<PoolCell>> rows;
};

struct Reference {
  std::size_t phi = 0, psi = 0, tau = 0;
  std::size_t generated_rows = 0, gold_rows = 0;
  std::size_t generated_non_key_cells = 0, gold_non_key_cells = 0;
  std::size_t generated_cells = 0, gold_cells = 0;
  double keys_p = 0, keys_r = 0, keys_f1 = 0;
  double non_keys_p = 0, non_keys_r = 0, non_keys_f1 = 0;
  double overall_p = 0, overall_r = 0, overall_f1 = 0;
};

// Key pool class 0 is the null class (never aligns); value pool class 0 is
// the nullish class (matches only itself).
const std::vector<std::vector<tabgen::CellValue>>& key_pool();
const std::vector<std::vector<tabgen::CellValue>>& value_pool();

tabgen::RelationalTable to_relational(const PoolTable& t);

// At most 6 rows, 4 columns and 2 key columns per table; gold key tuples are
// unique and never null.
std::pair<PoolTable, PoolTable> random_pair(std::mt19937_64& rng);

Reference brute_force(const PoolTable& pred, const PoolTable& gold);

}  // namespace oracle
