#include "oracle/metrics_oracle.hpp"

#include <algorithm>
#include <set>

namespace oracle {

using tabgen::CellValue;

const std::vector<std::vector<CellValue>>& key_pool() {
  static const std::vector<std::vector<CellValue>> pool{
      {std::nullopt, "N/A", "none"},
      {"Rome", "rome", "ROME!"},
      {"Los Angeles!", "los angeles", "LOS ANGELES"},
      {"1987"},
      {"k-1", "K1", "k1"},
      {"European Junior", "european junior", "EUROPEAN-JUNIOR"},
      {"World Championships", "world championships"},
  };
  return pool;
}

const std::vector<std::vector<CellValue>>& value_pool() {
  static const std::vector<std::vector<CellValue>> pool{
      {std::nullopt, "N/A", "", "none", "nan"},
      {"Rome", "rome", "ROME!"},
      {"1000", "1,000", "1000.0"},
      {"2014-05-16", "16th, May, 2014", "May 16, 2014"},
      {"100", "100.05"},
      {"100.2"},
      {"3rd"},
      {"Birmingham", "birmingham "},
      {"0", "0.0"},
      {"12.5%", "0.125"},
  };
  return pool;
}

tabgen::RelationalTable to_relational(const PoolTable& t) {
  std::vector<tabgen::ColumnSpec> cols;
  for (std::size_t c = 0; c < t.is_key.size(); ++c) cols.push_back({"c" + std::to_string(c), t.is_key[c], false});
  std::vector<tabgen::Row> rows;
  for (const auto& r : t.rows) {
    tabgen::Row row;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const auto& pool = t.is_key[c] ? key_pool() : value_pool();
      row.push_back(pool[r[c].cls][r[c].variant]);
    }
    rows.push_back(std::move(row));
  }
  return tabgen::RelationalTable(std::move(cols), std::move(rows));
}

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

PoolCell draw(std::mt19937_64& rng, bool key, int cls) {
  const auto& pool = key ? key_pool() : value_pool();
  return {cls, pick(rng, 0, static_cast<int>(pool[cls].size()) - 1)};
}

std::vector<int> key_classes(const PoolTable& t, const std::vector<PoolCell>& row) {
  std::vector<int> k;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (t.is_key[c]) k.push_back(row[c].cls);
  }
  return k;
}

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::pair<PoolTable, PoolTable> random_pair(std::mt19937_64& rng) {
  const int ncols = pick(rng, 1, 4);
  const int nkeys = pick(rng, 1, std::min(2, ncols));
  std::vector<bool> is_key(ncols, false);
  std::vector<int> order(ncols);
  for (int i = 0; i < ncols; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < nkeys; ++i) is_key[order[i]] = true;

  const int key_classes_n = static_cast<int>(key_pool().size());
  const int value_classes_n = static_cast<int>(value_pool().size());

  PoolTable gold{is_key, {}};
  std::set<std::vector<int>> used;
  const int gold_rows = pick(rng, 0, 6);
  for (int attempt = 0; static_cast<int>(gold.rows.size()) < gold_rows && attempt < 50; ++attempt) {
    std::vector<PoolCell> row;
    for (int c = 0; c < ncols; ++c) {
      row.push_back(is_key[c] ? draw(rng, true, pick(rng, 1, key_classes_n - 1))
                              : draw(rng, false, pick(rng, 0, value_classes_n - 1)));
    }
    if (used.insert(key_classes(gold, row)).second) gold.rows.push_back(std::move(row));
  }

  PoolTable pred{is_key, {}};
  const int pred_rows = pick(rng, 0, 6);
  for (int i = 0; i < pred_rows; ++i) {
    std::vector<PoolCell> row;
    const int mode = pick(rng, 0, 9);
    const std::vector<PoolCell>* source = nullptr;
    if (mode < 6 && !gold.rows.empty()) {
      source = &gold.rows[pick(rng, 0, static_cast<int>(gold.rows.size()) - 1)];
    } else if (mode == 6 && !pred.rows.empty()) {
      source = &pred.rows[pick(rng, 0, static_cast<int>(pred.rows.size()) - 1)];
    }
    for (int c = 0; c < ncols; ++c) {
      if (is_key[c]) {
        int cls = source ? (*source)[c].cls : pick(rng, 1, key_classes_n - 1);
        if (mode == 9) cls = 0;
        row.push_back(draw(rng, true, cls));
      } else {
        const bool keep = source && pick(rng, 0, 1) == 0;
        row.push_back(draw(rng, false, keep ? (*source)[c].cls : pick(rng, 0, value_classes_n - 1)));
      }
    }
    pred.rows.push_back(std::move(row));
  }
  return {std::move(pred), std::move(gold)};
}

Reference brute_force(const PoolTable& pred, const PoolTable& gold) {
  Reference ref;
  const std::size_t ncols = gold.is_key.size();
  std::size_t nkeys = 0;
  for (bool k : gold.is_key) nkeys += k ? 1 : 0;
  const std::size_t nnon = ncols - nkeys;

  std::vector<bool> gold_taken(gold.rows.size(), false);
  for (std::size_t p = 0; p < pred.rows.size(); ++p) {
    const auto pk = key_classes(pred, pred.rows[p]);
    if (std::find(pk.begin(), pk.end(), 0) != pk.end()) continue;
    // Only the first generated row carrying a key may align.
    bool earlier = false;
    for (std::size_t q = 0; q < p; ++q) earlier = earlier || key_classes(pred, pred.rows[q]) == pk;
    if (earlier) continue;
    for (std::size_t g = 0; g < gold.rows.size(); ++g) {
      if (gold_taken[g] || key_classes(gold, gold.rows[g]) != pk) continue;
      gold_taken[g] = true;
      ++ref.phi;
      for (std::size_t c = 0; c < ncols; ++c) {
        const bool same = pred.rows[p][c].cls == gold.rows[g][c].cls;
        if (gold.is_key[c]) {
          ref.tau += 1;
        } else if (same) {
          ref.psi += 1;
          ref.tau += 1;
        }
      }
      break;
    }
  }
  ref.generated_rows = pred.rows.size();
  ref.gold_rows = gold.rows.size();
  ref.generated_non_key_cells = pred.rows.size() * nnon;
  ref.gold_non_key_cells = gold.rows.size() * nnon;
  ref.generated_cells = pred.rows.size() * ncols;
  ref.gold_cells = gold.rows.size() * ncols;
  ref.keys_p = ratio(ref.phi, ref.generated_rows);
  ref.keys_r = ratio(ref.phi, ref.gold_rows);
  ref.keys_f1 = f1(ref.keys_p, ref.keys_r);
  ref.non_keys_p = ratio(ref.psi, ref.generated_non_key_cells);
  ref.non_keys_r = ratio(ref.psi, ref.gold_non_key_cells);
  ref.non_keys_f1 = f1(ref.non_keys_p, ref.non_keys_r);
  ref.overall_p = ratio(ref.tau, ref.generated_cells);
  ref.overall_r = ratio(ref.tau, ref.gold_cells);
  ref.overall_f1 = f1(ref.overall_p, ref.overall_r);
  return ref;
}

}  // namespace oracle
