#include "tabgen/curation.hpp"

#include <algorithm>
#include <cstdio>

#include <fmt/format.h>

#include "tabgen/tokens.hpp"
#include "tabgen/util.hpp"

namespace tabgen {

using nlohmann::json;

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

bool parse_month(const std::string& s, int& year, int& month) {
  if (s.size() != 7 || s[4] != '-') return false;
  if (std::sscanf(s.c_str(), "%4d-%2d", &year, &month) != 2) return false;
  return month >= 1 && month <= 12;
}

}  // namespace

CandidateTable make_candidate(std::string id, RelationalTable table, StructuralFlags flags,
                              std::string source_page, Split split) {
  CandidateTable c{std::move(id), std::move(table), flags, std::move(source_page), split, {}, {}};
  const std::size_t n = c.table.num_rows();
  for (std::size_t j = 0; j < c.table.num_cols(); ++j) {
    std::size_t filled = 0;
    std::vector<double> lengths;
    for (const auto& row : c.table.rows()) {
      if (is_null_key_cell(row[j])) continue;
      ++filled;
      lengths.push_back(static_cast<double>(count_tokens(*row[j])));
    }
    c.column_fill_rates.push_back(n == 0 ? 0.0 : static_cast<double>(filled) / static_cast<double>(n));
    c.column_median_token_len.push_back(median(std::move(lengths)));
  }
  return c;
}

std::string_view to_string(RejectionCode code) {
  switch (code) {
    case RejectionCode::non_relational: return "non_relational";
    case RejectionCode::too_small: return "too_small";
    case RejectionCode::other: return "other";
  }
  return "other";
}

std::optional<RejectionReason> filter_candidate(const CandidateTable& candidate) {
  const auto& f = candidate.flags;
  if (f.any()) {
    std::vector<std::string> which;
    if (f.composite_header) which.emplace_back("composite header");
    if (f.nested) which.emplace_back("nested table");
    if (f.inverted) which.emplace_back("inverted table");
    return RejectionReason{RejectionCode::non_relational, fmt::format("{}", fmt::join(which, ", "))};
  }
  const auto rows = candidate.table.num_rows();
  const auto cols = candidate.table.num_cols();
  if (rows < kMinRows || cols < kMinColumns) {
    return RejectionReason{RejectionCode::too_small,
                           fmt::format("{} rows x {} columns (need at least {} x {})", rows, cols, kMinRows,
                                       kMinColumns)};
  }
  return std::nullopt;
}

void PruneOptions::validate() const {
  if (!(fill_threshold > 0.0) || fill_threshold > 1.0) throw ConfigError("fill threshold must be in (0, 1]");
  if (!(max_median_tokens > 0.0)) throw ConfigError("max median tokens must be positive");
}

PruneResult prune_columns(const CandidateTable& candidate, const PruneOptions& options) {
  options.validate();
  PruneResult result;
  const auto& cols = candidate.table.columns();
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const bool sparse = candidate.column_fill_rates.at(j) < options.fill_threshold;
    const bool wordy = candidate.column_median_token_len.at(j) > options.max_median_tokens;
    if (cols[j].is_key) {
      if (sparse) {
        result.rejection = RejectionReason{
            RejectionCode::other,
            fmt::format("key column '{}' has missing entries (fill rate {:.3f})", cols[j].name,
                        candidate.column_fill_rates[j])};
        return result;
      }
      keep.push_back(j);
    } else if (sparse || wordy) {
      result.dropped_columns.push_back(cols[j].name);
    } else {
      keep.push_back(j);
    }
  }
  if (keep.size() < kMinColumns) {
    result.rejection = RejectionReason{RejectionCode::too_small,
                                       fmt::format("{} columns left after pruning", keep.size())};
    return result;
  }
  std::vector<ColumnSpec> kept_cols;
  for (auto j : keep) kept_cols.push_back(cols[j]);
  std::vector<Row> rows;
  rows.reserve(candidate.table.num_rows());
  for (const auto& row : candidate.table.rows()) {
    Row r;
    for (auto j : keep) r.push_back(row[j]);
    rows.push_back(std::move(r));
  }
  result.table = RelationalTable(std::move(kept_cols), std::move(rows));
  return result;
}

std::vector<std::string> MonthWindow::months() const {
  int y0 = 0, m0 = 0, y1 = 0, m1 = 0;
  if (!parse_month(first, y0, m0) || !parse_month(last, y1, m1)) {
    throw ConfigError("month window must be YYYY-MM..YYYY-MM, got '" + first + "'..'" + last + "'");
  }
  if (y1 * 12 + m1 < y0 * 12 + m0) throw ConfigError("month window ends before it starts");
  std::vector<std::string> out;
  for (int i = y0 * 12 + (m0 - 1); i <= y1 * 12 + (m1 - 1); ++i) {
    out.push_back(fmt::format("{:04d}-{:02d}", i / 12, i % 12 + 1));
  }
  return out;
}

FixturePageviewsClient::FixturePageviewsClient(json data) : data_(std::move(data)) {
  if (!data_.is_object()) throw ValidationError("", "pageviews fixture must be a JSON object");
}

FixturePageviewsClient FixturePageviewsClient::load(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ValidationError("", path.string() + ": not valid JSON");
  return FixturePageviewsClient(std::move(j));
}

std::map<std::string, std::optional<double>> FixturePageviewsClient::monthly_views(const std::string& page,
                                                                                    const MonthWindow& window) {
  auto it = data_.find(page);
  if (it == data_.end()) throw PageNotFound("page '" + page + "' not found in pageviews fixture");
  std::map<std::string, std::optional<double>> out;
  for (const auto& m : window.months()) {
    auto mt = it->find(m);
    out[m] = (mt == it->end() || !mt->is_number()) ? std::nullopt : std::optional<double>(mt->get<double>());
  }
  return out;
}

double popularity(const std::string& source_page, PageviewsClient& client, const MonthWindow& window) {
  const auto views = client.monthly_views(source_page, window);
  double sum = 0.0;
  std::size_t months = 0;
  for (const auto& [month, v] : views) {
    if (!v) continue;
    sum += *v;
    ++months;
  }
  if (months == 0) {
    throw Error("no pageview data for '" + source_page + "' between " + window.first + " and " + window.last);
  }
  return sum / static_cast<double>(months);
}

BenchmarkInstance package_instance(const RelationalTable& table, const std::string& description, double popularity,
                                   const std::string& id, Split split, std::optional<std::string> source_page) {
  if (description.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError(id, "missing description");
  }
  BenchmarkInstance inst{id, description, table, popularity, std::move(source_page), split};
  validate_instance(inst);
  if (table.num_rows() < kMinRows || table.num_cols() < kMinColumns) {
    throw ValidationError(id, "table below the minimum size");
  }
  return inst;
}

std::map<std::string, std::string> parse_descriptions_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ValidationError("", "descriptions CSV: unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty() || records[0].size() < 2 || records[0][0] != "id" || records[0][1] != "description") {
    throw ValidationError("", "descriptions CSV must start with header 'id,description'");
  }
  std::map<std::string, std::string> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != 2) {
      throw ValidationError("", fmt::format("descriptions CSV line {}: expected 2 fields", r + 1));
    }
    if (!out.emplace(records[r][0], records[r][1]).second) {
      throw ValidationError(records[r][0], "duplicate description");
    }
  }
  return out;
}

std::map<std::string, std::string> read_descriptions_csv(const std::filesystem::path& path) {
  return parse_descriptions_csv(read_text_file(path));
}

std::vector<CandidateTable> candidates_from_json(const json& j) {
  std::vector<CandidateTable> out;
  try {
    for (const auto& c : j.at("candidates")) {
      StructuralFlags flags;
      if (auto f = c.find("flags"); f != c.end()) {
        flags.composite_header = f->value("composite_header", false);
        flags.nested = f->value("nested", false);
        flags.inverted = f->value("inverted", false);
      }
      const auto id = c.at("id").get<std::string>();
      RelationalTable table;
      try {
        table = table_from_json(c.at("columns"), c.at("rows"));
      } catch (const Error& e) {
        throw ValidationError(id, e.what());
      }
      out.push_back(make_candidate(id, std::move(table), flags, c.value("source_page", std::string{}),
                                   parse_split(c.value("split", std::string("eval")))));
    }
  } catch (const json::exception& e) {
    throw ValidationError("", std::string("malformed candidates file: ") + e.what());
  }
  return out;
}

std::vector<CandidateTable> load_candidates(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ValidationError("", path.string() + ": not valid JSON");
  return candidates_from_json(j);
}

CurationResult curate(const std::vector<CandidateTable>& candidates,
                      const std::map<std::string, std::string>& descriptions, PageviewsClient& pageviews,
                      const CurationOptions& options) {
  options.prune.validate();
  options.window.months();
  CurationResult result;
  auto reject = [&](const std::string& id, RejectionReason r) { result.rejections.push_back({id, std::move(r)}); };

  for (const auto& candidate : candidates) {
    if (candidate.flags.any()) {
      reject(candidate.id, *filter_candidate(candidate));
      continue;
    }
    auto pruned = prune_columns(candidate, options.prune);
    if (pruned.rejection) {
      reject(candidate.id, *pruned.rejection);
      continue;
    }
    if (!pruned.dropped_columns.empty()) result.dropped_columns[candidate.id] = pruned.dropped_columns;
    const auto after = make_candidate(candidate.id, *pruned.table, candidate.flags, candidate.source_page,
                                      candidate.split);
    if (auto r = filter_candidate(after)) {
      reject(candidate.id, *r);
      continue;
    }
    auto desc = descriptions.find(candidate.id);
    if (desc == descriptions.end()) {
      reject(candidate.id, {RejectionCode::other, "no description supplied"});
      continue;
    }
    try {
      const double pop = popularity(candidate.source_page, pageviews, options.window);
      result.benchmark.instances.push_back(package_instance(after.table, desc->second, pop, candidate.id,
                                                            candidate.split, candidate.source_page));
    } catch (const Error& e) {
      reject(candidate.id, {RejectionCode::other, e.what()});
    }
  }
  return result;
}

json curation_log_json(const CurationResult& result, const CurationOptions& options) {
  json rejections = json::array();
  for (const auto& r : result.rejections) {
    rejections.push_back(
        {{"id", r.id}, {"code", std::string(to_string(r.reason.code))}, {"detail", r.reason.detail}});
  }
  json dropped = json::object();
  for (const auto& [id, cols] : result.dropped_columns) dropped[id] = cols;
  json accepted = json::array();
  for (const auto& inst : result.benchmark.instances) accepted.push_back(inst.id);
  return json{{"accepted", accepted},
              {"rejections", rejections},
              {"dropped_columns", dropped},
              {"fill_threshold", options.prune.fill_threshold},
              {"max_median_tokens", options.prune.max_median_tokens},
              {"pageview_window", {{"first", options.window.first}, {"last", options.window.last}}}};
}

}  // namespace tabgen
