#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabgen/error.hpp"
#include "tabgen/table.hpp"

namespace tabgen {

struct StructuralFlags {
  bool composite_header = false;
  bool nested = false;
  bool inverted = false;

  bool any() const noexcept { return composite_header || nested || inverted; }
};

struct CandidateTable {
  std::string id;
  RelationalTable table;
  StructuralFlags flags;
  std::string source_page;
  Split split = Split::eval;
  // Derived from `table` by make_candidate; one entry per column.
  std::vector<double> column_fill_rates;
  std::vector<double> column_median_token_len;
};

// Fills in the per-column profile from the table contents.
CandidateTable make_candidate(std::string id, RelationalTable table, StructuralFlags flags,
                              std::string source_page, Split split = Split::eval);

enum class RejectionCode { non_relational, too_small, other };

std::string_view to_string(RejectionCode code);

struct RejectionReason {
  RejectionCode code = RejectionCode::other;
  std::string detail;
};

inline constexpr std::size_t kMinRows = 10;
inline constexpr std::size_t kMinColumns = 2;

// nullopt means accepted. Structural flags are checked before size.
std::optional<RejectionReason> filter_candidate(const CandidateTable& candidate);

struct PruneOptions {
  // Columns whose fill rate is below this are dropped (1.0: any null).
  double fill_threshold = 1.0;
  // Columns whose median cell token count exceeds this are dropped.
  double max_median_tokens = 10.0;

  void validate() const;
};

struct PruneResult {
  std::optional<RelationalTable> table;
  std::optional<RejectionReason> rejection;
  std::vector<std::string> dropped_columns;
};

// Key columns are never dropped; a key column below the fill threshold
// rejects the whole table.
PruneResult prune_columns(const CandidateTable& candidate, const PruneOptions& options = {});

// Inclusive range of calendar months, "YYYY-MM".
struct MonthWindow {
  std::string first;
  std::string last;

  std::vector<std::string> months() const;
};

class PageNotFound : public Error {
 public:
  using Error::Error;
};

class PageviewsClient {
 public:
  virtual ~PageviewsClient() = default;
  // Views per month of the window; nullopt for months without data.
  // Throws PageNotFound for unknown pages.
  virtual std::map<std::string, std::optional<double>> monthly_views(const std::string& page,
                                                                     const MonthWindow& window) = 0;
};

// JSON file: {"<page title>": {"YYYY-MM": views|null, ...}, ...}.
class FixturePageviewsClient final : public PageviewsClient {
 public:
  explicit FixturePageviewsClient(nlohmann::json data);
  static FixturePageviewsClient load(const std::filesystem::path& path);

  std::map<std::string, std::optional<double>> monthly_views(const std::string& page,
                                                             const MonthWindow& window) override;

 private:
  nlohmann::json data_;
};

class RateLimiter;

// Wikimedia REST per-article monthly pageviews.
class WikimediaPageviewsClient final : public PageviewsClient {
 public:
  explicit WikimediaPageviewsClient(std::string base_url = "https://wikimedia.org/api/rest_v1",
                                    std::string project = "en.wikipedia", double requests_per_minute = 100);
  ~WikimediaPageviewsClient() override;

  std::map<std::string, std::optional<double>> monthly_views(const std::string& page,
                                                             const MonthWindow& window) override;

  // Path component for a request, exposed for tests.
  std::string request_path(const std::string& page, const MonthWindow& window) const;

 private:
  std::string base_url_;
  std::string project_;
  std::unique_ptr<RateLimiter> limiter_;
};

// Mean over the months that have data.
double popularity(const std::string& source_page, PageviewsClient& client, const MonthWindow& window);

// Throws Error on an empty description, ValidationError on invariant failures.
BenchmarkInstance package_instance(const RelationalTable& table, const std::string& description, double popularity,
                                   const std::string& id, Split split, std::optional<std::string> source_page = {});

// CSV with header "id,description"; RFC 4180 quoting.
std::map<std::string, std::string> read_descriptions_csv(const std::filesystem::path& path);
std::map<std::string, std::string> parse_descriptions_csv(std::string_view text);

// {"candidates": [{"id", "source_page", "split", "flags": {...}, "columns", "rows"}]}
std::vector<CandidateTable> candidates_from_json(const nlohmann::json& j);
std::vector<CandidateTable> load_candidates(const std::filesystem::path& path);

struct CurationOptions {
  PruneOptions prune;
  MonthWindow window{"2023-01", "2023-12"};
};

struct CurationRejection {
  std::string id;
  RejectionReason reason;
};

struct CurationResult {
  Benchmark benchmark;
  std::vector<CurationRejection> rejections;
  std::map<std::string, std::vector<std::string>> dropped_columns;
};

CurationResult curate(const std::vector<CandidateTable>& candidates,
                      const std::map<std::string, std::string>& descriptions, PageviewsClient& pageviews,
                      const CurationOptions& options = {});

// Rejections, dropped columns, thresholds and pageview window.
nlohmann::json curation_log_json(const CurationResult& result, const CurationOptions& options);

}  // namespace tabgen
