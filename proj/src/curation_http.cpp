#include <httplib.h>

#include <regex>

#include <fmt/format.h>

#include "tabgen/curation.hpp"
#include "tabgen/gateway.hpp"

namespace tabgen {

using nlohmann::json;

namespace {

std::string percent_encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '(' || c == ')' || c == ',') {
      out += static_cast<char>(c);
    } else if (c == ' ') {
      out += '_';
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

std::string compact_month(const std::string& yyyy_mm) { return yyyy_mm.substr(0, 4) + yyyy_mm.substr(5, 2); }

}  // namespace

WikimediaPageviewsClient::WikimediaPageviewsClient(std::string base_url, std::string project,
                                                   double requests_per_minute)
    : base_url_(std::move(base_url)), project_(std::move(project)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (requests_per_minute > 0) limiter_ = std::make_unique<RateLimiter>(requests_per_minute);
}

WikimediaPageviewsClient::~WikimediaPageviewsClient() = default;

std::string WikimediaPageviewsClient::request_path(const std::string& page, const MonthWindow& window) const {
  window.months();
  return fmt::format("/metrics/pageviews/per-article/{}/all-access/all-agents/{}/monthly/{}0100/{}0100", project_,
                     percent_encode(page), compact_month(window.first), compact_month(window.last));
}

std::map<std::string, std::optional<double>> WikimediaPageviewsClient::monthly_views(const std::string& page,
                                                                                      const MonthWindow& window) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url_, m, re)) throw ConfigError("invalid pageviews base URL '" + base_url_ + "'");
  const std::string path = (m[2].matched ? m[2].str() : std::string{}) + request_path(page, window);

  if (limiter_) limiter_->acquire();
  httplib::Client http(m[1].str());
  http.set_read_timeout(30, 0);
  const httplib::Headers headers{{"User-Agent", "tabgen-curation/1.0"}};
  auto res = http.Get(path, headers);
  if (!res) throw IoError("pageviews request failed: " + httplib::to_string(res.error()));
  if (res->status == 404) throw PageNotFound("page '" + page + "' not found");
  if (res->status < 200 || res->status >= 300) {
    throw IoError(fmt::format("pageviews request for '{}' returned HTTP {}", page, res->status));
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.contains("items")) throw IoError("malformed pageviews response for '" + page + "'");

  std::map<std::string, std::optional<double>> out;
  for (const auto& month : window.months()) out[month] = std::nullopt;
  for (const auto& item : body["items"]) {
    const auto ts = item.value("timestamp", std::string{});
    if (ts.size() < 6 || !item.contains("views")) continue;
    const std::string month = ts.substr(0, 4) + "-" + ts.substr(4, 2);
    if (auto it = out.find(month); it != out.end()) it->second = item["views"].get<double>();
  }
  return out;
}

}  // namespace tabgen
