#include "sitecheck/model.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

namespace sitecheck {

std::string SourceLocation::str() const {
  std::string out = file;
  if (line > 0) {
    out += ":" + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
  }
  return out;
}

const char* to_string(SourceKind k) {
  switch (k) {
  case SourceKind::html_attr: return "html_attr";
  case SourceKind::json_string: return "json_string";
  case SourceKind::cli_seed: return "cli_seed";
  }
  return "?";
}

CheckStatus CheckStatus::ok(int status) {
  CheckStatus s;
  s.kind = Kind::ok;
  s.http_status = status;
  return s;
}

CheckStatus CheckStatus::redirected(std::vector<NormalizedUrl> chain, int final_status) {
  CheckStatus s;
  s.kind = Kind::redirected;
  s.redirect_chain = std::move(chain);
  s.http_status = final_status;
  return s;
}

CheckStatus CheckStatus::broken_http(int status) {
  CheckStatus s;
  s.kind = Kind::broken;
  s.broken_reason = BrokenReason::http_status;
  s.http_status = status;
  return s;
}

CheckStatus CheckStatus::broken(BrokenReason reason) {
  CheckStatus s;
  s.kind = Kind::broken;
  s.broken_reason = reason;
  return s;
}

CheckStatus CheckStatus::skipped(SkipReason reason) {
  CheckStatus s;
  s.kind = Kind::skipped;
  s.skip_reason = reason;
  return s;
}

std::string CheckStatus::describe() const {
  switch (kind) {
  case Kind::ok:
    return "ok (HTTP " + std::to_string(http_status) + ")";
  case Kind::redirected:
    return "redirected " + std::to_string(redirect_chain.size()) + "x (HTTP " +
           std::to_string(http_status) + ")";
  case Kind::broken:
    switch (broken_reason) {
    case BrokenReason::http_status: return "broken (HTTP " + std::to_string(http_status) + ")";
    case BrokenReason::connection_failed: return "broken (connection failed)";
    case BrokenReason::timeout: return "broken (timeout)";
    case BrokenReason::too_many_redirects: return "broken (too many redirects)";
    case BrokenReason::invalid_url: return "broken (invalid URL)";
    }
    return "broken";
  case Kind::skipped:
    switch (skip_reason) {
    case SkipReason::external_not_checked: return "skipped (external not checked)";
    case SkipReason::scheme_unsupported: return "skipped (scheme unsupported)";
    case SkipReason::excluded_by_pattern: return "skipped (excluded by pattern)";
    }
    return "skipped";
  }
  return "?";
}

const char* to_string(CheckKind k) {
  switch (k) {
  case CheckKind::link: return "link";
  case CheckKind::html: return "html";
  case CheckKind::xml: return "xml";
  case CheckKind::reach: return "reach";
  }
  return "?";
}

const char* to_string(Severity s) {
  return s == Severity::error ? "error" : "warning";
}

int Report::errors() const {
  return static_cast<int>(
      std::count_if(findings.begin(), findings.end(),
                    [](const Finding& f) { return f.severity == Severity::error; }));
}

int Report::warnings() const {
  return static_cast<int>(
      std::count_if(findings.begin(), findings.end(),
                    [](const Finding& f) { return f.severity == Severity::warning; }));
}

void Report::finalize() {
  auto key = [](const Finding& f) {
    return std::tie(f.location.file, f.location.line, f.machine_code, f.location.column,
                    f.message);
  };
  std::stable_sort(findings.begin(), findings.end(),
                   [&](const Finding& a, const Finding& b) { return key(a) < key(b); });
  for (auto& f : findings) {
    std::sort(f.origins.begin(), f.origins.end());
  }
  std::sort(urls.begin(), urls.end(),
            [](const UrlOutcome& a, const UrlOutcome& b) { return a.url < b.url; });
}

void promote_warnings(Report& report) {
  for (auto& f : report.findings) {
    f.severity = Severity::error;
  }
}

std::string current_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace sitecheck
