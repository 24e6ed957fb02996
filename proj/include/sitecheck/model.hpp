// Shared record and report model used by every checker.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sitecheck/url.hpp"

namespace sitecheck {

// Machine codes are the stable vocabulary of findings; exit codes and CI
// annotations key on these, never on message text.
namespace code {
inline constexpr const char* kLinkBroken = "LINK_BROKEN";
inline constexpr const char* kLinkSeedUnreachable = "LINK_SEED_UNREACHABLE";
inline constexpr const char* kHtmlNoDoctype = "HTML_NO_DOCTYPE";
inline constexpr const char* kHtmlUnclosedTag = "HTML_UNCLOSED_TAG";
inline constexpr const char* kHtmlStrayEndTag = "HTML_STRAY_END_TAG";
inline constexpr const char* kHtmlVoidEndTag = "HTML_VOID_END_TAG";
inline constexpr const char* kHtmlDuplicateId = "HTML_DUPLICATE_ID";
inline constexpr const char* kHtmlUnknownElement = "HTML_UNKNOWN_ELEMENT";
inline constexpr const char* kHtmlUnquotedSpecialAttr = "HTML_UNQUOTED_SPECIAL_ATTR";
inline constexpr const char* kHtmlBadUtf8 = "HTML_BAD_UTF8";
inline constexpr const char* kHtmlMalformedTag = "HTML_MALFORMED_TAG";
inline constexpr const char* kJsonParseError = "JSON_PARSE_ERROR";
inline constexpr const char* kJsonUnreadable = "JSON_UNREADABLE";
inline constexpr const char* kXmlUnknownTag = "XML_UNKNOWN_TAG";
inline constexpr const char* kXmlParseError = "XML_PARSE_ERROR";
} // namespace code

// A place in a source file or page. `file` is a filesystem path or a URL;
// line/column are 1-based, 0 when unknown. `detail` carries the JSON pointer
// or attribute name when one applies.
struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;
  std::string detail;

  std::string str() const;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
  friend auto operator<=>(const SourceLocation&, const SourceLocation&) = default;
};

enum class SourceKind { html_attr, json_string, cli_seed };

const char* to_string(SourceKind k);

// One discovered link: where it points, where it was written, and whether it
// stays on the seed's site.
struct LinkRecord {
  NormalizedUrl target;
  std::string raw;       // the attribute value / matched text as written
  SourceLocation origin; // detail = attribute name or JSON pointer
  SourceKind source_kind = SourceKind::html_attr;
  Scope scope = Scope::internal;
};

enum class BrokenReason { http_status, connection_failed, timeout, too_many_redirects, invalid_url };
enum class SkipReason { external_not_checked, scheme_unsupported, excluded_by_pattern };

// Outcome of probing one URL.
struct CheckStatus {
  enum class Kind { ok, redirected, broken, skipped };

  Kind kind = Kind::ok;
  int http_status = 0; // final status for ok/redirected, the status for broken(http_status)
  BrokenReason broken_reason = BrokenReason::http_status;
  SkipReason skip_reason = SkipReason::external_not_checked;
  std::vector<NormalizedUrl> redirect_chain;

  static CheckStatus ok(int status);
  static CheckStatus redirected(std::vector<NormalizedUrl> chain, int final_status);
  static CheckStatus broken_http(int status);
  static CheckStatus broken(BrokenReason reason);
  static CheckStatus skipped(SkipReason reason);

  bool is_ok() const { return kind == Kind::ok || kind == Kind::redirected; }
  bool is_broken() const { return kind == Kind::broken; }
  bool is_skipped() const { return kind == Kind::skipped; }

  // "ok (HTTP 200)", "broken (HTTP 404)", "skipped (external not checked)", ...
  std::string describe() const;
};

enum class CheckKind { link, html, xml, reach };
enum class Severity { error, warning };

const char* to_string(CheckKind k);
const char* to_string(Severity s);

// One defect. Messages are for humans; machine_code and severity drive exit
// codes and annotations.
struct Finding {
  CheckKind check = CheckKind::link;
  Severity severity = Severity::error;
  SourceLocation location;
  std::string machine_code;
  std::string message;
  std::vector<SourceLocation> origins; // every place that referenced a broken target
};

// Status of one checked URL, kept for the machine-readable report.
struct UrlOutcome {
  std::string url;
  CheckStatus status;
};

// Ordered collection of findings plus run metadata. Sorting is part of the
// contract: reports render byte-identically regardless of probe concurrency.
struct Report {
  std::vector<Finding> findings;
  std::map<std::string, int> counts; // "pages", "links", "html_files", ...
  std::vector<UrlOutcome> urls;
  std::string started;  // RFC 3339, empty when timestamps are suppressed
  std::string finished;
  std::string tool_version;

  void add(Finding f) { findings.push_back(std::move(f)); }
  int errors() const;
  int warnings() const;

  // Sorts findings by (location file/URL, line, machine_code) and the url
  // list by url text. Renderers require a finalized report.
  void finalize();
};

// Severity promotion for --strict runs.
void promote_warnings(Report& report);

std::string current_timestamp();

} // namespace sitecheck
