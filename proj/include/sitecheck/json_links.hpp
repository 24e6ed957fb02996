// URL extraction from JSON files: parse, walk string values, match absolute
// http(s) URLs inside them, keep the JSON pointer and line of each match.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sitecheck/model.hpp"
#include "sitecheck/probe.hpp"
#include "sitecheck/url.hpp"

namespace sitecheck::json {

struct JsonUrlHit {
  std::string file;
  std::string json_pointer; // RFC 6901, to the containing string value
  int line = 0;             // 1-based line of the string token
  std::string url_text;     // the matched substring, as written
};

struct JsonScan {
  std::vector<JsonUrlHit> hits;
  std::vector<Finding> findings; // JSON_PARSE_ERROR / JSON_UNREADABLE
};

// Matching rule: "http://" or "https://" followed by at least one character
// from the RFC 3986 URL set, then trailing  . , ; ) ]  punctuation dropped.
// Object keys are never scanned. With relative_url_keys, a string value
// without an absolute match whose nearest object key ends in url/link/href
// (case-insensitive) is emitted whole, to be resolved against a base later.
JsonScan extract_urls_text(std::string_view text, const std::string& file,
                           bool relative_url_keys = false);
JsonScan extract_urls(const std::string& file, bool relative_url_keys = false);

// Every *.json under root, recursive, lexicographic.
std::vector<std::string> scan_json_dir(const std::string& root);

// Scan, extract, dedupe by normalized URL, probe each once, report broken
// targets with every (file, pointer, line) that mentioned them.
Report check_json_links(const std::string& root, const ProbePolicy& policy,
                        const NormalizedUrl* base = nullptr);

} // namespace sitecheck::json
