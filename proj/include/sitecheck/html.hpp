// Tolerant HTML parsing, structural validation, and link extraction.
// The parser never fails: syntax problems are collected as parse errors and
// the tree is repaired by recovery rules. It does not execute or inspect
// JavaScript; script/style bodies are opaque text.
#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sitecheck/model.hpp"
#include "sitecheck/url.hpp"

namespace sitecheck::html {

enum class AttrQuote { double_quoted, single_quoted, unquoted, valueless };

struct Attr {
  std::string name; // lowercased
  std::string value;
  AttrQuote quote = AttrQuote::double_quoted;
  int line = 0;
  int column = 0;
};

struct Element {
  std::string tag; // lowercased
  std::vector<Attr> attrs;
  std::vector<Element> children;
  int line = 0; // of the '<'
  int column = 0;

  const Attr* find_attr(std::string_view name) const;
};

struct ParseError {
  enum class Kind { unclosed, stray_end_tag, void_end_tag, bad_utf8, malformed_tag };
  Kind kind;
  int line = 0;
  int column = 0;
  std::string detail; // tag name, or free text for bad_utf8/malformed
};

struct DocTree {
  std::string path; // file locator used in findings
  std::vector<Element> roots;
  std::vector<ParseError> errors;
  bool has_doctype = false;
  int doctype_line = 0;
  int total_lines = 1;
};

// Always returns a tree; invalid UTF-8 and syntax problems become entries in
// DocTree::errors, never exceptions.
DocTree parse_document(std::string_view bytes, const std::string& path);

struct HtmlRuleSet {
  // Elements that take no end tag.
  static const std::set<std::string>& void_elements();
  // The HTML5 element-name list (void_elements is a subset).
  static const std::set<std::string>& known_elements();
  // Elements whose end tag may legally be omitted; their implicit closure is
  // not reported as HTML_UNCLOSED_TAG.
  static const std::set<std::string>& optional_end_tag_elements();

  // Machine codes disabled via --allow.
  std::set<std::string> disabled;

  bool enabled(std::string_view machine_code) const {
    return disabled.find(std::string(machine_code)) == disabled.end();
  }
};

// Emits HTML_NO_DOCTYPE, HTML_UNCLOSED_TAG, HTML_STRAY_END_TAG,
// HTML_VOID_END_TAG, HTML_DUPLICATE_ID, HTML_UNKNOWN_ELEMENT (warning),
// HTML_UNQUOTED_SPECIAL_ATTR, plus HTML_BAD_UTF8 / HTML_MALFORMED_TAG
// warnings from parse recovery.
std::vector<Finding> validate_structure(const DocTree& doc, const HtmlRuleSet& rules);

// A reference that could not become a LinkRecord: unsupported scheme or
// syntactically unusable.
struct LinkIssue {
  enum class Kind { unsupported_scheme, invalid };
  Kind kind;
  std::string raw;
  SourceLocation origin; // detail = attribute name
};

struct ExtractResult {
  std::vector<LinkRecord> links;
  std::vector<LinkIssue> issues;
};

// Collects href (a, link, area), src (img, script, iframe, source, audio,
// video, embed, track), srcset candidates, and form action values, resolved
// against `base`. Scope is classified against `seed` when given, else
// against `base`.
ExtractResult extract_links(const DocTree& doc, const NormalizedUrl& base,
                            const NormalizedUrl* seed = nullptr);

} // namespace sitecheck::html
