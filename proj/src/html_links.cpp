#include "sitecheck/html.hpp"

namespace sitecheck::html {

namespace {

bool takes_href(const std::string& tag) {
  return tag == "a" || tag == "link" || tag == "area";
}

bool takes_src(const std::string& tag) {
  return tag == "img" || tag == "script" || tag == "iframe" || tag == "source" ||
         tag == "audio" || tag == "video" || tag == "embed" || tag == "track";
}

bool takes_srcset(const std::string& tag) { return tag == "img" || tag == "source"; }

// First whitespace-delimited token of each comma-separated candidate.
std::vector<std::string> srcset_candidates(const std::string& value) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= value.size()) {
    size_t comma = value.find(',', pos);
    std::string part = value.substr(pos, comma == std::string::npos ? std::string::npos
                                                                    : comma - pos);
    size_t b = part.find_first_not_of(" \t\n\r\f");
    if (b != std::string::npos) {
      size_t e = part.find_first_of(" \t\n\r\f", b);
      out.push_back(part.substr(b, e == std::string::npos ? std::string::npos : e - b));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

} // namespace

ExtractResult extract_links(const DocTree& doc, const NormalizedUrl& base,
                            const NormalizedUrl* seed) {
  ExtractResult result;
  const NormalizedUrl& scope_origin = seed ? *seed : base;

  auto add = [&](const std::string& raw, const Attr& attr) {
    SourceLocation origin{doc.path, attr.line, attr.column, attr.name};
    UrlError err = UrlError::none;
    auto target = normalize_url(&base, raw, &err);
    if (!target) {
      auto kind = err == UrlError::unsupported_scheme ? LinkIssue::Kind::unsupported_scheme
                                                      : LinkIssue::Kind::invalid;
      result.issues.push_back({kind, raw, std::move(origin)});
      return;
    }
    LinkRecord rec;
    rec.target = std::move(*target);
    rec.raw = raw;
    rec.origin = std::move(origin);
    rec.source_kind = SourceKind::html_attr;
    rec.scope = classify_scope(scope_origin, rec.target);
    result.links.push_back(std::move(rec));
  };

  std::vector<const Element*> stack;
  for (auto it = doc.roots.rbegin(); it != doc.roots.rend(); ++it) stack.push_back(&*it);
  while (!stack.empty()) {
    const Element* el = stack.back();
    stack.pop_back();
    for (auto it = el->children.rbegin(); it != el->children.rend(); ++it) stack.push_back(&*it);

    for (const auto& attr : el->attrs) {
      if (attr.value.empty()) continue;
      if (attr.name == "href" && takes_href(el->tag)) {
        add(attr.value, attr);
      } else if (attr.name == "src" && takes_src(el->tag)) {
        add(attr.value, attr);
      } else if (attr.name == "srcset" && takes_srcset(el->tag)) {
        for (const auto& candidate : srcset_candidates(attr.value)) add(candidate, attr);
      } else if (attr.name == "action" && el->tag == "form") {
        add(attr.value, attr);
      }
    }
  }
  return result;
}

} // namespace sitecheck::html
