#include "sitecheck/html.hpp"

#include <map>

namespace sitecheck::html {

const std::set<std::string>& HtmlRuleSet::void_elements() {
  static const std::set<std::string> v = {
      "area", "base",  "br",    "col",  "embed", "hr",    "img",
      "input", "link", "meta",  "param", "source", "track", "wbr",
  };
  return v;
}

const std::set<std::string>& HtmlRuleSet::known_elements() {
  static const std::set<std::string> v = {
      "a",        "abbr",    "address",  "area",     "article",  "aside",    "audio",
      "b",        "base",    "bdi",      "bdo",      "blockquote", "body",   "br",
      "button",   "canvas",  "caption",  "cite",     "code",     "col",      "colgroup",
      "data",     "datalist", "dd",      "del",      "details",  "dfn",      "dialog",
      "div",      "dl",      "dt",       "em",       "embed",    "fieldset", "figcaption",
      "figure",   "footer",  "form",     "h1",       "h2",       "h3",       "h4",
      "h5",       "h6",      "head",     "header",   "hgroup",   "hr",       "html",
      "i",        "iframe",  "img",      "input",    "ins",      "kbd",      "label",
      "legend",   "li",      "link",     "main",     "map",      "mark",     "math",
      "menu",     "meta",    "meter",    "nav",      "noscript", "object",   "ol",
      "optgroup", "option",  "output",   "p",        "param",    "picture",  "pre",
      "progress", "q",       "rp",       "rt",       "ruby",     "s",        "samp",
      "script",   "search",  "section",  "select",   "slot",     "small",    "source",
      "span",     "strong",  "style",    "sub",      "summary",  "sup",      "svg",
      "table",    "tbody",   "td",       "template", "textarea", "tfoot",    "th",
      "thead",    "time",    "title",    "tr",       "track",    "u",        "ul",
      "var",      "video",   "wbr",
  };
  return v;
}

const std::set<std::string>& HtmlRuleSet::optional_end_tag_elements() {
  static const std::set<std::string> v = {
      "html", "head", "body", "p",    "li",    "dt",    "dd",    "rt",    "rp", "optgroup",
      "option", "colgroup", "caption", "thead", "tbody", "tfoot", "tr", "td", "th",
  };
  return v;
}

namespace {

Finding make(const DocTree& doc, Severity sev, int line, int col, const char* machine_code,
             std::string message, std::string detail = {}) {
  Finding f;
  f.check = CheckKind::html;
  f.severity = sev;
  f.location = {doc.path, line, col, std::move(detail)};
  f.machine_code = machine_code;
  f.message = std::move(message);
  return f;
}

bool has_special_char(const std::string& v) {
  return v.find_first_of("<>\"") != std::string::npos;
}

} // namespace

std::vector<Finding> validate_structure(const DocTree& doc, const HtmlRuleSet& rules) {
  std::vector<Finding> out;

  if (!doc.has_doctype && rules.enabled(code::kHtmlNoDoctype)) {
    out.push_back(make(doc, Severity::error, 1, 1, code::kHtmlNoDoctype,
                       "missing <!DOCTYPE html> declaration"));
  }

  const auto& optional_end = HtmlRuleSet::optional_end_tag_elements();
  for (const auto& err : doc.errors) {
    switch (err.kind) {
      case ParseError::Kind::unclosed:
        if (optional_end.count(err.detail)) break; // closure may legally be implicit
        if (!rules.enabled(code::kHtmlUnclosedTag)) break;
        out.push_back(make(doc, Severity::error, err.line, err.column, code::kHtmlUnclosedTag,
                           "<" + err.detail + "> is never closed"));
        break;
      case ParseError::Kind::stray_end_tag:
        if (!rules.enabled(code::kHtmlStrayEndTag)) break;
        out.push_back(make(doc, Severity::error, err.line, err.column, code::kHtmlStrayEndTag,
                           "end tag </" + err.detail + "> matches no open element"));
        break;
      case ParseError::Kind::void_end_tag:
        if (!rules.enabled(code::kHtmlVoidEndTag)) break;
        out.push_back(make(doc, Severity::error, err.line, err.column, code::kHtmlVoidEndTag,
                           "void element <" + err.detail + "> takes no end tag"));
        break;
      case ParseError::Kind::bad_utf8:
        if (!rules.enabled(code::kHtmlBadUtf8)) break;
        out.push_back(
            make(doc, Severity::warning, err.line, err.column, code::kHtmlBadUtf8, err.detail));
        break;
      case ParseError::Kind::malformed_tag:
        if (!rules.enabled(code::kHtmlMalformedTag)) break;
        out.push_back(make(doc, Severity::warning, err.line, err.column, code::kHtmlMalformedTag,
                           err.detail));
        break;
    }
  }

  const auto& known = HtmlRuleSet::known_elements();
  struct SeenId {
    int line;
    int column;
  };
  std::map<std::string, SeenId> ids;

  std::vector<const Element*> stack;
  for (auto it = doc.roots.rbegin(); it != doc.roots.rend(); ++it) stack.push_back(&*it);
  while (!stack.empty()) {
    const Element* el = stack.back();
    stack.pop_back();
    for (auto it = el->children.rbegin(); it != el->children.rend(); ++it) stack.push_back(&*it);

    if (!known.count(el->tag) && rules.enabled(code::kHtmlUnknownElement)) {
      out.push_back(make(doc, Severity::warning, el->line, el->column, code::kHtmlUnknownElement,
                         "unknown element <" + el->tag + ">"));
    }
    for (const auto& attr : el->attrs) {
      if (attr.name == "id" && !attr.value.empty()) {
        auto [pos, fresh] = ids.try_emplace(attr.value, SeenId{attr.line, attr.column});
        if (!fresh && rules.enabled(code::kHtmlDuplicateId)) {
          out.push_back(make(doc, Severity::error, attr.line, attr.column, code::kHtmlDuplicateId,
                             "id \"" + attr.value + "\" already used at line " +
                                 std::to_string(pos->second.line),
                             "id"));
        }
      }
      if (attr.quote == AttrQuote::unquoted && has_special_char(attr.value) &&
          rules.enabled(code::kHtmlUnquotedSpecialAttr)) {
        out.push_back(make(doc, Severity::error, attr.line, attr.column,
                           code::kHtmlUnquotedSpecialAttr,
                           "unquoted value of \"" + attr.name +
                               "\" contains a character that needs quoting",
                           attr.name));
      }
    }
  }
  return out;
}

} // namespace sitecheck::html
