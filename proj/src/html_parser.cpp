#include "sitecheck/html.hpp"

#include <algorithm>
#include <cctype>

namespace sitecheck::html {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }


// Elements whose content is raw text up to the matching end tag.
bool is_raw_text(const std::string& tag) {
  return tag == "script" || tag == "style" || tag == "title" || tag == "textarea";
}

struct Cursor {
  std::string_view s;
  size_t i = 0;
  int line = 1;
  int column = 1;

  bool eof() const { return i >= s.size(); }
  char peek(size_t k = 0) const { return i + k < s.size() ? s[i + k] : '\0'; }

  void advance() {
    if (eof()) return;
    if (s[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  }

  void advance(size_t n) {
    for (size_t k = 0; k < n && !eof(); ++k) advance();
  }

  bool starts_with_ci(std::string_view lit) const {
    if (i + lit.size() > s.size()) return false;
    for (size_t k = 0; k < lit.size(); ++k) {
      if (to_lower(s[i + k]) != to_lower(lit[k])) return false;
    }
    return true;
  }

  // Advances past the literal; false when it never occurs (cursor at EOF).
  bool skip_past_ci(std::string_view lit) {
    while (!eof()) {
      if (starts_with_ci(lit)) {
        advance(lit.size());
        return true;
      }
      advance();
    }
    return false;
  }

  void skip_past_char(char c) {
    while (!eof() && s[i] != c) advance();
    if (!eof()) advance();
  }
};

struct OpenElement {
  Element element;
};

class Parser {
public:
  Parser(std::string_view bytes, const std::string& path) : cur_{bytes} {
    doc_.path = path;
  }

  DocTree run() {
    check_utf8();
    while (!cur_.eof()) {
      if (cur_.peek() != '<') {
        cur_.advance();
        continue;
      }
      if (cur_.starts_with_ci("<!--")) {
        int line = cur_.line, col = cur_.column;
        cur_.advance(4);
        if (!cur_.skip_past_ci("-->")) {
          error(ParseError::Kind::malformed_tag, line, col, "comment never closed");
        }
      } else if (cur_.starts_with_ci("<!doctype")) {
        if (!doc_.has_doctype) {
          doc_.has_doctype = true;
          doc_.doctype_line = cur_.line;
        }
        cur_.skip_past_char('>');
      } else if (cur_.starts_with_ci("<![CDATA[")) {
        int line = cur_.line, col = cur_.column;
        cur_.advance(9);
        if (!cur_.skip_past_ci("]]>")) {
          error(ParseError::Kind::malformed_tag, line, col, "CDATA section never closed");
        }
      } else if (cur_.peek(1) == '!' || cur_.peek(1) == '?') {
        // bogus comment
        cur_.skip_past_char('>');
      } else if (cur_.peek(1) == '/') {
        if (is_alpha(cur_.peek(2))) {
          read_end_tag();
        } else {
          error(ParseError::Kind::malformed_tag, cur_.line, cur_.column, "bogus end tag");
          cur_.skip_past_char('>');
        }
      } else if (is_alpha(cur_.peek(1))) {
        read_start_tag();
      } else {
        cur_.advance(); // literal '<' in text
      }
    }
    // end-of-document recovery: everything still open gets closed
    while (!stack_.empty()) {
      error(ParseError::Kind::unclosed, stack_.back().element.line, stack_.back().element.column,
            stack_.back().element.tag);
      pop_and_attach();
    }
    doc_.total_lines = cur_.line;
    return std::move(doc_);
  }

private:
  void error(ParseError::Kind kind, int line, int col, std::string detail) {
    doc_.errors.push_back({kind, line, col, std::move(detail)});
  }

  void attach(Element&& e) {
    if (stack_.empty()) {
      doc_.roots.push_back(std::move(e));
    } else {
      stack_.back().element.children.push_back(std::move(e));
    }
  }

  void pop_and_attach() {
    Element e = std::move(stack_.back().element);
    stack_.pop_back();
    attach(std::move(e));
  }

  std::string read_tag_name() {
    std::string name;
    while (!cur_.eof()) {
      char c = cur_.peek();
      if (is_space(c) || c == '>' || c == '/') break;
      name += to_lower(c);
      cur_.advance();
    }
    return name;
  }

  // Returns false on EOF inside the tag (the tag is discarded).
  bool read_attrs(Element& el, bool& self_closing) {
    self_closing = false;
    while (true) {
      while (!cur_.eof() && is_space(cur_.peek())) cur_.advance();
      if (cur_.eof()) {
        error(ParseError::Kind::malformed_tag, el.line, el.column,
              "end of file inside <" + el.tag + ">");
        return false;
      }
      char c = cur_.peek();
      if (c == '>') {
        cur_.advance();
        return true;
      }
      if (c == '/') {
        if (cur_.peek(1) == '>') {
          cur_.advance(2);
          self_closing = true;
          return true;
        }
        cur_.advance();
        continue;
      }
      Attr attr;
      attr.line = cur_.line;
      attr.column = cur_.column;
      while (!cur_.eof()) {
        char a = cur_.peek();
        if (is_space(a) || a == '=' || a == '/' || a == '>') break;
        attr.name += to_lower(a);
        cur_.advance();
      }
      if (attr.name.empty()) {
        cur_.advance(); // stray junk such as a lone quote
        continue;
      }
      while (!cur_.eof() && is_space(cur_.peek())) cur_.advance();
      if (cur_.peek() == '=') {
        cur_.advance();
        while (!cur_.eof() && is_space(cur_.peek())) cur_.advance();
        char q = cur_.peek();
        if (q == '"' || q == '\'') {
          attr.quote = q == '"' ? AttrQuote::double_quoted : AttrQuote::single_quoted;
          cur_.advance();
          while (!cur_.eof() && cur_.peek() != q) {
            attr.value += cur_.peek();
            cur_.advance();
          }
          if (cur_.eof()) {
            error(ParseError::Kind::malformed_tag, el.line, el.column,
                  "end of file inside attribute value of <" + el.tag + ">");
            return false;
          }
          cur_.advance(); // closing quote
        } else {
          attr.quote = AttrQuote::unquoted;
          while (!cur_.eof() && !is_space(cur_.peek()) && cur_.peek() != '>') {
            attr.value += cur_.peek();
            cur_.advance();
          }
        }
      } else {
        attr.quote = AttrQuote::valueless;
      }
      bool duplicate = std::any_of(el.attrs.begin(), el.attrs.end(),
                                   [&](const Attr& a) { return a.name == attr.name; });
      if (!duplicate) el.attrs.push_back(std::move(attr));
    }
  }

  void read_start_tag() {
    Element el;
    el.line = cur_.line;
    el.column = cur_.column;
    cur_.advance(); // '<'
    el.tag = read_tag_name();

    bool self_closing = false;
    if (!read_attrs(el, self_closing)) return;

    const auto& voids = HtmlRuleSet::void_elements();
    if (voids.count(el.tag) || self_closing) {
      attach(std::move(el));
      return;
    }
    if (is_raw_text(el.tag)) {
      // opaque content; consume through the matching end tag
      std::string end = "</" + el.tag;
      if (cur_.skip_past_ci(end)) {
        cur_.skip_past_char('>');
      } else {
        error(ParseError::Kind::unclosed, el.line, el.column, el.tag);
      }
      attach(std::move(el));
      return;
    }
    stack_.push_back({std::move(el)});
  }

  void read_end_tag() {
    int line = cur_.line, col = cur_.column;
    cur_.advance(2); // "</"
    std::string name = read_tag_name();
    cur_.skip_past_char('>'); // anything else in an end tag is ignored

    if (HtmlRuleSet::void_elements().count(name)) {
      error(ParseError::Kind::void_end_tag, line, col, name);
      return;
    }
    // find the matching open element
    auto match = std::find_if(stack_.rbegin(), stack_.rend(), [&](const OpenElement& oe) {
      return oe.element.tag == name;
    });
    if (match == stack_.rend()) {
      error(ParseError::Kind::stray_end_tag, line, col, name);
      return;
    }
    // close intermediates up to the match, reporting each as unclosed
    while (stack_.back().element.tag != name) {
      error(ParseError::Kind::unclosed, stack_.back().element.line, stack_.back().element.column,
            stack_.back().element.tag);
      pop_and_attach();
    }
    pop_and_attach();
  }

  // UTF-8 well-formedness scan; decoding is not needed, only a verdict.
  void check_utf8() {
    const std::string_view s = cur_.s;
    size_t i = 0;
    int line = 1, col = 1;
    int bad = 0;
    int first_line = 0, first_col = 0;
    auto cont = [&](size_t k) {
      return k < s.size() && (static_cast<unsigned char>(s[k]) & 0xC0) == 0x80;
    };
    while (i < s.size()) {
      unsigned char b = static_cast<unsigned char>(s[i]);
      size_t len = 0;
      if (b < 0x80) {
        len = 1;
      } else if ((b & 0xE0) == 0xC0 && b >= 0xC2 && cont(i + 1)) {
        len = 2;
      } else if ((b & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        len = 3;
      } else if ((b & 0xF8) == 0xF0 && b <= 0xF4 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        len = 4;
      }
      if (len == 0) {
        if (bad == 0) {
          first_line = line;
          first_col = col;
        }
        ++bad;
        len = 1;
      }
      for (size_t k = 0; k < len && i < s.size(); ++k, ++i) {
        if (s[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
    }
    if (bad > 0) {
      error(ParseError::Kind::bad_utf8, first_line, first_col,
            std::to_string(bad) + " invalid byte(s) treated as replacement characters");
    }
  }

  Cursor cur_;
  DocTree doc_;
  std::vector<OpenElement> stack_;
};

} // namespace

const Attr* Element::find_attr(std::string_view name) const {
  for (const auto& a : attrs) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

DocTree parse_document(std::string_view bytes, const std::string& path) {
  return Parser(bytes, path).run();
}

} // namespace sitecheck::html
