#include "sitecheck/xml_tree.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

namespace sitecheck::xml {

namespace {

std::atomic<int> g_parse_count{0};

constexpr int kMaxDepth = 512;

bool is_name_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct Parser {
  std::string_view s;
  size_t i = 0;
  int line = 1;
  int column = 1;
  XmlTree* out;

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

  bool starts_with(std::string_view lit) const { return s.substr(i, lit.size()) == lit; }

  void skip(size_t n) {
    for (size_t k = 0; k < n; ++k) advance();
  }

  void skip_ws() {
    while (!eof() && is_ws(peek())) advance();
  }

  bool fail(const std::string& message) {
    if (out->error.empty()) {
      out->error = message;
      out->error_line = line;
      out->error_column = column;
    }
    return false;
  }

  bool skip_until(std::string_view lit, const std::string& what) {
    while (!eof()) {
      if (starts_with(lit)) {
        skip(lit.size());
        return true;
      }
      advance();
    }
    return fail("unterminated " + what);
  }

  // Comments, processing instructions, and whitespace between markup.
  bool skip_misc() {
    while (!eof()) {
      if (is_ws(peek())) {
        advance();
      } else if (starts_with("<!--")) {
        skip(4);
        if (!skip_until("-->", "comment")) return false;
      } else if (starts_with("<?")) {
        skip(2);
        if (!skip_until("?>", "processing instruction")) return false;
      } else {
        return true;
      }
    }
    return true;
  }

  bool skip_doctype() {
    // "<!DOCTYPE" already seen; tolerate an internal subset in brackets
    int brackets = 0;
    while (!eof()) {
      char c = peek();
      if (c == '[') ++brackets;
      if (c == ']') --brackets;
      if (c == '>' && brackets <= 0) {
        advance();
        return true;
      }
      advance();
    }
    return fail("unterminated DOCTYPE");
  }

  bool read_name(std::string& name) {
    if (eof() || !is_name_start(static_cast<unsigned char>(peek()))) {
      return fail("expected a name");
    }
    while (!eof() && is_name_char(static_cast<unsigned char>(peek()))) {
      name += peek();
      advance();
    }
    return true;
  }

  // Attributes are validated and discarded.
  // Returns: 1 = '>' seen, 2 = '/>' seen, 0 = error.
  int read_attrs_and_close(const std::string& tag) {
    while (true) {
      skip_ws();
      if (eof()) {
        fail("unexpected end of file inside <" + tag + ">");
        return 0;
      }
      if (peek() == '>') {
        advance();
        return 1;
      }
      if (peek() == '/') {
        advance();
        if (peek() != '>') {
          fail("expected '>' after '/'");
          return 0;
        }
        advance();
        return 2;
      }
      std::string attr;
      if (!read_name(attr)) return 0;
      skip_ws();
      if (peek() != '=') {
        fail("attribute \"" + attr + "\" has no value");
        return 0;
      }
      advance();
      skip_ws();
      char q = peek();
      if (q != '"' && q != '\'') {
        fail("attribute \"" + attr + "\" value is not quoted");
        return 0;
      }
      advance();
      while (!eof() && peek() != q) advance();
      if (eof()) {
        fail("unterminated value of attribute \"" + attr + "\"");
        return 0;
      }
      advance();
    }
  }

  bool parse_element(XmlNode& node, int depth) {
    if (depth > kMaxDepth) return fail("element nesting deeper than 512");
    node.line = line;
    node.column = column;
    advance(); // '<'
    if (!read_name(node.name)) return false;
    int close = read_attrs_and_close(node.name);
    if (close == 0) return false;
    if (close == 2) return true; // self-closing

    while (true) {
      // character data is opaque
      while (!eof() && peek() != '<') advance();
      if (eof()) return fail("<" + node.name + "> is never closed");
      if (starts_with("<!--")) {
        skip(4);
        if (!skip_until("-->", "comment")) return false;
      } else if (starts_with("<![CDATA[")) {
        skip(9);
        if (!skip_until("]]>", "CDATA section")) return false;
      } else if (starts_with("<?")) {
        skip(2);
        if (!skip_until("?>", "processing instruction")) return false;
      } else if (starts_with("</")) {
        int el = line, ec = column;
        skip(2);
        std::string name;
        if (!read_name(name)) return false;
        skip_ws();
        if (peek() != '>') return fail("malformed end tag </" + name + ">");
        advance();
        if (name != node.name) {
          line = el;
          column = ec;
          return fail("end tag </" + name + "> does not match <" + node.name + ">");
        }
        return true;
      } else {
        XmlNode child;
        if (!parse_element(child, depth + 1)) return false;
        node.children.push_back(std::move(child));
      }
    }
  }

  void run() {
    if (starts_with("\xEF\xBB\xBF")) skip(3);
    if (!skip_misc()) return;
    if (starts_with("<!DOCTYPE")) {
      skip(9);
      if (!skip_doctype()) return;
      if (!skip_misc()) return;
    }
    if (eof()) {
      fail("no root element");
      return;
    }
    if (peek() != '<') {
      fail("text before the root element");
      return;
    }
    XmlNode root;
    if (!parse_element(root, 0)) return;
    if (!skip_misc()) return;
    if (!eof()) {
      fail("content after the document root");
      return;
    }
    out->root = std::move(root);
  }
};

} // namespace

XmlTree parse_xml(std::string_view bytes, const std::string& path) {
  g_parse_count.fetch_add(1, std::memory_order_relaxed);
  XmlTree tree;
  tree.path = path;
  Parser p{bytes, 0, 1, 1, &tree};
  p.run();
  return tree;
}

XmlTree parse_xml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    g_parse_count.fetch_add(1, std::memory_order_relaxed);
    XmlTree tree;
    tree.path = path;
    tree.error = "cannot read file";
    return tree;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_xml(buf.str(), path);
}

int xml_parse_count() { return g_parse_count.load(std::memory_order_relaxed); }

} // namespace sitecheck::xml
