#include "sitecheck/json_links.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "sitecheck/version.hpp"

namespace fs = std::filesystem;

namespace sitecheck::json {

namespace {

constexpr std::string_view kUrlChars =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
    "._~:/?#[]@!$&'()*+,;=%-";

bool url_char(char c) { return kUrlChars.find(c) != std::string_view::npos; }

bool trailing_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ')' || c == ']';
}

// Same matches the oracle regex https?://[url chars]+ produces, with the
// same trim applied afterwards.
std::vector<std::string> match_urls(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t http = text.find("http://", pos);
    size_t https = text.find("https://", pos);
    size_t at = std::min(http, https);
    if (at == std::string::npos) break;
    size_t scheme_end = at + (at == https ? 8 : 7);
    size_t end = scheme_end;
    while (end < text.size() && url_char(text[end])) ++end;
    if (end == scheme_end) { // bare scheme, not a match
      pos = scheme_end;
      continue;
    }
    size_t trimmed = end;
    while (trimmed > scheme_end && trailing_punct(text[trimmed - 1])) --trimmed;
    out.push_back(text.substr(at, trimmed - at));
    pos = end;
  }
  return out;
}

std::string escape_pointer_segment(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

bool key_names_url(const std::string& key) {
  std::string k = key;
  std::transform(k.begin(), k.end(), k.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  auto ends_with = [&](std::string_view suffix) {
    return k.size() >= suffix.size() && k.compare(k.size() - suffix.size(),
                                                  suffix.size(), suffix) == 0;
  };
  return ends_with("url") || ends_with("link") || ends_with("href");
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Minimal strict JSON reader that remembers where string tokens start.
// nlohmann::json drops source positions during parsing, which this module's
// whole contract is about, hence the hand-rolled walk.
class Scanner {
 public:
  Scanner(std::string_view s, const std::string& file, bool relative_url_keys,
          JsonScan& out)
      : s_(s), file_(file), relative_url_keys_(relative_url_keys), out_(out) {}

  void run() {
    skip_ws();
    if (eof()) {
      fail("empty input");
      return;
    }
    std::string pointer;
    if (!parse_value(pointer, "")) return;
    skip_ws();
    if (!eof()) fail("trailing content after the document");
  }

 private:
  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }

  void advance() {
    if (eof()) return;
    if (s_[i_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++i_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) {
      advance();
    }
  }

  bool fail(const std::string& message) {
    if (!failed_) {
      failed_ = true;
      Finding f;
      f.check = CheckKind::link;
      f.severity = Severity::error;
      f.location = {file_, line_, column_, {}};
      f.machine_code = code::kJsonParseError;
      f.message = message;
      out_.findings.push_back(std::move(f));
      out_.hits.clear(); // a broken document contributes no hits
    }
    return false;
  }

  bool parse_literal(std::string_view lit) {
    for (char c : lit) {
      if (peek() != c) return fail("malformed literal");
      advance();
    }
    return true;
  }

  bool parse_number() {
    if (peek() == '-') advance();
    if (!isdigit(static_cast<unsigned char>(peek()))) return fail("malformed number");
    while (isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.') {
      advance();
      if (!isdigit(static_cast<unsigned char>(peek()))) return fail("malformed number");
      while (isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!isdigit(static_cast<unsigned char>(peek()))) return fail("malformed number");
      while (isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    return true;
  }

  bool parse_string(std::string& value, int& token_line) {
    token_line = line_;
    advance(); // opening quote
    while (true) {
      if (eof()) return fail("unterminated string");
      char c = peek();
      if (c == '"') {
        advance();
        return true;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case '"': value += '"'; advance(); break;
          case '\\': value += '\\'; advance(); break;
          case '/': value += '/'; advance(); break;
          case 'b': value += '\b'; advance(); break;
          case 'f': value += '\f'; advance(); break;
          case 'n': value += '\n'; advance(); break;
          case 'r': value += '\r'; advance(); break;
          case 't': value += '\t'; advance(); break;
          case 'u': {
            advance();
            unsigned long cp = 0;
            if (!read_hex4(cp)) return false;
            if (cp >= 0xD800 && cp <= 0xDBFF) {
              if (peek() != '\\') return fail("lone surrogate");
              advance();
              if (peek() != 'u') return fail("lone surrogate");
              advance();
              unsigned long low = 0;
              if (!read_hex4(low)) return false;
              if (low < 0xDC00 || low > 0xDFFF) return fail("bad surrogate pair");
              cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
            } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
              return fail("lone surrogate");
            }
            append_utf8(value, cp);
            break;
          }
          default:
            return fail("unknown escape");
        }
        continue;
      }
      if (static_cast<unsigned char>(c) < 0x20) return fail("control character in string");
      value += c;
      advance();
    }
  }

  bool read_hex4(unsigned long& cp) {
    cp = 0;
    for (int k = 0; k < 4; ++k) {
      char c = peek();
      int digit;
      if (c >= '0' && c <= '9') {
        digit = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        digit = c - 'a' + 10;
      } else if (c >= 'A' && c <= 'F') {
        digit = c - 'A' + 10;
      } else {
        return fail("bad \\u escape");
      }
      cp = cp * 16 + static_cast<unsigned long>(digit);
      advance();
    }
    return true;
  }

  void record_string_value(const std::string& value, int token_line,
                           const std::string& pointer, const std::string& nearest_key) {
    auto urls = match_urls(value);
    for (auto& u : urls) out_.hits.push_back({file_, pointer, token_line, std::move(u)});
    if (urls.empty() && relative_url_keys_ && key_names_url(nearest_key)) {
      std::string trimmed = value;
      size_t b = trimmed.find_first_not_of(" \t\n\r");
      size_t e = trimmed.find_last_not_of(" \t\n\r");
      trimmed = b == std::string::npos ? std::string() : trimmed.substr(b, e - b + 1);
      if (!trimmed.empty() && trimmed.find("://") == std::string::npos) {
        out_.hits.push_back({file_, pointer, token_line, trimmed});
      }
    }
  }

  bool parse_value(const std::string& pointer, const std::string& nearest_key) {
    skip_ws();
    if (eof()) return fail("unexpected end of input");
    char c = peek();
    if (c == '{') return parse_object(pointer);
    if (c == '[') return parse_array(pointer, nearest_key);
    if (c == '"') {
      std::string value;
      int token_line = 0;
      if (!parse_string(value, token_line)) return false;
      record_string_value(value, token_line, pointer, nearest_key);
      return true;
    }
    if (c == 't') return parse_literal("true");
    if (c == 'f') return parse_literal("false");
    if (c == 'n') return parse_literal("null");
    if (c == '-' || isdigit(static_cast<unsigned char>(c))) return parse_number();
    return fail("unexpected character");
  }

  bool parse_object(const std::string& pointer) {
    advance(); // '{'
    skip_ws();
    if (peek() == '}') {
      advance();
      return true;
    }
    while (true) {
      skip_ws();
      if (peek() != '"') return fail("expected a key string");
      std::string key;
      int key_line = 0;
      if (!parse_string(key, key_line)) return false; // keys are not scanned
      skip_ws();
      if (peek() != ':') return fail("expected ':' after key");
      advance();
      if (!parse_value(pointer + "/" + escape_pointer_segment(key), key)) return false;
      skip_ws();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == '}') {
        advance();
        return true;
      }
      return fail("expected ',' or '}'");
    }
  }

  bool parse_array(const std::string& pointer, const std::string& nearest_key) {
    advance(); // '['
    skip_ws();
    if (peek() == ']') {
      advance();
      return true;
    }
    size_t index = 0;
    while (true) {
      if (!parse_value(pointer + "/" + std::to_string(index), nearest_key)) return false;
      ++index;
      skip_ws();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ']') {
        advance();
        return true;
      }
      return fail("expected ',' or ']'");
    }
  }

  std::string_view s_;
  size_t i_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::string file_;
  bool relative_url_keys_;
  bool failed_ = false;
  JsonScan& out_;
};

} // namespace

JsonScan extract_urls_text(std::string_view text, const std::string& file,
                           bool relative_url_keys) {
  JsonScan scan;
  Scanner(text, file, relative_url_keys, scan).run();
  return scan;
}

JsonScan extract_urls(const std::string& file, bool relative_url_keys) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    JsonScan scan;
    Finding f;
    f.check = CheckKind::link;
    f.severity = Severity::error;
    f.location = {file, 0, 0, {}};
    f.machine_code = code::kJsonUnreadable;
    f.message = "cannot read file";
    scan.findings.push_back(std::move(f));
    return scan;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return extract_urls_text(buf.str(), file, relative_url_keys);
}

std::vector<std::string> scan_json_dir(const std::string& root) {
  std::vector<std::string> out;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) return out;
  for (const auto& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Report check_json_links(const std::string& root, const ProbePolicy& policy,
                        const NormalizedUrl* base) {
  Report report;
  report.tool_version = kToolVersion;
  report.started = current_timestamp();

  auto files = scan_json_dir(root);
  report.counts["json_files"] = static_cast<int>(files.size());

  struct Target {
    CheckStatus status;
    std::vector<SourceLocation> origins;
  };
  std::map<NormalizedUrl, std::vector<SourceLocation>> to_probe;
  std::map<std::string, Target> textual; // could not be normalized
  int hit_count = 0;

  for (const auto& file : files) {
    JsonScan scan = extract_urls(file, base != nullptr);
    for (auto& f : scan.findings) report.add(std::move(f));
    hit_count += static_cast<int>(scan.hits.size());
    for (auto& hit : scan.hits) {
      SourceLocation origin{hit.file, hit.line, 0, hit.json_pointer};
      UrlError err = UrlError::none;
      auto url = normalize_url(base, hit.url_text, &err);
      if (!url) {
        auto& t = textual[hit.url_text];
        t.status = err == UrlError::unsupported_scheme
                       ? CheckStatus::skipped(SkipReason::scheme_unsupported)
                       : CheckStatus::broken(BrokenReason::invalid_url);
        t.origins.push_back(std::move(origin));
        continue;
      }
      to_probe[*url].push_back(std::move(origin));
    }
  }
  report.counts["url_hits"] = hit_count;
  report.counts["urls"] = static_cast<int>(to_probe.size() + textual.size());

  std::vector<const NormalizedUrl*> order;
  order.reserve(to_probe.size());
  for (const auto& [url, _] : to_probe) order.push_back(&url);
  std::vector<CheckStatus> statuses(order.size());
  std::atomic<size_t> next{0};
  size_t workers = std::min<size_t>(8, order.size());
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t k = next.fetch_add(1); k < order.size(); k = next.fetch_add(1)) {
        statuses[k] = probe(*order[k], policy);
      }
    });
  }
  for (auto& t : pool) t.join();

  for (size_t k = 0; k < order.size(); ++k) {
    const NormalizedUrl& url = *order[k];
    const CheckStatus& status = statuses[k];
    report.urls.push_back({url.str(), status});
    if (!status.is_broken()) continue;
    Finding f;
    f.check = CheckKind::link;
    f.severity = Severity::error;
    f.machine_code = code::kLinkBroken;
    f.origins = to_probe[url];
    std::sort(f.origins.begin(), f.origins.end());
    f.origins.erase(std::unique(f.origins.begin(), f.origins.end()), f.origins.end());
    f.location = f.origins.front();
    f.message = url.str() + " " + status.describe();
    report.add(std::move(f));
  }
  for (auto& [raw, target] : textual) {
    report.urls.push_back({raw, target.status});
    if (!target.status.is_broken()) continue;
    Finding f;
    f.check = CheckKind::link;
    f.severity = Severity::error;
    f.machine_code = code::kLinkBroken;
    f.origins = std::move(target.origins);
    std::sort(f.origins.begin(), f.origins.end());
    f.origins.erase(std::unique(f.origins.begin(), f.origins.end()), f.origins.end());
    f.location = f.origins.front();
    f.message = raw + " " + target.status.describe();
    report.add(std::move(f));
  }

  report.finished = current_timestamp();
  report.finalize();
  return report;
}

} // namespace sitecheck::json
