#include "sitecheck/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace sitecheck {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

int hex_value(char c) {
  if (is_digit(c)) return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return c - 'A' + 10;
}

char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

bool is_unreserved(char c) {
  return is_alpha(c) || is_digit(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

bool is_sub_delim(char c) {
  switch (c) {
  case '!': case '$': case '&': case '\'': case '(': case ')':
  case '*': case '+': case ',': case ';': case '=':
    return true;
  default:
    return false;
  }
}

bool is_pchar(char c) {
  return is_unreserved(c) || is_sub_delim(c) || c == ':' || c == '@';
}

void append_pct(std::string& out, unsigned char b) {
  static const char* hex = "0123456789ABCDEF";
  out += '%';
  out += hex[b >> 4];
  out += hex[b & 0xF];
}

// Percent normalization: decode unreserved octets, uppercase the hex digits
// of everything else, and encode characters outside the allowed set. Stray
// '%' not followed by two hex digits is left alone.
std::string normalize_component(std::string_view in, bool (*allowed)(char)) {
  std::string out;
  out.reserve(in.size());
  for (size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (c == '%' && i + 2 < in.size() && is_hex(in[i + 1]) && is_hex(in[i + 2])) {
      unsigned char b = static_cast<unsigned char>(hex_value(in[i + 1]) * 16 + hex_value(in[i + 2]));
      if (is_unreserved(static_cast<char>(b))) {
        out += static_cast<char>(b);
      } else {
        append_pct(out, b);
      }
      i += 2;
    } else if (c == '%') {
      out += c; // malformed escape, keep verbatim
    } else if (allowed(c)) {
      out += c;
    } else {
      append_pct(out, static_cast<unsigned char>(c));
    }
  }
  return out;
}

bool path_char_allowed(char c) { return is_pchar(c) || c == '/'; }
bool query_char_allowed(char c) { return is_pchar(c) || c == '/' || c == '?'; }

// RFC 3986 §5.2.4.
std::string remove_dot_segments(std::string_view path) {
  std::string input(path);
  std::string output;
  while (!input.empty()) {
    if (input.rfind("../", 0) == 0) {
      input.erase(0, 3);
    } else if (input.rfind("./", 0) == 0) {
      input.erase(0, 2);
    } else if (input.rfind("/./", 0) == 0) {
      input.erase(0, 2); // leave the leading '/'
    } else if (input == "/.") {
      input = "/";
    } else if (input.rfind("/../", 0) == 0) {
      input.erase(0, 3);
      auto pos = output.find_last_of('/');
      output.erase(pos == std::string::npos ? 0 : pos);
    } else if (input == "/..") {
      input = "/";
      auto pos = output.find_last_of('/');
      output.erase(pos == std::string::npos ? 0 : pos);
    } else if (input == "." || input == "..") {
      input.clear();
    } else {
      size_t start = input[0] == '/' ? 1 : 0;
      size_t end = input.find('/', start);
      output += input.substr(0, end == std::string::npos ? input.size() : end);
      input.erase(0, end == std::string::npos ? input.size() : end);
    }
  }
  return output;
}

struct RawParts {
  std::optional<std::string> scheme;
  std::optional<std::string> authority; // text between "//" and path
  std::string path;
  std::optional<std::string> query;
};

// Split a reference into scheme/authority/path/query; the fragment is cut
// off and never kept.
bool split_reference(std::string_view raw, RawParts& parts) {
  if (auto hash = raw.find('#'); hash != std::string_view::npos) {
    raw = raw.substr(0, hash);
  }
  // scheme
  if (!raw.empty() && is_alpha(raw[0])) {
    size_t i = 1;
    while (i < raw.size() &&
           (is_alpha(raw[i]) || is_digit(raw[i]) || raw[i] == '+' || raw[i] == '-' || raw[i] == '.')) {
      ++i;
    }
    if (i < raw.size() && raw[i] == ':') {
      std::string s(raw.substr(0, i));
      std::transform(s.begin(), s.end(), s.begin(), to_lower);
      parts.scheme = s;
      raw = raw.substr(i + 1);
    }
  }
  if (raw.rfind("//", 0) == 0) {
    raw = raw.substr(2);
    size_t end = raw.find_first_of("/?");
    parts.authority = std::string(raw.substr(0, end == std::string_view::npos ? raw.size() : end));
    raw = end == std::string_view::npos ? std::string_view{} : raw.substr(end);
  }
  if (auto q = raw.find('?'); q != std::string_view::npos) {
    parts.query = std::string(raw.substr(q + 1));
    raw = raw.substr(0, q);
  }
  parts.path = std::string(raw);
  return true;
}

bool parse_authority(std::string_view authority, const std::string& scheme, NormalizedUrl& out) {
  // userinfo is accepted and dropped
  if (auto at = authority.find_last_of('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  std::string host;
  std::string_view port_text;
  if (!authority.empty() && authority[0] == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return false;
    host = std::string(authority.substr(0, close + 1));
    auto rest = authority.substr(close + 1);
    if (!rest.empty()) {
      if (rest[0] != ':') return false;
      port_text = rest.substr(1);
    }
  } else {
    auto colon = authority.find(':');
    if (colon == std::string_view::npos) {
      host = std::string(authority);
    } else {
      host = std::string(authority.substr(0, colon));
      port_text = authority.substr(colon + 1);
    }
  }
  if (host.empty()) return false;
  for (char c : host) {
    if (c == ' ' || c == '\t' || c == '/' || c == '?' || c == '#' || c == '<' || c == '>') return false;
  }
  std::transform(host.begin(), host.end(), host.begin(), to_lower);
  out.host = host;

  if (port_text.empty()) {
    out.port = scheme == "https" ? 443 : 80;
  } else {
    long value = 0;
    for (char c : port_text) {
      if (!is_digit(c)) return false;
      value = value * 10 + (c - '0');
      if (value > 65535) return false;
    }
    out.port = static_cast<int>(value);
  }
  return true;
}

// RFC 3986 §5.2.3.
std::string merge_paths(const NormalizedUrl& base, const std::string& ref_path) {
  if (base.path.empty()) return "/" + ref_path;
  auto pos = base.path.find_last_of('/');
  return base.path.substr(0, pos + 1) + ref_path;
}

std::optional<NormalizedUrl> fail(UrlError* error, UrlError code) {
  if (error) *error = code;
  return std::nullopt;
}

} // namespace

std::string NormalizedUrl::authority() const {
  return host + ":" + std::to_string(port);
}

std::string NormalizedUrl::str() const {
  std::string out = scheme + "://" + host;
  if (!default_port()) {
    out += ':';
    out += std::to_string(port);
  }
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

std::optional<NormalizedUrl> normalize_url(const NormalizedUrl* base, std::string_view raw,
                                           UrlError* error) {
  if (error) *error = UrlError::none;

  // hrefs wrapped across source lines carry tabs/newlines that are not part
  // of the reference; surrounding spaces likewise.
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char c : raw) {
    if (c != '\t' && c != '\r' && c != '\n') cleaned += c;
  }
  size_t b = cleaned.find_first_not_of(' ');
  size_t e = cleaned.find_last_not_of(' ');
  if (b == std::string::npos) {
    cleaned.clear();
  } else {
    cleaned = cleaned.substr(b, e - b + 1);
  }

  RawParts parts;
  split_reference(cleaned, parts);

  NormalizedUrl out;

  if (parts.scheme) {
    if (*parts.scheme != "http" && *parts.scheme != "https") {
      return fail(error, UrlError::unsupported_scheme);
    }
    if (!parts.authority) {
      // "http:foo" and "http:" have no authority to talk to
      return fail(error, UrlError::invalid);
    }
    out.scheme = *parts.scheme;
    if (!parse_authority(*parts.authority, out.scheme, out)) {
      return fail(error, UrlError::invalid);
    }
    std::string path = parts.path.empty() ? "/" : parts.path;
    if (path[0] != '/') path = "/" + path;
    out.path = normalize_component(remove_dot_segments(path), path_char_allowed);
  } else if (parts.authority) {
    // scheme-relative: //host/path
    if (!base) return fail(error, UrlError::invalid);
    out.scheme = base->scheme;
    if (!parse_authority(*parts.authority, out.scheme, out)) {
      return fail(error, UrlError::invalid);
    }
    std::string path = parts.path.empty() ? "/" : parts.path;
    if (path[0] != '/') path = "/" + path;
    out.path = normalize_component(remove_dot_segments(path), path_char_allowed);
  } else {
    if (!base) return fail(error, UrlError::invalid);
    out.scheme = base->scheme;
    out.host = base->host;
    out.port = base->port;
    if (parts.path.empty()) {
      out.path = base->path;
      if (!parts.query) {
        out.query = base->query;
        return out; // same resource minus fragment
      }
    } else if (parts.path[0] == '/') {
      out.path = normalize_component(remove_dot_segments(parts.path), path_char_allowed);
    } else {
      out.path = normalize_component(remove_dot_segments(merge_paths(*base, parts.path)),
                                     path_char_allowed);
    }
  }

  if (out.path.empty()) out.path = "/";
  if (out.path[0] != '/') out.path = "/" + out.path;
  if (parts.query) out.query = normalize_component(*parts.query, query_char_allowed);
  return out;
}

Scope classify_scope(const NormalizedUrl& seed, const NormalizedUrl& target) {
  bool same = seed.scheme == target.scheme && seed.host == target.host && seed.port == target.port;
  return same ? Scope::internal : Scope::external;
}

const char* to_string(Scope s) {
  return s == Scope::internal ? "internal" : "external";
}

} // namespace sitecheck
