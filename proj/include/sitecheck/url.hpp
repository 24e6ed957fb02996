// URL normalization and scope classification. Normalized URLs are the
// canonical keys for the crawl frontier, result maps and reports.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sitecheck {

// Canonical absolute http(s) URL. Scheme and host are lowercased, the port
// is always filled in (80/443 when the input had none), the path is
// dot-segment free and percent-normalized, and fragments are gone.
struct NormalizedUrl {
  std::string scheme;               // "http" or "https"
  std::string host;                 // lowercase name, IP, or "[v6]"
  int port = 0;                     // explicit, default-filled
  std::string path;                 // absolute, "/" at minimum
  std::optional<std::string> query; // without the '?'

  bool default_port() const {
    return (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  }

  // "host:port", the per-site identity used for scope and politeness caps.
  std::string authority() const;

  // scheme "://" host [":" port if non-default] path ["?" query].
  // Two NormalizedUrls are equal iff these strings are byte-equal.
  std::string str() const;

  friend bool operator==(const NormalizedUrl&, const NormalizedUrl&) = default;
  friend auto operator<=>(const NormalizedUrl&, const NormalizedUrl&) = default;
};

enum class UrlError {
  none,
  invalid,            // syntactically unusable
  unsupported_scheme, // absolute but not http/https (mailto:, javascript:, ...)
};

// RFC 3986-style resolution of `raw` against `base` (required when `raw` is
// relative), followed by normalization. Returns nullopt and sets *error on
// failure; unsupported absolute schemes are distinguished so callers can map
// them to Skipped rather than Broken.
std::optional<NormalizedUrl> normalize_url(const NormalizedUrl* base, std::string_view raw,
                                           UrlError* error = nullptr);

enum class Scope { internal, external };

// internal iff (scheme, host, port) match the seed's.
Scope classify_scope(const NormalizedUrl& seed, const NormalizedUrl& target);

const char* to_string(Scope s);

} // namespace sitecheck

template <> struct std::hash<sitecheck::NormalizedUrl> {
  size_t operator()(const sitecheck::NormalizedUrl& u) const {
    return std::hash<std::string>{}(u.str());
  }
};
