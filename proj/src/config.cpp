#include "sitecheck/config.hpp"

#include <json.hpp>

#include <fstream>

namespace sitecheck {

namespace {

using nlohmann::json;

bool expect_number(const json& v, const char* key, std::string* error) {
  if (v.is_number()) return true;
  *error = std::string("config key \"") + key + "\" must be a number";
  return false;
}

bool expect_bool(const json& v, const char* key, std::string* error) {
  if (v.is_boolean()) return true;
  *error = std::string("config key \"") + key + "\" must be true or false";
  return false;
}

} // namespace

ToolConfig builtin_config() {
  ToolConfig c;
  c.crawl.probe_policy = default_probe_policy();
  return c;
}

ToolConfig load_config(const std::string& path, std::string* error) {
  ToolConfig config = builtin_config();
  error->clear();

  std::ifstream in(path, std::ios::binary);
  if (!in) return config; // no file, no problem

  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    *error = path + " is not valid JSON";
    return config;
  }
  if (!doc.is_object()) {
    *error = path + " must hold a JSON object";
    return config;
  }

  for (const auto& [key, value] : doc.items()) {
    if (key == "timeout") {
      if (!expect_number(value, "timeout", error)) return config;
      config.crawl.probe_policy.timeout = value.get<double>();
    } else if (key == "retries") {
      if (!expect_number(value, "retries", error)) return config;
      config.crawl.probe_policy.retries = value.get<int>();
    } else if (key == "backoff") {
      if (!expect_number(value, "backoff", error)) return config;
      config.crawl.probe_policy.backoff = value.get<double>();
    } else if (key == "redirect_limit") {
      if (!expect_number(value, "redirect_limit", error)) return config;
      config.crawl.probe_policy.redirect_limit = value.get<int>();
    } else if (key == "external") {
      if (!expect_bool(value, "external", error)) return config;
      config.crawl.check_external = value.get<bool>();
    } else if (key == "max_pages") {
      if (!expect_number(value, "max_pages", error)) return config;
      config.crawl.max_pages = value.get<int>();
    } else if (key == "max_depth") {
      if (!expect_number(value, "max_depth", error)) return config;
      config.crawl.max_depth = value.get<int>();
    } else if (key == "concurrency") {
      if (!expect_number(value, "concurrency", error)) return config;
      config.crawl.concurrency = value.get<int>();
    } else if (key == "per_host_concurrency") {
      if (!expect_number(value, "per_host_concurrency", error)) return config;
      config.crawl.per_host_concurrency = value.get<int>();
    } else if (key == "exclude") {
      if (!value.is_array()) {
        *error = "config key \"exclude\" must be an array of strings";
        return config;
      }
      for (const auto& item : value) {
        if (!item.is_string()) {
          *error = "config key \"exclude\" must be an array of strings";
          return config;
        }
        config.crawl.exclude_patterns.push_back(item.get<std::string>());
      }
    } else if (key == "respect_robots") {
      if (!expect_bool(value, "respect_robots", error)) return config;
      config.crawl.respect_robots = value.get<bool>();
    } else if (key == "format") {
      if (!value.is_string()) {
        *error = "config key \"format\" must be text, json or github";
        return config;
      }
      auto f = parse_format(value.get<std::string>());
      if (!f) {
        *error = "config key \"format\" must be text, json or github";
        return config;
      }
      config.format = *f;
    } else if (key == "strict") {
      if (!expect_bool(value, "strict", error)) return config;
      config.strict = value.get<bool>();
    } else {
      *error = "unknown config key \"" + key + "\" in " + path;
      return config;
    }
  }
  return config;
}

} // namespace sitecheck
