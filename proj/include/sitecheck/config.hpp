// Tool configuration: built-in defaults, optional ./sitecheck.json file,
// SITECHECK_TIMEOUT env var. Command-line flags override all of it; the
// precedence is flag > config file > environment > built-in.
#pragma once

#include <optional>
#include <string>

#include "sitecheck/crawler.hpp"
#include "sitecheck/probe.hpp"
#include "sitecheck/report.hpp"

namespace sitecheck {

struct ToolConfig {
  CrawlOptions crawl;        // includes the probe policy
  OutputFormat format = OutputFormat::text;
  bool strict = false;       // promote warnings to errors
};

// Defaults with the environment applied (no file I/O).
ToolConfig builtin_config();

// builtin_config() overlaid with the JSON file at path, when it exists.
// A missing file is not an error. A malformed file or an unknown key sets
// *error and returns the defaults; the caller decides to stop (usage error).
//
// Recognized keys: timeout, retries, backoff, redirect_limit, external,
// max_pages, max_depth, concurrency, per_host_concurrency, exclude,
// respect_robots, format, strict.
ToolConfig load_config(const std::string& path, std::string* error);

} // namespace sitecheck
