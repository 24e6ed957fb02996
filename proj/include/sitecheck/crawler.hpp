// Breadth-first site crawl: internal HTML pages are fetched once with GET
// and parsed for further links; everything else discovered is probed once.
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sitecheck/model.hpp"
#include "sitecheck/probe.hpp"
#include "sitecheck/url.hpp"

namespace sitecheck {

struct CrawlOptions {
  bool check_external = false;
  int max_pages = 10000;
  std::optional<int> max_depth; // unset = unlimited; 0 = seed only
  int concurrency = 8;
  int per_host_concurrency = 2;
  // A pattern containing '*' or '?' is matched fnmatch-style against the
  // whole normalized URL; otherwise it is a substring test.
  std::vector<std::string> exclude_patterns;
  bool respect_robots = false;
  ProbePolicy probe_policy = default_probe_policy();
};

// Final crawl bookkeeping, exposed for tests and the reachability oracle.
struct CrawlState {
  std::set<NormalizedUrl> visited; // enqueued at least once
  std::map<NormalizedUrl, CheckStatus> results;
  std::map<NormalizedUrl, std::vector<LinkRecord>> origins;
  int pages_parsed = 0;
};

Report crawl(const NormalizedUrl& seed, const CrawlOptions& options,
             CrawlState* state_out = nullptr);

// Concatenates findings and url outcomes, sums counts, keeps the widest
// started/finished window, and re-sorts.
Report merge_reports(const std::vector<Report>& reports);

} // namespace sitecheck
