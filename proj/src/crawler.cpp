#include "sitecheck/crawler.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <sstream>
#include <thread>

#include "sitecheck/glob.hpp"
#include "sitecheck/html.hpp"
#include "sitecheck/version.hpp"

namespace sitecheck {

namespace {

bool is_html_type(const std::string& content_type) {
  std::string t = content_type.substr(0, content_type.find(';'));
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return t == "text/html" || t == "application/xhtml+xml";
}

bool matches_exclude(const NormalizedUrl& url, const std::vector<std::string>& patterns) {
  std::string s = url.str();
  for (const auto& p : patterns) {
    bool as_glob = p.find_first_of("*?") != std::string::npos;
    if (as_glob ? glob_match(p, s) : s.find(p) != std::string::npos) return true;
  }
  return false;
}

// Disallow prefixes for user-agent * (or this tool's own token).
std::vector<std::string> parse_robots(const std::string& body) {
  std::vector<std::string> out;
  std::istringstream in(body);
  std::string line;
  bool applies = false;
  bool reading_agents = false;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line.erase(0, start);
    size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::string value = line.substr(colon + 1);
    if (size_t v = value.find_first_not_of(" \t"); v != std::string::npos) {
      value.erase(0, v);
    } else {
      value.clear();
    }
    if (key == "user-agent") {
      if (!reading_agents) applies = false; // a new group starts
      reading_agents = true;
      if (value == "*" || value == "sitecheck") applies = true;
    } else {
      reading_agents = false;
      if (key == "disallow" && applies && !value.empty()) out.push_back(value);
    }
  }
  return out;
}

struct Task {
  NormalizedUrl url;
  int depth = 0;
  Scope scope = Scope::internal;
};

// Targets that never became a NormalizedUrl (mailto:, malformed references):
// tracked by their raw text.
struct TextualTarget {
  CheckStatus status;
  std::vector<SourceLocation> origins;
};

class CrawlRun {
 public:
  CrawlRun(const NormalizedUrl& seed, const CrawlOptions& options)
      : seed_(seed), options_(options) {}

  Report run(CrawlState* state_out) {
    Report report;
    report.tool_version = kToolVersion;
    report.started = current_timestamp();

    {
      std::lock_guard<std::mutex> lk(mu_);
      visited_.insert(seed_);
      queue_.push_back({seed_, 0, Scope::internal});
    }
    int n = std::max(1, options_.concurrency);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back([this] { worker(); });
    for (auto& t : pool) t.join();

    report.finished = current_timestamp();
    assemble(report);
    if (state_out) {
      state_out->visited = visited_;
      state_out->results = results_;
      state_out->origins = origins_;
      state_out->pages_parsed = pages_parsed_;
    }
    return report;
  }

 private:
  void worker() {
    std::unique_lock<std::mutex> lk(mu_);
    for (;;) {
      auto it = std::find_if(queue_.begin(), queue_.end(), [&](const Task& t) {
        return host_active_[t.url.authority()] < options_.per_host_concurrency;
      });
      if (it == queue_.end()) {
        if (queue_.empty() && in_flight_ == 0) {
          cv_.notify_all();
          return;
        }
        cv_.wait(lk);
        continue;
      }
      Task task = std::move(*it);
      queue_.erase(it);
      ++host_active_[task.url.authority()];
      ++in_flight_;
      lk.unlock();

      process(task);

      lk.lock();
      --host_active_[task.url.authority()];
      --in_flight_;
      cv_.notify_all();
    }
  }

  void process(const Task& task) {
    {
      // a redirect from another page may have landed here already
      std::lock_guard<std::mutex> lk(mu_);
      if (results_.count(task.url)) return;
    }
    if (options_.respect_robots && task.depth > 0 && robots_disallows(task.url)) {
      record(task.url, CheckStatus::skipped(SkipReason::excluded_by_pattern));
      return;
    }
    if (task.scope == Scope::external) {
      record(task.url, probe(task.url, options_.probe_policy));
      return;
    }
    const NormalizedUrl* stay = options_.check_external ? nullptr : &seed_;
    FetchResult r = fetch(task.url, options_.probe_policy, stay);
    bool parse = r.status.is_ok() && is_html_type(r.content_type) &&
                 classify_scope(seed_, r.final_url) == Scope::internal;
    if (!parse) {
      record(task.url, std::move(r.status));
      return;
    }
    auto doc = html::parse_document(r.body, task.url.str());
    auto extracted = html::extract_links(doc, r.final_url, &seed_);
    absorb(task, r.final_url, std::move(extracted), std::move(r.status));
  }

  void record(const NormalizedUrl& url, CheckStatus status) {
    std::lock_guard<std::mutex> lk(mu_);
    results_[url] = std::move(status);
  }

  void absorb(const Task& task, const NormalizedUrl& final_url, html::ExtractResult extracted,
              CheckStatus status) {
    std::lock_guard<std::mutex> lk(mu_);
    ++pages_parsed_;
    link_records_ += static_cast<int>(extracted.links.size());
    int final_status = status.http_status;
    results_[task.url] = std::move(status);
    if (!(final_url == task.url)) {
      // the redirect target was already downloaded as part of this fetch;
      // a later direct link to it must not fetch it again
      visited_.insert(final_url);
      results_.try_emplace(final_url, CheckStatus::ok(final_status));
    }

    int next_depth = task.depth + 1;
    bool depth_ok = !options_.max_depth || next_depth <= *options_.max_depth;
    for (auto& rec : extracted.links) {
      NormalizedUrl target = rec.target;
      Scope scope = rec.scope;
      origins_[target].push_back(std::move(rec));
      if (!depth_ok) continue;
      if (visited_.count(target)) continue;
      if (static_cast<int>(visited_.size()) >= options_.max_pages) continue;
      visited_.insert(target);
      if (matches_exclude(target, options_.exclude_patterns)) {
        results_[target] = CheckStatus::skipped(SkipReason::excluded_by_pattern);
        continue;
      }
      if (scope == Scope::external && !options_.check_external) {
        results_[target] = CheckStatus::skipped(SkipReason::external_not_checked);
        continue;
      }
      queue_.push_back({std::move(target), next_depth, scope});
    }
    for (auto& issue : extracted.issues) {
      auto& t = textual_[issue.raw];
      t.status = issue.kind == html::LinkIssue::Kind::unsupported_scheme
                     ? CheckStatus::skipped(SkipReason::scheme_unsupported)
                     : CheckStatus::broken(BrokenReason::invalid_url);
      t.origins.push_back(std::move(issue.origin));
    }
    cv_.notify_all();
  }

  bool robots_disallows(const NormalizedUrl& url) {
    std::lock_guard<std::mutex> lk(robots_mu_);
    auto it = robots_.find(url.authority());
    if (it == robots_.end()) {
      std::vector<std::string> rules;
      auto robots_url =
          normalize_url(nullptr, url.scheme + "://" + url.authority() + "/robots.txt");
      if (robots_url) {
        FetchResult r = fetch(*robots_url, options_.probe_policy);
        if (r.status.is_ok()) rules = parse_robots(r.body);
      }
      it = robots_.emplace(url.authority(), std::move(rules)).first;
    }
    for (const auto& prefix : it->second) {
      if (url.path.rfind(prefix, 0) == 0) return true;
    }
    return false;
  }

  void assemble(Report& report) {
    report.counts["pages"] = pages_parsed_;
    report.counts["urls"] = static_cast<int>(results_.size() + textual_.size());
    report.counts["links"] = link_records_;

    for (const auto& [url, status] : results_) {
      report.urls.push_back({url.str(), status});
      if (!status.is_broken()) continue;
      Finding f;
      f.check = CheckKind::link;
      f.severity = Severity::error;
      for (const auto& rec : origins_[url]) f.origins.push_back(rec.origin);
      std::sort(f.origins.begin(), f.origins.end());
      f.origins.erase(std::unique(f.origins.begin(), f.origins.end()), f.origins.end());
      if (url == seed_) {
        f.machine_code = code::kLinkSeedUnreachable;
        f.location = {url.str(), 0, 0, "seed"};
        f.message = "seed " + url.str() + " " + status.describe();
      } else {
        f.machine_code = code::kLinkBroken;
        f.location = f.origins.empty() ? SourceLocation{url.str(), 0, 0, {}} : f.origins.front();
        f.message = url.str() + " " + status.describe();
      }
      report.add(std::move(f));
    }
    for (const auto& [raw, target] : textual_) {
      report.urls.push_back({raw, target.status});
      if (!target.status.is_broken()) continue;
      Finding f;
      f.check = CheckKind::link;
      f.severity = Severity::error;
      f.machine_code = code::kLinkBroken;
      f.origins = target.origins;
      std::sort(f.origins.begin(), f.origins.end());
      f.origins.erase(std::unique(f.origins.begin(), f.origins.end()), f.origins.end());
      f.location = f.origins.empty() ? SourceLocation{raw, 0, 0, {}} : f.origins.front();
      f.message = raw + " " + target.status.describe();
      report.add(std::move(f));
    }
    report.finalize();
  }

  const NormalizedUrl seed_;
  const CrawlOptions options_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Task> queue_;
  std::set<NormalizedUrl> visited_;
  std::map<NormalizedUrl, CheckStatus> results_;
  std::map<NormalizedUrl, std::vector<LinkRecord>> origins_;
  std::map<std::string, TextualTarget> textual_;
  std::map<std::string, int> host_active_;
  int in_flight_ = 0;
  int pages_parsed_ = 0;
  int link_records_ = 0;

  std::mutex robots_mu_;
  std::map<std::string, std::vector<std::string>> robots_;
};

} // namespace

Report crawl(const NormalizedUrl& seed, const CrawlOptions& options, CrawlState* state_out) {
  return CrawlRun(seed, options).run(state_out);
}

Report merge_reports(const std::vector<Report>& reports) {
  Report out;
  for (const auto& r : reports) {
    out.findings.insert(out.findings.end(), r.findings.begin(), r.findings.end());
    out.urls.insert(out.urls.end(), r.urls.begin(), r.urls.end());
    for (const auto& [key, n] : r.counts) out.counts[key] += n;
    if (out.tool_version.empty()) out.tool_version = r.tool_version;
    if (!r.started.empty() && (out.started.empty() || r.started < out.started)) {
      out.started = r.started;
    }
    if (!r.finished.empty() && (out.finished.empty() || r.finished > out.finished)) {
      out.finished = r.finished;
    }
  }
  out.finalize();
  return out;
}

} // namespace sitecheck
