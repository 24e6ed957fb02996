// Loopback static file server, so a working tree can be crawled before it is
// deployed anywhere.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sitecheck/crawler.hpp"

namespace sitecheck {

class StaticServer {
 public:
  // port 0 asks the OS for an ephemeral port. Returns nothing when the port
  // cannot be bound.
  static std::optional<StaticServer> start(const std::string& root, int port = 0,
                                           const std::string& bind_host = "127.0.0.1");

  StaticServer(StaticServer&&) noexcept;
  StaticServer& operator=(StaticServer&&) noexcept;
  ~StaticServer();

  int port() const;
  std::string base_url() const; // "http://127.0.0.1:<port>"
  const std::string& root() const;

  // Blocks until no request is in flight; afterwards connections are refused.
  void stop();

 private:
  StaticServer();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Serves root on an ephemeral port, crawls it seeded at
// http://127.0.0.1:<port><seed_path>, then rewrites the server's base URL
// back to on-disk paths in every finding and url outcome, so the report
// reads in working-tree terms and is stable across runs.
Report serve_and_crawl(const std::string& root, const std::string& seed_path,
                       const CrawlOptions& options, CrawlState* state_out = nullptr);

} // namespace sitecheck
