#include "sitecheck/server.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "sitecheck/version.hpp"

namespace fs = std::filesystem;

namespace sitecheck {

namespace {

const std::string& content_type_for(const fs::path& p) {
  static const std::map<std::string, std::string> kTypes = {
      {".html", "text/html"},       {".htm", "text/html"},
      {".css", "text/css"},         {".js", "text/javascript"},
      {".json", "application/json"}, {".xml", "application/xml"},
      {".png", "image/png"},        {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"},      {".svg", "image/svg+xml"},
      {".ico", "image/x-icon"},     {".txt", "text/plain"},
  };
  static const std::string kFallback = "application/octet-stream";
  auto it = kTypes.find(p.extension().string());
  return it == kTypes.end() ? kFallback : it->second;
}

bool has_traversal(const std::string& url_path) {
  size_t pos = 0;
  while (pos <= url_path.size()) {
    size_t slash = url_path.find('/', pos);
    std::string seg = url_path.substr(pos, slash == std::string::npos ? std::string::npos
                                                                      : slash - pos);
    if (seg == "..") return true;
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  return false;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

} // namespace

struct StaticServer::Impl {
  httplib::Server server;
  std::thread thread;
  std::string root;
  std::string host;
  int port = 0;
  bool running = false;
};

StaticServer::StaticServer() = default;
StaticServer::StaticServer(StaticServer&&) noexcept = default;
StaticServer& StaticServer::operator=(StaticServer&&) noexcept = default;

StaticServer::~StaticServer() {
  if (impl_) stop();
}

std::optional<StaticServer> StaticServer::start(const std::string& root, int port,
                                                const std::string& bind_host) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return std::nullopt;

  StaticServer s;
  s.impl_ = std::make_unique<Impl>();
  Impl* impl = s.impl_.get();
  impl->root = root;
  impl->host = bind_host;

  impl->server.Get(".*", [impl](const httplib::Request& req, httplib::Response& res) {
    if (has_traversal(req.path)) {
      res.status = 403;
      res.set_content("forbidden\n", "text/plain");
      return;
    }
    fs::path target = fs::path(impl->root) / req.path.substr(1);
    std::error_code ec;
    if (fs::is_directory(target, ec)) target /= "index.html";
    std::ifstream in(target, std::ios::binary);
    if (!in) {
      res.status = 404;
      res.set_content("not found\n", "text/plain");
      return;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    res.status = 200;
    res.set_content(buf.str(), content_type_for(target));
  });

  if (port == 0) {
    impl->port = impl->server.bind_to_any_port(bind_host);
    if (impl->port <= 0) return std::nullopt;
  } else {
    if (!impl->server.bind_to_port(bind_host, port)) return std::nullopt;
    impl->port = port;
  }
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
  impl->running = true;
  return s;
}

int StaticServer::port() const { return impl_->port; }

std::string StaticServer::base_url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

const std::string& StaticServer::root() const { return impl_->root; }

void StaticServer::stop() {
  if (!impl_->running) return;
  impl_->server.stop();
  impl_->thread.join();
  impl_->running = false;
}

Report serve_and_crawl(const std::string& root, const std::string& seed_path,
                       const CrawlOptions& options, CrawlState* state_out) {
  auto server = StaticServer::start(root);
  if (!server) {
    Report report;
    report.tool_version = kToolVersion;
    report.started = report.finished = current_timestamp();
    Finding f;
    f.check = CheckKind::link;
    f.severity = Severity::error;
    f.location = {root, 0, 0, "seed"};
    f.machine_code = code::kLinkSeedUnreachable;
    f.message = "could not bind a local server for " + root;
    report.add(std::move(f));
    report.finalize();
    return report;
  }

  std::string path = seed_path.empty() ? "/index.html" : seed_path;
  if (path[0] != '/') path.insert(path.begin(), '/');
  auto seed = normalize_url(nullptr, server->base_url() + path);
  Report report = crawl(*seed, options, state_out);
  server->stop();

  // the ephemeral port must not leak into the report: rewrite the served
  // base back to the on-disk tree so output is stable across runs
  std::string display_root = root;
  while (display_root.size() > 1 && display_root.back() == '/') display_root.pop_back();
  const std::string base = server->base_url();
  for (auto& f : report.findings) {
    replace_all(f.location.file, base, display_root);
    for (auto& o : f.origins) replace_all(o.file, base, display_root);
    replace_all(f.message, base, display_root);
  }
  for (auto& u : report.urls) replace_all(u.url, base, display_root);
  report.finalize();
  return report;
}

} // namespace sitecheck
