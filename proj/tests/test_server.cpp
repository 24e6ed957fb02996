#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sitecheck/probe.hpp>
#include <sitecheck/server.hpp>
#include <sitecheck/url.hpp>

#include "support/fixture_server.hpp"

#include <filesystem>
#include <fstream>
#include <string>

using namespace sitecheck;
namespace fs = std::filesystem;

namespace {

ProbePolicy fast_policy() {
  ProbePolicy p;
  p.timeout = 2.0;
  p.retries = 0;
  p.backoff = 0.0;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void put(const fs::path& p, const std::string& bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// A throwaway directory tree with one file of each interesting kind.
struct TempSite {
  fs::path root;

  TempSite() {
    root = fs::temp_directory_path() /
           ("sitecheck_srv_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    put(root / "index.html", "<!DOCTYPE html><html><body><h1>home</h1></body></html>\n");
    put(root / "nav.html", "<!DOCTYPE html><html><body><ul><li>a</li></ul></body></html>\n");
    put(root / "assets" / "style.css", "body { margin: 0; }\n");
    put(root / "assets" / "app.js", "console.log('hi');\n");
    put(root / "data" / "links.json", "{\"url\": \"https://example.org/\"}\n");
    put(root / "feed.xml", "<feed><item>one</item></feed>\n");
    put(root / "blob.bin", std::string("\x00\x01\x02\xff", 4));
    put(root / "notes.txt", "plain text\n");
    put(root / "logo.svg", "<svg xmlns=\"http://www.w3.org/2000/svg\"></svg>\n");
  }
  ~TempSite() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }

  static int& counter() {
    static int n = 0;
    return n;
  }
};

NormalizedUrl parse(const std::string& raw) {
  UrlError err;
  auto u = normalize_url(nullptr, raw, &err);
  REQUIRE(u.has_value());
  return *u;
}

} // namespace

TEST_CASE("every file is served back byte for byte") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  for (auto& entry : fs::recursive_directory_iterator(site.root)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), site.root).generic_string();
    auto r = fetch(parse(srv->base_url() + "/" + rel), fast_policy());
    CAPTURE(rel);
    CHECK(r.status.is_ok());
    CHECK(r.body == slurp(entry.path()));
  }
}

TEST_CASE("content types follow the file extension") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  auto type_of = [&](const std::string& path) {
    auto r = fetch(parse(srv->base_url() + path), fast_policy());
    REQUIRE(r.status.is_ok());
    return r.content_type.substr(0, r.content_type.find(';'));
  };

  CHECK(type_of("/index.html") == "text/html");
  CHECK(type_of("/assets/style.css") == "text/css");
  CHECK(type_of("/assets/app.js") == "text/javascript");
  CHECK(type_of("/data/links.json") == "application/json");
  CHECK(type_of("/feed.xml") == "application/xml");
  CHECK(type_of("/notes.txt") == "text/plain");
  CHECK(type_of("/logo.svg") == "image/svg+xml");
  CHECK(type_of("/blob.bin") == "application/octet-stream");
}

TEST_CASE("missing files produce 404") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  auto st = probe(parse(srv->base_url() + "/never-wrote-this.html"), fast_policy());
  CHECK(st.is_broken());
  CHECK(st.http_status == 404);
}

TEST_CASE("the root path serves index.html") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  auto r = fetch(parse(srv->base_url() + "/"), fast_policy());
  CHECK(r.status.is_ok());
  CHECK(r.body == slurp(site.root / "index.html"));
}

TEST_CASE("a directory without an index is a 404") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  auto st = probe(parse(srv->base_url() + "/assets/"), fast_policy());
  CHECK(st.is_broken());
  CHECK(st.http_status == 404);
}

TEST_CASE("path traversal is refused outright") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  auto reply = testsupport::raw_request(srv->port(), "GET /../outside.txt HTTP/1.1");
  CHECK(reply.find("403") != std::string::npos);

  // percent encoding must not smuggle the dots past the check
  auto encoded = testsupport::raw_request(srv->port(), "GET /%2e%2e/outside.txt HTTP/1.1");
  CHECK(encoded.find("403") != std::string::npos);

  auto nested = testsupport::raw_request(srv->port(), "GET /assets/../../outside.txt HTTP/1.1");
  CHECK(nested.find("403") != std::string::npos);
}

TEST_CASE("two servers on the same tree get distinct ports") {
  TempSite site;
  auto a = StaticServer::start(site.root.string());
  auto b = StaticServer::start(site.root.string());
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->port() != b->port());

  CHECK(probe(parse(a->base_url() + "/"), fast_policy()).is_ok());
  CHECK(probe(parse(b->base_url() + "/"), fast_policy()).is_ok());
}

TEST_CASE("a stopped server no longer answers") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());
  int port = srv->port();
  srv->stop();

  auto st = probe(parse("http://127.0.0.1:" + std::to_string(port) + "/"), fast_policy());
  CHECK(st.is_broken());
  CHECK(st.broken_reason == BrokenReason::connection_failed);
}

TEST_CASE("head requests work so probes stay cheap") {
  TempSite site;
  auto srv = StaticServer::start(site.root.string());
  REQUIRE(srv.has_value());

  auto st = probe(parse(srv->base_url() + "/index.html"), fast_policy());
  CHECK(st.is_ok());
  CHECK(st.http_status == 200);
}

TEST_CASE("starting on a missing directory fails cleanly") {
  auto srv = StaticServer::start("/no/such/tree/anywhere");
  CHECK(!srv.has_value());
}
