#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sitecheck/json_links.hpp>
#include <sitecheck/url.hpp>

#include "support/fixture_server.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

using namespace sitecheck;
using sitecheck::json::extract_urls;
using sitecheck::json::extract_urls_text;
using sitecheck::json::JsonUrlHit;
using testsupport::FixtureServer;

namespace fs = std::filesystem;

namespace {

const std::string kJsonRoot = std::string(SITECHECK_FIXTURES) + "/json";

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Independent route to the same answer: a regex over the raw bytes, with the
// same trailing-punctuation trim. Ignores JSON structure entirely.
std::vector<std::string> oracle_scan(const std::string& text) {
  static const std::regex kUrl(R"(https?://[A-Za-z0-9._~:/?#\[\]@!$&'()*+,;=%-]+)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kUrl);
       it != std::sregex_iterator(); ++it) {
    std::string m = it->str();
    size_t scheme = m.find("//") + 2;
    while (m.size() > scheme &&
           (m.back() == '.' || m.back() == ',' || m.back() == ';' || m.back() == ')' ||
            m.back() == ']')) {
      m.pop_back();
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> hit_texts(const std::vector<JsonUrlHit>& hits) {
  std::vector<std::string> out;
  for (const auto& h : hits) out.push_back(h.url_text);
  return out;
}

const JsonUrlHit* hit_at(const std::vector<JsonUrlHit>& hits, const std::string& pointer) {
  for (const auto& h : hits) {
    if (h.json_pointer == pointer) return &h;
  }
  return nullptr;
}

ProbePolicy fast_policy() {
  ProbePolicy p;
  p.timeout = 2.0;
  p.retries = 0;
  p.backoff = 0.0;
  return p;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sitecheck_json_" + std::to_string(::getpid()) + "_" + std::to_string(seq()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  void put(const std::string& rel, const std::string& content) const {
    fs::path p = path / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
  }
  static int& seq() {
    static int n = 0;
    return n;
  }
};

} // namespace

TEST_CASE("directory scan finds every json file in lexicographic order") {
  auto files = sitecheck::json::scan_json_dir(kJsonRoot);
  std::vector<std::string> expected = {
      kJsonRoot + "/bookmarks.json",        kJsonRoot + "/conferences.json",
      kJsonRoot + "/courses.json",          kJsonRoot + "/datasets.json",
      kJsonRoot + "/empty.json",            kJsonRoot + "/feeds.json",
      kJsonRoot + "/grants.json",           kJsonRoot + "/journals.json",
      kJsonRoot + "/malformed.json",        kJsonRoot + "/mirrors.json",
      kJsonRoot + "/nested/archive.json",   kJsonRoot + "/nested/deep/more.json",
      kJsonRoot + "/people.json",           kJsonRoot + "/punctuation.json",
      kJsonRoot + "/shared1.json",          kJsonRoot + "/shared2.json",
      kJsonRoot + "/shared3.json",          kJsonRoot + "/software.json",
      kJsonRoot + "/talks.json",            kJsonRoot + "/workshops.json",
  };
  CHECK(files == expected);
}

TEST_CASE("scanning a missing directory yields nothing") {
  CHECK(sitecheck::json::scan_json_dir("/no/such/dir").empty());
}

TEST_CASE("structured extraction agrees with the raw text oracle on every fixture") {
  for (const auto& file : sitecheck::json::scan_json_dir(kJsonRoot)) {
    CAPTURE(file);
    auto scan = extract_urls(file);
    bool parse_failed = false;
    for (const auto& f : scan.findings) {
      if (f.machine_code == code::kJsonParseError) parse_failed = true;
    }
    if (parse_failed) {
      CHECK(scan.hits.empty());
      continue;
    }
    auto expected = oracle_scan(slurp(file));
    auto actual = hit_texts(scan.hits);
    std::sort(expected.begin(), expected.end());
    std::sort(actual.begin(), actual.end());
    CHECK(actual == expected);
  }
}

TEST_CASE("conference data yields one hit per link with pointer and line") {
  auto scan = extract_urls(kJsonRoot + "/conferences.json");
  REQUIRE(scan.findings.empty());
  REQUIRE(scan.hits.size() == 7);

  const JsonUrlHit* first = hit_at(scan.hits, "/0/url");
  REQUIRE(first != nullptr);
  CHECK(first->url_text == "https://icps2019.example.org/program");
  CHECK(first->line == 5);

  const JsonUrlHit* prose = hit_at(scan.hits, "/0/notes");
  REQUIRE(prose != nullptr);
  CHECK(prose->url_text == "https://files.example.org/icps/talk.pdf");
  CHECK(prose->line == 6);

  const JsonUrlHit* nested = hit_at(scan.hits, "/2/materials/1");
  REQUIRE(nested != nullptr);
  CHECK(nested->url_text == "https://school.example.edu/compphys/day2.tar.gz");
  CHECK(nested->line == 19);
}

TEST_CASE("urls buried in prose lose their trailing punctuation") {
  auto scan = extract_urls(kJsonRoot + "/punctuation.json");
  REQUIRE(scan.findings.empty());
  auto texts = hit_texts(scan.hits);
  std::set<std::string> got(texts.begin(), texts.end());
  CHECK(got == std::set<std::string>{
                   "https://docs.example.org/intro",
                   "https://docs.example.org/setup",
                   "https://docs.example.org/faq",
                   "https://refs.example.org/1",
                   "https://refs.example.org/2",
                   "https://end.example.org/x",
                   "https://q.example.org/search?q=beam%20plasma&lang=en",
               });
  // three urls inside one prose sentence, each its own hit, same pointer
  int prose_hits = 0;
  for (const auto& h : scan.hits) {
    if (h.json_pointer == "/prose") ++prose_hits;
  }
  CHECK(prose_hits == 3);
}

TEST_CASE("only http and https schemes are extracted") {
  auto scan = extract_urls(kJsonRoot + "/people.json");
  REQUIRE(scan.findings.empty());
  auto texts = hit_texts(scan.hits);
  CHECK(texts == std::vector<std::string>{
                     "https://okafor.example.edu/~r/",
                     "http://lindqvist.example.se/",
                 });
}

TEST_CASE("a file that does not parse yields one finding and zero hits") {
  auto scan = extract_urls(kJsonRoot + "/malformed.json");
  CHECK(scan.hits.empty());
  REQUIRE(scan.findings.size() == 1);
  CHECK(scan.findings[0].machine_code == code::kJsonParseError);
  CHECK(scan.findings[0].severity == Severity::error);
  CHECK(scan.findings[0].location.file == kJsonRoot + "/malformed.json");
  CHECK(scan.findings[0].location.line == 5);
}

TEST_CASE("a file that cannot be read says so") {
  auto scan = extract_urls("/no/such/place/data.json");
  CHECK(scan.hits.empty());
  REQUIRE(scan.findings.size() == 1);
  CHECK(scan.findings[0].machine_code == code::kJsonUnreadable);
}

TEST_CASE("object keys are never scanned for urls") {
  auto scan = extract_urls_text(R"({"https://key.example.org/x": "plain text"})", "k.json");
  CHECK(scan.findings.empty());
  CHECK(scan.hits.empty());
}

TEST_CASE("escaped slashes in json decode before matching") {
  auto scan = extract_urls_text(R"({"u": "http:\/\/esc.example.org\/p"})", "e.json");
  REQUIRE(scan.hits.size() == 1);
  CHECK(scan.hits[0].url_text == "http://esc.example.org/p");
}

TEST_CASE("unicode escapes in the same string do not disturb the match") {
  auto scan = extract_urls_text(
      "{\n  \"note\": \"caf\\u00e9 menu at https://cafe.example.org/menu\"\n}", "u.json");
  REQUIRE(scan.hits.size() == 1);
  CHECK(scan.hits[0].url_text == "https://cafe.example.org/menu");
  CHECK(scan.hits[0].line == 2);
}

TEST_CASE("escaped newlines do not advance the reported line") {
  auto scan = extract_urls_text(
      "{\n  \"a\": \"one\\ntwo\",\n  \"b\": \"https://x.example.org/\"\n}", "n.json");
  REQUIRE(scan.hits.size() == 1);
  CHECK(scan.hits[0].line == 3);
}

TEST_CASE("pointer segments escape slash and tilde") {
  auto scan = extract_urls_text(R"({"a/b~c": "https://t.example.org/k"})", "p.json");
  REQUIRE(scan.hits.size() == 1);
  CHECK(scan.hits[0].json_pointer == "/a~1b~0c");
}

TEST_CASE("array nesting shows up as index segments") {
  auto scan = extract_urls_text(R"({"rows": [["https://m.example.org/1"]]})", "r.json");
  REQUIRE(scan.hits.size() == 1);
  CHECK(scan.hits[0].json_pointer == "/rows/0/0");
}

TEST_CASE("relative paths count only under url-ish keys and only when asked") {
  auto without = extract_urls(kJsonRoot + "/talks.json");
  CHECK(hit_texts(without.hits) == std::vector<std::string>{
                                       "https://media.example.org/shock.mp4",
                                       "https://host.example.net/seminar",
                                   });

  auto with = extract_urls(kJsonRoot + "/talks.json", true);
  auto texts = hit_texts(with.hits);
  std::set<std::string> got(texts.begin(), texts.end());
  CHECK(got == std::set<std::string>{
                   "talks/twostream.html",
                   "talks/shock.html",
                   "old/talks.html", // the archive_link key counts as url-ish
                   "https://media.example.org/shock.mp4",
                   "https://host.example.net/seminar",
               });
  // "speaker": "guest" must not appear: the key is not url-ish
  CHECK(got.count("guest") == 0);
}

TEST_CASE("relative detection never fires on values with a scheme separator") {
  auto scan =
      extract_urls_text(R"({"url": "weird://thing", "link": "  ", "href": "ok.html"})",
                        "rel.json", true);
  auto texts = hit_texts(scan.hits);
  CHECK(texts == std::vector<std::string>{"ok.html"});
}

TEST_CASE("checking a directory with no json files gives a clean empty report") {
  TempDir dir;
  Report report = sitecheck::json::check_json_links(dir.path.string(), fast_policy());
  CHECK(report.findings.empty());
  CHECK(report.urls.empty());
  CHECK(report.counts.at("json_files") == 0);
  CHECK(report.errors() == 0);
}

TEST_CASE("one dead link in one file becomes one finding") {
  FixtureServer srv;
  srv.text("/alive", "yes");
  TempDir dir;
  dir.put("links.json", "{\n  \"ok\": \"" + srv.url("/alive") + "\",\n  \"bad\": \"" +
                            srv.url("/dead") + "\"\n}\n");

  Report report = sitecheck::json::check_json_links(dir.path.string(), fast_policy());
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].machine_code == code::kLinkBroken);
  CHECK(report.findings[0].message.find("HTTP 404") != std::string::npos);
  CHECK(report.findings[0].location.file == (dir.path / "links.json").string());
  CHECK(report.findings[0].location.line == 3);
  CHECK(report.findings[0].location.detail == "/bad");
  CHECK(report.counts.at("json_files") == 1);
  CHECK(report.counts.at("url_hits") == 2);
  CHECK(report.errors() == 1);
}

TEST_CASE("the same url in three files is probed once and reported once") {
  FixtureServer srv;
  TempDir dir;
  std::string dead = srv.url("/shared-dead");
  dir.put("a.json", "{\"mirror\": \"" + dead + "\"}");
  dir.put("b.json", "{\"fallback\": \"" + dead + "\"}");
  dir.put("sub/c.json", "{\"where\": \"" + dead + "\"}");

  Report report = sitecheck::json::check_json_links(dir.path.string(), fast_policy());

  CHECK(srv.hits("/shared-dead") == 1);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].origins.size() == 3);
  // all three mentioning files are listed
  std::set<std::string> files;
  for (const auto& o : report.findings[0].origins) {
    files.insert(fs::path(o.file).filename().string());
  }
  CHECK(files == std::set<std::string>{"a.json", "b.json", "c.json"});
  CHECK(report.counts.at("url_hits") == 3);
  CHECK(report.counts.at("urls") == 1);
}

TEST_CASE("working urls produce no findings but are listed in the report") {
  FixtureServer srv;
  srv.text("/a", "a");
  srv.text("/b", "b");
  TempDir dir;
  dir.put("x.json", "[\"" + srv.url("/a") + "\", \"" + srv.url("/b") + "\"]");

  Report report = sitecheck::json::check_json_links(dir.path.string(), fast_policy());
  CHECK(report.findings.empty());
  CHECK(report.urls.size() == 2);
  for (const auto& u : report.urls) CHECK(u.status.is_ok());
}

TEST_CASE("relative entries resolve against the base and get probed") {
  FixtureServer srv;
  srv.html("/talks/2023.html", "<p>slides</p>");
  TempDir dir;
  dir.put("talks.json",
          "{\"talks\": [{\"url\": \"talks/2023.html\"}, {\"url\": \"talks/gone.html\"}]}");

  auto base = normalize_url(nullptr, srv.base() + "/");
  REQUIRE(base.has_value());
  Report report =
      sitecheck::json::check_json_links(dir.path.string(), fast_policy(), &*base);

  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].message.find("talks/gone.html") != std::string::npos);
  CHECK(report.findings[0].location.detail == "/talks/1/url");
  CHECK(srv.hits("/talks/2023.html") == 1);
}

TEST_CASE("a matched string that is not a real url is reported as invalid") {
  TempDir dir;
  dir.put("bad.json", "{\"u\": \"http://h:99999999/\"}");
  Report report = sitecheck::json::check_json_links(dir.path.string(), fast_policy());
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].machine_code == code::kLinkBroken);
  CHECK(report.findings[0].message.find("invalid URL") != std::string::npos);
}

TEST_CASE("a malformed file surfaces in the directory report but stops nothing") {
  FixtureServer srv;
  srv.text("/fine", "ok");
  TempDir dir;
  dir.put("good.json", "{\"url\": \"" + srv.url("/fine") + "\"}");
  dir.put("broken.json", "{\"oops\": }");

  Report report = sitecheck::json::check_json_links(dir.path.string(), fast_policy());
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].machine_code == code::kJsonParseError);
  CHECK(srv.hits("/fine") == 1); // the good file was still checked
}
