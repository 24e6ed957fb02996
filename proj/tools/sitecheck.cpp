// sitecheck: link, HTML, JSON and XML checks for static sites, plus the
// embedded server and CI scaffolding that make them runnable before deploy.
#include <CLI11.hpp>

#include <sitecheck/config.hpp>
#include <sitecheck/crawler.hpp>
#include <sitecheck/html.hpp>
#include <sitecheck/json_links.hpp>
#include <sitecheck/probe.hpp>
#include <sitecheck/report.hpp>
#include <sitecheck/server.hpp>
#include <sitecheck/version.hpp>
#include <sitecheck/xml_subset.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace sitecheck;

namespace {

constexpr const char* kDefaultConfigPath = "./sitecheck.json";

// The config path has to be known before option defaults are bound, so it is
// pulled out of argv ahead of the real parse (which still consumes the flag).
std::string config_path_from_argv(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return kDefaultConfigPath;
}

struct OutputFlags {
  std::string format_name = "text";
  bool strict = false;
  bool no_timestamps = false;
};

void add_output_flags(CLI::App* cmd, OutputFlags& out) {
  cmd->add_option("--format", out.format_name, "Output format")
      ->check(CLI::IsMember({"text", "json", "github"}))
      ->capture_default_str();
  cmd->add_flag("--strict", out.strict, "Treat warnings as errors");
  cmd->add_flag("--no-timestamps", out.no_timestamps,
                "Omit run timestamps from JSON output");
}

int emit(Report report, const OutputFlags& out) {
  if (out.strict) promote_warnings(report);
  auto format = parse_format(out.format_name);
  std::cout << render(report, *format, !out.no_timestamps);
  return exit_code(report);
}

std::vector<std::string> html_files_under(const std::string& root) {
  std::vector<std::string> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end;
       it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file()) continue;
    std::string ext = it->path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".html" || ext == ".htm") files.push_back(it->path().generic_string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int run_html(const std::string& dir, const std::vector<std::string>& allow,
             const OutputFlags& out) {
  html::HtmlRuleSet rules;
  rules.disabled.insert(allow.begin(), allow.end());

  Report report;
  report.tool_version = kToolVersion;
  report.started = current_timestamp();
  auto files = html_files_under(dir);
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      std::cerr << "sitecheck: cannot read " << file << "\n";
      return 2;
    }
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    auto doc = html::parse_document(bytes, file);
    for (auto& finding : html::validate_structure(doc, rules)) {
      report.add(std::move(finding));
    }
  }
  report.counts["html_files"] = static_cast<int>(files.size());
  report.finished = current_timestamp();
  report.finalize();
  return emit(std::move(report), out);
}

std::atomic<bool> g_stop{false};

void handle_stop(int) { g_stop = true; }

int run_serve(const std::string& dir, int port) {
  auto server = StaticServer::start(dir, port);
  if (!server) {
    std::cerr << "sitecheck: cannot serve " << dir
              << (port ? " on port " + std::to_string(port) : "") << "\n";
    return 2;
  }
  std::cout << "serving " << dir << " at " << server->base_url() << std::endl;
  std::signal(SIGINT, handle_stop);
  std::signal(SIGTERM, handle_stop);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server->stop();
  return 0;
}

int run_ci_init(const std::string& kind, const std::string& schedule,
                const std::string& out_path) {
  auto text = scaffold_workflow(kind, schedule);
  if (!text) {
    std::cerr << "sitecheck: unknown workflow kind or bad schedule: " << kind
              << (schedule.empty() ? "" : " " + schedule) << "\n";
    return 2;
  }
  if (out_path.empty()) {
    std::cout << *text;
    return 0;
  }
  fs::path p(out_path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream file(p);
  if (!file) {
    std::cerr << "sitecheck: cannot write " << out_path << "\n";
    return 2;
  }
  file << *text;
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  std::string config_path = config_path_from_argv(argc, argv);
  bool config_explicit = config_path != kDefaultConfigPath;
  if (config_explicit && !fs::exists(config_path)) {
    std::cerr << "sitecheck: cannot read config " << config_path << "\n";
    return 2;
  }
  std::string config_error;
  ToolConfig cfg = load_config(config_path, &config_error);
  if (!config_error.empty()) {
    std::cerr << "sitecheck: " << config_error << "\n";
    return 2;
  }

  CLI::App app{"static site checker: links, HTML structure, JSON link rot, "
               "XML tag subsets"};
  app.name("sitecheck");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_flag; // consumed here, applied by the prescan above
  app.add_option("--config", config_flag,
                 "Config file (default ./sitecheck.json)");

  OutputFlags default_out;
  default_out.strict = cfg.strict;
  switch (cfg.format) {
    case OutputFormat::text: default_out.format_name = "text"; break;
    case OutputFormat::json: default_out.format_name = "json"; break;
    case OutputFormat::github: default_out.format_name = "github"; break;
  }

  // reach: probe one URL and say whether it answered
  auto* reach_cmd = app.add_subcommand("reach", "Check that one URL responds");
  std::string reach_url;
  ProbePolicy reach_policy = cfg.crawl.probe_policy;
  reach_cmd->add_option("url", reach_url, "URL to probe")->required();
  reach_cmd->add_option("--timeout", reach_policy.timeout, "Seconds per request")
      ->capture_default_str();
  reach_cmd->add_option("--retries", reach_policy.retries,
                        "Extra attempts on connection failure")
      ->capture_default_str();

  // crawl: walk a site from a seed, or serve a directory and walk that
  auto* crawl_cmd = app.add_subcommand("crawl", "Crawl a site and check links");
  std::string crawl_url;
  std::string serve_dir;
  std::string seed_path = "/index.html";
  CrawlOptions crawl_opts = cfg.crawl;
  OutputFlags crawl_out = default_out;
  crawl_cmd->add_option("url", crawl_url, "Seed URL (omit with --serve)");
  crawl_cmd->add_option("--serve", serve_dir,
                        "Serve this directory on a loopback port and crawl it")
      ->check(CLI::ExistingDirectory);
  crawl_cmd->add_option("--seed", seed_path, "Seed path within the served site")
      ->capture_default_str();
  crawl_cmd->add_flag("--external", crawl_opts.check_external,
                      "Probe external links too");
  crawl_cmd->add_option("--max-pages", crawl_opts.max_pages, "Page budget")
      ->capture_default_str();
  crawl_cmd->add_option("--depth", crawl_opts.max_depth,
                        "Link depth limit (0 = seed only)");
  crawl_cmd->add_option("--exclude", crawl_opts.exclude_patterns,
                        "Skip URLs matching this pattern (repeatable)");
  crawl_cmd->add_option("--concurrency", crawl_opts.concurrency,
                        "Parallel fetch workers")
      ->capture_default_str();
  crawl_cmd->add_flag("--respect-robots", crawl_opts.respect_robots,
                      "Honor robots.txt Disallow lines");
  crawl_cmd->add_option("--timeout", crawl_opts.probe_policy.timeout,
                        "Seconds per request")
      ->capture_default_str();
  crawl_cmd->add_option("--retries", crawl_opts.probe_policy.retries,
                        "Extra attempts on connection failure")
      ->capture_default_str();
  add_output_flags(crawl_cmd, crawl_out);

  // html: structural checks over every page in a directory
  auto* html_cmd = app.add_subcommand("html", "Validate HTML structure");
  std::string html_dir;
  std::vector<std::string> html_allow;
  OutputFlags html_out = default_out;
  html_cmd->add_option("dir", html_dir, "Directory to scan")
      ->required()
      ->check(CLI::ExistingDirectory);
  html_cmd->add_option("--allow", html_allow,
                       "Suppress a machine code, e.g. HTML_UNKNOWN_ELEMENT "
                       "(repeatable)");
  add_output_flags(html_cmd, html_out);

  // json-links: URL rot inside JSON data files
  auto* json_cmd = app.add_subcommand("json-links", "Check URLs inside JSON files");
  std::string json_dir;
  std::string base_url;
  ProbePolicy json_policy = cfg.crawl.probe_policy;
  OutputFlags json_out = default_out;
  json_cmd->add_option("dir", json_dir, "Directory to scan")
      ->required()
      ->check(CLI::ExistingDirectory);
  json_cmd->add_option("--base", base_url,
                       "Base URL for resolving relative values in url/link/href "
                       "keys");
  json_cmd->add_option("--timeout", json_policy.timeout, "Seconds per request")
      ->capture_default_str();
  json_cmd->add_option("--retries", json_policy.retries,
                       "Extra attempts on connection failure")
      ->capture_default_str();
  add_output_flags(json_cmd, json_out);

  // xml-subset: every user file's tag paths must exist in the main file
  auto* xml_cmd = app.add_subcommand(
      "xml-subset", "Check XML files against a main file's tag paths");
  std::string main_file;
  std::string roots_dir;
  std::string pattern = "*user*.xml";
  OutputFlags xml_out = default_out;
  xml_cmd->add_option("--main", main_file, "Reference XML file")
      ->required()
      ->check(CLI::ExistingFile);
  xml_cmd->add_option("--roots", roots_dir, "Directory holding files to check")
      ->required()
      ->check(CLI::ExistingDirectory);
  xml_cmd->add_option("--pattern", pattern, "Filename glob for files to check")
      ->capture_default_str();
  add_output_flags(xml_cmd, xml_out);

  // serve: the standalone static server
  auto* serve_cmd = app.add_subcommand("serve", "Serve a directory over HTTP");
  std::string serve_root;
  int serve_port = 0;
  serve_cmd->add_option("dir", serve_root, "Directory to serve")
      ->required()
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--port", serve_port, "Port (0 = pick a free one)")
      ->capture_default_str();

  // ci-init: ready-to-commit workflow files
  auto* ci_cmd = app.add_subcommand("ci-init", "Write a CI workflow file");
  std::string ci_kind;
  std::string ci_schedule;
  std::string ci_out;
  ci_cmd->add_option("kind", ci_kind, "One of: html, links, json-links, xml-subset")
      ->required();
  ci_cmd->add_option("--schedule", ci_schedule, "Daily run time, HH:MM (UTC)");
  ci_cmd->add_option("--out", ci_out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForAllHelp") {
      std::cout << app.help("", CLI::AppFormatMode::All);
      return 0;
    }
    std::cerr << "sitecheck: " << e.what() << "\n";
    if (app.get_subcommands().empty()) std::cerr << "\n" << app.help();
    return 2;
  }

  if (reach_cmd->parsed()) {
    return check_reachable(reach_url, reach_policy, std::cout);
  }

  if (crawl_cmd->parsed()) {
    if (serve_dir.empty() == crawl_url.empty()) {
      std::cerr << "sitecheck: crawl needs a seed URL or --serve DIR (not both)\n";
      return 2;
    }
    if (!serve_dir.empty()) {
      return emit(serve_and_crawl(serve_dir, seed_path, crawl_opts), crawl_out);
    }
    UrlError err = UrlError::none;
    auto seed = normalize_url(nullptr, crawl_url, &err);
    if (!seed) {
      std::cerr << "sitecheck: not a crawlable URL: " << crawl_url << "\n";
      return 2;
    }
    return emit(crawl(*seed, crawl_opts), crawl_out);
  }

  if (html_cmd->parsed()) {
    return run_html(html_dir, html_allow, html_out);
  }

  if (json_cmd->parsed()) {
    std::optional<NormalizedUrl> base;
    if (!base_url.empty()) {
      UrlError err = UrlError::none;
      base = normalize_url(nullptr, base_url, &err);
      if (!base) {
        std::cerr << "sitecheck: not a usable base URL: " << base_url << "\n";
        return 2;
      }
    }
    return emit(json::check_json_links(json_dir, json_policy,
                                       base ? &*base : nullptr),
                json_out);
  }

  if (xml_cmd->parsed()) {
    return emit(xml::check_xml_tree(main_file, roots_dir, pattern), xml_out);
  }

  if (serve_cmd->parsed()) {
    return run_serve(serve_root, serve_port);
  }

  if (ci_cmd->parsed()) {
    return run_ci_init(ci_kind, ci_schedule, ci_out);
  }

  std::cerr << app.help();
  return 2;
}
