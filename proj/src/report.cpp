#include "sitecheck/report.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

namespace sitecheck {

namespace {

using ordered_json = nlohmann::ordered_json;

// GitHub Actions annotation escaping. Data (the message after ::) escapes
// %, CR, LF; property values (file=...) additionally escape : and ,
std::string escape_data(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '%': out += "%25"; break;
      case '\r': out += "%0D"; break;
      case '\n': out += "%0A"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_property(const std::string& s) {
  std::string out;
  for (char c : escape_data(s)) {
    switch (c) {
      case ':': out += "%3A"; break;
      case ',': out += "%2C"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  for (const auto& f : report.findings) {
    out << to_string(f.severity) << ' ' << f.machine_code << ' ' << f.location.str() << ' '
        << f.message << '\n';
  }
  int e = report.errors();
  int w = report.warnings();
  out << e << (e == 1 ? " error, " : " errors, ") << w << (w == 1 ? " warning" : " warnings")
      << '\n';
  return out.str();
}

ordered_json location_json(const SourceLocation& loc) {
  ordered_json j;
  j["file"] = loc.file;
  j["line"] = loc.line;
  j["column"] = loc.column;
  j["detail"] = loc.detail;
  return j;
}

std::string render_json(const Report& report, bool with_timestamps) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = report.tool_version;
  if (with_timestamps) {
    j["started"] = report.started;
    j["finished"] = report.finished;
  }
  j["errors"] = report.errors();
  j["warnings"] = report.warnings();
  j["counts"] = ordered_json::object();
  for (const auto& [key, n] : report.counts) j["counts"][key] = n;
  j["findings"] = ordered_json::array();
  for (const auto& f : report.findings) {
    ordered_json jf;
    jf["check"] = to_string(f.check);
    jf["severity"] = to_string(f.severity);
    jf["code"] = f.machine_code;
    jf["file"] = f.location.file;
    jf["line"] = f.location.line;
    jf["column"] = f.location.column;
    jf["detail"] = f.location.detail;
    jf["message"] = f.message;
    jf["origins"] = ordered_json::array();
    for (const auto& o : f.origins) jf["origins"].push_back(location_json(o));
    j["findings"].push_back(std::move(jf));
  }
  j["urls"] = ordered_json::array();
  for (const auto& u : report.urls) {
    ordered_json ju;
    ju["url"] = u.url;
    ju["status"] = u.status.describe();
    j["urls"].push_back(std::move(ju));
  }
  // messages may quote bytes from arbitrary input files; never let bad
  // UTF-8 turn rendering into an exception
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string render_github(const Report& report) {
  std::ostringstream out;
  for (const auto& f : report.findings) {
    out << (f.severity == Severity::error ? "::error" : "::warning")
        << " file=" << escape_property(f.location.file) << ",line=" << f.location.line
        << "::" << escape_data(f.machine_code + ": " + f.message) << '\n';
  }
  return out.str();
}

struct WorkflowKind {
  const char* title;
  const char* job;
  const char* command;
};

const WorkflowKind* workflow_kind(const std::string& kind) {
  static const WorkflowKind kHtml = {"HTML validation", "html-check",
                                     "./sitecheck html . --format github"};
  static const WorkflowKind kLinks = {"Link check", "link-check",
                                      "./sitecheck crawl --serve . --format github"};
  static const WorkflowKind kJson = {"JSON link check", "json-link-check",
                                     "./sitecheck json-links data --format github"};
  static const WorkflowKind kXml = {
      "XML tag subset", "xml-subset-check",
      "./sitecheck xml-subset --main config/main.xml --roots examples --format github"};
  if (kind == "html") return &kHtml;
  if (kind == "links") return &kLinks;
  if (kind == "json-links") return &kJson;
  if (kind == "xml-subset") return &kXml;
  return nullptr;
}

// one place to bump when the pinned action moves
constexpr const char* kCheckoutAction = "actions/checkout@v4";

} // namespace

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (name == "text") return OutputFormat::text;
  if (name == "json") return OutputFormat::json;
  if (name == "github") return OutputFormat::github;
  return std::nullopt;
}

std::string render(const Report& report, OutputFormat format, bool with_timestamps) {
  switch (format) {
    case OutputFormat::text: return render_text(report);
    case OutputFormat::json: return render_json(report, with_timestamps);
    case OutputFormat::github: return render_github(report);
  }
  return {};
}

int exit_code(const Report& report) { return report.errors() > 0 ? 1 : 0; }

std::optional<std::string> cron_for(const std::string& hhmm) {
  size_t colon = hhmm.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == hhmm.size()) {
    return std::nullopt;
  }
  for (size_t i = 0; i < hhmm.size(); ++i) {
    if (i == colon) continue;
    if (!std::isdigit(static_cast<unsigned char>(hhmm[i]))) return std::nullopt;
  }
  if (colon > 2 || hhmm.size() - colon - 1 != 2) return std::nullopt;
  int hour = std::stoi(hhmm.substr(0, colon));
  int minute = std::stoi(hhmm.substr(colon + 1));
  if (hour > 23 || minute > 59) return std::nullopt;
  return std::to_string(minute) + " " + std::to_string(hour) + " * * *";
}

std::optional<std::string> scaffold_workflow(const std::string& kind,
                                             const std::string& schedule) {
  const WorkflowKind* k = workflow_kind(kind);
  if (!k) return std::nullopt;
  std::string cron;
  if (!schedule.empty()) {
    auto c = cron_for(schedule);
    if (!c) return std::nullopt;
    cron = *c;
  }

  std::ostringstream out;
  out << "name: " << k->title << "\n";
  out << "on:\n";
  out << "  push:\n";
  out << "    branches: [main]\n";
  out << "  pull_request:\n";
  out << "    branches: [main]\n";
  if (!cron.empty()) {
    out << "  schedule:\n";
    out << "    - cron: \"" << cron << "\"\n";
  }
  out << "\n";
  out << "jobs:\n";
  out << "  " << k->job << ":\n";
  out << "    runs-on: ubuntu-latest\n";
  out << "    steps:\n";
  out << "      - uses: " << kCheckoutAction << "\n";
  out << "      - name: Get sitecheck\n";
  out << "        run: |\n";
  out << "          curl -fsSL -o sitecheck "
         "https://example.org/sitecheck/latest/sitecheck-linux-x86_64\n";
  out << "          chmod +x sitecheck\n";
  out << "      - name: " << k->title << "\n";
  out << "        run: " << k->command << "\n";
  return out.str();
}

} // namespace sitecheck
