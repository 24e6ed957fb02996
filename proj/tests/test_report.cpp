#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sitecheck/report.hpp>
#include <sitecheck/version.hpp>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <string>

using namespace sitecheck;
using nlohmann::json;

namespace {

Finding make_finding(Severity sev, const std::string& code, const std::string& file, int line,
                     const std::string& message) {
  Finding f;
  f.check = CheckKind::link;
  f.severity = sev;
  f.machine_code = code;
  f.location = {file, line, 0, {}};
  f.message = message;
  return f;
}

Report sample_report() {
  Report r;
  r.tool_version = kToolVersion;
  r.started = "2024-05-02T08:30:00Z";
  r.finished = "2024-05-02T08:30:04Z";
  r.counts["pages"] = 3;
  r.counts["urls"] = 5;
  auto broken = make_finding(Severity::error, code::kLinkBroken, "docs/page.html", 12,
                             "https://example.org/gone broken (HTTP 404)");
  broken.origins.push_back({"docs/page.html", 12, 5, "href"});
  broken.origins.push_back({"docs/other.html", 3, 9, "href"});
  r.add(broken);
  r.add(make_finding(Severity::warning, code::kHtmlUnknownElement, "docs/page.html", 4,
                     "unknown element <my-widget>"));
  r.urls.push_back({"https://example.org/", CheckStatus::ok(200)});
  r.urls.push_back({"https://example.org/gone", CheckStatus::broken_http(404)});
  r.finalize();
  return r;
}

// Just enough JSON Schema to check the shipped document: type, required,
// properties, additionalProperties, items, enum, const, minimum, $ref.
struct SchemaChecker {
  const json& root;

  bool matches_type(const json& value, const std::string& type) const {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    return false;
  }

  const json& resolve(const json& schema) const {
    if (schema.contains("$ref")) {
      std::string ref = schema["$ref"].get<std::string>();
      REQUIRE(ref.rfind("#/definitions/", 0) == 0);
      return root["definitions"][ref.substr(14)];
    }
    return schema;
  }

  bool check(const json& value, const json& schema_in) const {
    const json& schema = resolve(schema_in);
    if (schema.contains("const") && value != schema["const"]) return false;
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& v : schema["enum"]) {
        if (value == v) found = true;
      }
      if (!found) return false;
    }
    if (schema.contains("type") &&
        !matches_type(value, schema["type"].get<std::string>())) {
      return false;
    }
    if (schema.contains("minimum") && value.is_number() &&
        value.get<double>() < schema["minimum"].get<double>()) {
      return false;
    }
    if (value.is_object()) {
      if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
          if (!value.contains(key.get<std::string>())) return false;
        }
      }
      const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
      for (const auto& [key, member] : value.items()) {
        if (props && props->contains(key)) {
          if (!check(member, (*props)[key])) return false;
        } else if (schema.contains("additionalProperties")) {
          const json& extra = schema["additionalProperties"];
          if (extra.is_boolean() && !extra.get<bool>()) return false;
          if (extra.is_object() && !check(member, extra)) return false;
        }
      }
    }
    if (value.is_array() && schema.contains("items")) {
      for (const auto& item : value) {
        if (!check(item, schema["items"])) return false;
      }
    }
    return true;
  }
};

bool validates_against_shipped_schema(const std::string& rendered) {
  std::ifstream in(std::string(SITECHECK_DOCS) + "/report-schema.json");
  REQUIRE(in.good());
  json schema = json::parse(in);
  json value = json::parse(rendered);
  return SchemaChecker{schema}.check(value, schema);
}

} // namespace

TEST_CASE("an empty report renders as a bare summary") {
  Report r;
  r.finalize();
  CHECK(render(r, OutputFormat::text) == "0 errors, 0 warnings\n");
}

TEST_CASE("text output is one line per finding plus a summary") {
  std::string text = render(sample_report(), OutputFormat::text);
  CHECK(text ==
        "warning HTML_UNKNOWN_ELEMENT docs/page.html:4 unknown element <my-widget>\n"
        "error LINK_BROKEN docs/page.html:12 https://example.org/gone broken (HTTP 404)\n"
        "1 error, 1 warning\n");
}

TEST_CASE("rendering the same report twice is byte identical") {
  Report r = sample_report();
  for (auto format : {OutputFormat::text, OutputFormat::json, OutputFormat::github}) {
    CHECK(render(r, format) == render(r, format));
  }
}

TEST_CASE("github format emits one annotation per finding") {
  std::string out = render(sample_report(), OutputFormat::github);
  CHECK(out ==
        "::warning file=docs/page.html,line=4::HTML_UNKNOWN_ELEMENT: "
        "unknown element <my-widget>\n"
        "::error file=docs/page.html,line=12::LINK_BROKEN: "
        "https://example.org/gone broken (HTTP 404)\n");
}

TEST_CASE("annotation messages never contain raw newlines or stray percents") {
  Report r;
  auto f = make_finding(Severity::error, "LINK_BROKEN", "a,b:c.html", 7,
                        "line one\nline two is 50% done\r\n");
  r.add(f);
  r.finalize();
  std::string out = render(r, OutputFormat::github);

  CHECK(out == "::error file=a%2Cb%3Ac.html,line=7::LINK_BROKEN: "
               "line one%0Aline two is 50%25 done%0D%0A\n");
  // exactly the one trailing newline that ends the annotation
  CHECK(std::count(out.begin(), out.end(), '\n') == 1);
}

TEST_CASE("json output carries the schema version and both counters") {
  json doc = json::parse(render(sample_report(), OutputFormat::json));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["tool_version"] == kToolVersion);
  CHECK(doc["errors"] == 1);
  CHECK(doc["warnings"] == 1);
  CHECK(doc["counts"]["pages"] == 3);
  CHECK(doc["findings"].size() == 2);
  CHECK(doc["findings"][1]["code"] == "LINK_BROKEN");
  CHECK(doc["findings"][1]["origins"].size() == 2);
  CHECK(doc["urls"].size() == 2);
  CHECK(doc["started"] == "2024-05-02T08:30:00Z");
}

TEST_CASE("timestamps can be dropped for byte stable comparisons") {
  json doc = json::parse(render(sample_report(), OutputFormat::json, false));
  CHECK(!doc.contains("started"));
  CHECK(!doc.contains("finished"));
  CHECK(doc["schema_version"] == 1);
}

TEST_CASE("emitted json validates against the shipped schema") {
  CHECK(validates_against_shipped_schema(render(sample_report(), OutputFormat::json)));
  CHECK(validates_against_shipped_schema(
      render(sample_report(), OutputFormat::json, false)));
  Report empty;
  empty.tool_version = kToolVersion;
  empty.finalize();
  CHECK(validates_against_shipped_schema(render(empty, OutputFormat::json)));
}

TEST_CASE("broken bytes in a message do not break json rendering") {
  Report r;
  r.add(make_finding(Severity::error, "LINK_BROKEN", "x.html", 1,
                     std::string("bad \xff\xfe bytes")));
  r.finalize();
  std::string out = render(r, OutputFormat::json);
  json doc = json::parse(out); // must parse in spite of the input
  std::string message = doc["findings"][0]["message"].get<std::string>();
  CHECK(message.find("bad ") == 0);
  CHECK(message.find("\xEF\xBF\xBD") != std::string::npos); // replacement char
}

TEST_CASE("exit codes depend only on error severity findings") {
  Report empty;
  empty.finalize();
  CHECK(exit_code(empty) == 0);

  Report warn_only;
  warn_only.add(make_finding(Severity::warning, "HTML_UNKNOWN_ELEMENT", "x.html", 1, "w"));
  warn_only.finalize();
  CHECK(exit_code(warn_only) == 0);

  Report failing;
  failing.add(make_finding(Severity::error, "LINK_BROKEN", "x.html", 1, "e"));
  failing.finalize();
  CHECK(exit_code(failing) == 1);

  // strict mode reuses the same mapping after promotion
  promote_warnings(warn_only);
  CHECK(exit_code(warn_only) == 1);
}

TEST_CASE("daily times convert to cron lines") {
  CHECK(cron_for("06:00") == "0 6 * * *");
  CHECK(cron_for("23:30") == "30 23 * * *");
  CHECK(cron_for("7:05") == "5 7 * * *");
  CHECK(cron_for("00:00") == "0 0 * * *");
  CHECK(!cron_for("24:00"));
  CHECK(!cron_for("12:60"));
  CHECK(!cron_for("noon"));
  CHECK(!cron_for("1200"));
  CHECK(!cron_for(":30"));
  CHECK(!cron_for("12:"));
  CHECK(!cron_for("12:5"));
  CHECK(!cron_for(""));
}

TEST_CASE("scaffolds cover the four check kinds and stay well formed yaml") {
  for (const std::string kind : {"html", "links", "json-links", "xml-subset"}) {
    CAPTURE(kind);
    auto text = scaffold_workflow(kind);
    REQUIRE(text.has_value());

    YAML::Node doc = YAML::Load(*text);
    CHECK(doc["name"].IsScalar());
    CHECK(doc["on"]["push"]["branches"][0].as<std::string>() == "main");
    CHECK(doc["on"]["pull_request"]["branches"][0].as<std::string>() == "main");
    CHECK(!doc["on"]["schedule"]);

    REQUIRE(doc["jobs"].size() == 1);
    auto job = doc["jobs"].begin()->second;
    CHECK(job["runs-on"].as<std::string>() == "ubuntu-latest");
    REQUIRE(job["steps"].size() == 3);
    CHECK(job["steps"][0]["uses"].as<std::string>().rfind("actions/checkout@", 0) == 0);
    std::string run = job["steps"][2]["run"].as<std::string>();
    CHECK(run.find("--format github") != std::string::npos);
  }
}

TEST_CASE("a schedule adds a cron trigger") {
  auto text = scaffold_workflow("links", "06:00");
  REQUIRE(text.has_value());
  YAML::Node doc = YAML::Load(*text);
  CHECK(doc["on"]["schedule"][0]["cron"].as<std::string>() == "0 6 * * *");
}

TEST_CASE("bad scaffold arguments are rejected") {
  CHECK(!scaffold_workflow("pdf"));
  CHECK(!scaffold_workflow(""));
  CHECK(!scaffold_workflow("links", "25:00"));
  CHECK(!scaffold_workflow("links", "six"));
}

TEST_CASE("format names parse and unknown ones do not") {
  CHECK(parse_format("text") == OutputFormat::text);
  CHECK(parse_format("json") == OutputFormat::json);
  CHECK(parse_format("github") == OutputFormat::github);
  CHECK(!parse_format("xml"));
  CHECK(!parse_format(""));
  CHECK(!parse_format("JSON"));
}
