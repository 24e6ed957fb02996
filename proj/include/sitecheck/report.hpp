// Report rendering (human text, machine JSON, CI annotations), exit-code
// mapping, and CI workflow scaffolding.
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sitecheck/model.hpp"

namespace sitecheck {

enum class OutputFormat { text, json, github };

// "text" | "json" | "github"
std::optional<OutputFormat> parse_format(std::string_view name);

inline constexpr int kReportSchemaVersion = 1;

// Deterministic: the same finalized report renders to the same bytes.
// with_timestamps=false drops started/finished from the JSON form so runs
// can be compared byte for byte; text and github never include them.
std::string render(const Report& report, OutputFormat format, bool with_timestamps = true);

// 0 when no error-severity findings, 1 otherwise. Usage errors (exit 2)
// are the command line's business, not the report's.
int exit_code(const Report& report);

// "HH:MM" (24h) -> five-field cron line for that time daily, UTC.
std::optional<std::string> cron_for(const std::string& hhmm);

// Ready-to-commit GitHub Actions workflow running one check kind
// ("html" | "links" | "json-links" | "xml-subset") on push and pull
// requests to main, plus a daily cron when schedule ("HH:MM") is given.
// Unknown kind or bad schedule -> nullopt.
std::optional<std::string> scaffold_workflow(const std::string& kind,
                                             const std::string& schedule = "");

} // namespace sitecheck
