#include "sitecheck/xml_subset.hpp"

#include <algorithm>
#include <filesystem>

#include "sitecheck/glob.hpp"
#include "sitecheck/version.hpp"

namespace fs = std::filesystem;

namespace sitecheck::xml {

std::string path_str(const TagPath& p) {
  std::string out;
  for (const auto& name : p) {
    if (!out.empty()) out += '/';
    out += name;
  }
  return out;
}

namespace {

void collect(const XmlNode& node, TagPath& prefix, std::set<TagPath>& into) {
  prefix.push_back(node.name);
  into.insert(prefix);
  for (const auto& child : node.children) collect(child, prefix, into);
  prefix.pop_back();
}

void walk_unknown(const XmlNode& node, TagPath& prefix, const TagUniverse& universe,
                  std::set<TagPath>& reported, std::vector<UnknownPath>& out) {
  prefix.push_back(node.name);
  if (!universe.contains(prefix)) {
    if (reported.insert(prefix).second) {
      out.push_back({prefix, node.line, node.column});
    }
    // children of an unknown element would all be unknown too; one finding
    // per defect, not one per descendant
  } else {
    for (const auto& child : node.children) {
      walk_unknown(child, prefix, universe, reported, out);
    }
  }
  prefix.pop_back();
}

Finding parse_error_finding(const XmlTree& tree) {
  Finding f;
  f.check = CheckKind::xml;
  f.severity = Severity::error;
  f.location = {tree.path, tree.error_line, tree.error_column, {}};
  f.machine_code = code::kXmlParseError;
  f.message = tree.error;
  return f;
}

} // namespace

TagUniverse paths_of(const XmlNode& root) {
  TagUniverse u;
  TagPath prefix;
  collect(root, prefix, u.paths);
  return u;
}

std::vector<UnknownPath> unknown_paths(const XmlNode& root, const TagUniverse& universe) {
  std::vector<UnknownPath> out;
  std::set<TagPath> reported;
  TagPath prefix;
  walk_unknown(root, prefix, universe, reported, out);
  return out;
}

std::optional<TagUniverse> collect_tag_paths(const std::string& xml_file,
                                             std::vector<Finding>* findings) {
  XmlTree tree = parse_xml_file(xml_file);
  if (!tree.ok()) {
    if (findings) findings->push_back(parse_error_finding(tree));
    return std::nullopt;
  }
  TagUniverse u = paths_of(*tree.root);
  u.source = xml_file;
  return u;
}

std::vector<Finding> validate_user_file(const std::string& user_file,
                                        const TagUniverse& universe) {
  std::vector<Finding> out;
  XmlTree tree = parse_xml_file(user_file);
  if (!tree.ok()) {
    out.push_back(parse_error_finding(tree));
    return out;
  }
  for (const auto& unknown : unknown_paths(*tree.root, universe)) {
    Finding f;
    f.check = CheckKind::xml;
    f.severity = Severity::error;
    f.location = {user_file, unknown.line, unknown.column, path_str(unknown.path)};
    f.machine_code = code::kXmlUnknownTag;
    f.message = "element path \"" + path_str(unknown.path) + "\" is not declared in " +
                universe.source;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::string> find_user_files(const std::string& root, const std::string& pattern) {
  std::vector<std::string> out;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) return out;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    if (glob_match(pattern, entry.path().filename().string())) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Report check_xml_tree(const std::string& main_file, const std::string& root_dir,
                      const std::string& pattern, bool* universe_ok) {
  Report report;
  report.tool_version = kToolVersion;
  report.started = current_timestamp();

  auto universe = collect_tag_paths(main_file, &report.findings);
  if (universe_ok) *universe_ok = universe.has_value();
  if (universe) {
    auto users = find_user_files(root_dir, pattern);
    report.counts["user_files"] = static_cast<int>(users.size());
    report.counts["tag_paths"] = static_cast<int>(universe->paths.size());
    for (const auto& user : users) {
      for (auto& f : validate_user_file(user, *universe)) report.add(std::move(f));
    }
  }

  report.finished = current_timestamp();
  report.finalize();
  return report;
}

} // namespace sitecheck::xml
