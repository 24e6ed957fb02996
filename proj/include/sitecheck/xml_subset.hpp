// Checks that user XML files only use element paths that a main XML file
// declares. Comparison is by root-relative path, not bare tag name: a valid
// name grafted under the wrong parent is still a defect.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sitecheck/model.hpp"
#include "sitecheck/xml_tree.hpp"

namespace sitecheck::xml {

// Root-relative element names, e.g. <a><b/></a> yields "a" and "a/b".
using TagPath = std::vector<std::string>;

std::string path_str(const TagPath& p);

struct TagUniverse {
  std::set<TagPath> paths; // prefix-closed by construction
  std::string source;

  bool contains(const TagPath& p) const { return paths.find(p) != paths.end(); }
};

// Every element path in the tree, duplicates collapsed.
TagUniverse paths_of(const XmlNode& root);

struct UnknownPath {
  TagPath path;
  int line = 0;
  int column = 0;
};

// Paths in the tree that the universe lacks. Reported at the shallowest
// offending element: descendants of an unknown element are not repeated, and
// a path that occurs twice is reported where it first appears.
std::vector<UnknownPath> unknown_paths(const XmlNode& root, const TagUniverse& universe);

// Parses the main file and collects its universe. A parse failure appends an
// XML_PARSE_ERROR finding (when `findings` is given) and yields nothing.
std::optional<TagUniverse> collect_tag_paths(const std::string& xml_file,
                                             std::vector<Finding>* findings = nullptr);

// XML_UNKNOWN_TAG per unknown path; XML_PARSE_ERROR when the file is
// malformed or unreadable.
std::vector<Finding> validate_user_file(const std::string& user_file,
                                        const TagUniverse& universe);

// Recursive, lexicographically ordered filename-glob matches under root.
std::vector<std::string> find_user_files(const std::string& root,
                                         const std::string& pattern = "*user*.xml");

// Builds the universe once, validates every discovered user file. When the
// main file itself does not parse, *universe_ok is set false and the report
// carries only that parse error.
Report check_xml_tree(const std::string& main_file, const std::string& root_dir,
                      const std::string& pattern = "*user*.xml",
                      bool* universe_ok = nullptr);

} // namespace sitecheck::xml
