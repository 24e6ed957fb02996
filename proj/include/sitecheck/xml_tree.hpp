// Strict XML element-tree parser. Keeps element names, nesting, and source
// positions; attributes and text are checked for well-formedness and dropped.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sitecheck::xml {

struct XmlNode {
  std::string name; // case-sensitive, namespace prefixes kept literally
  std::vector<XmlNode> children;
  int line = 0;
  int column = 0;
};

struct XmlTree {
  std::string path;
  std::optional<XmlNode> root; // empty when the parse failed
  std::string error;
  int error_line = 0;
  int error_column = 0;

  bool ok() const { return root.has_value(); }
};

XmlTree parse_xml(std::string_view bytes, const std::string& path);
XmlTree parse_xml_file(const std::string& path);

// Process-wide count of parse_xml calls. Tests pin how often a command
// actually parsed something (e.g. the main file exactly once per run).
int xml_parse_count();

} // namespace sitecheck::xml
