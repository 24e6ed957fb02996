#pragma once

#include <string_view>

namespace sitecheck {

// fnmatch-style matching: '*' any run of characters, '?' exactly one.
// Case-sensitive; no character classes.
bool glob_match(std::string_view pattern, std::string_view text);

} // namespace sitecheck
