#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ghzlab::cli {

/// Exit codes: 0 success (audit: all channels closed), 1 audit found open
/// channels, 2 config/validation error, 3 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

} // namespace ghzlab::cli
