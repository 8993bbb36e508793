#pragma once

#include <stdexcept>
#include <string>

namespace ghzlab {

/// Raised when a value object fails its construction invariants
/// (bad weights, malformed timelines, ...). The CLI maps this to exit 2.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ghzlab
