#ifndef SEQDENOISE_ERRORS_HPP_
#define SEQDENOISE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace seqdenoise {

// Raised for bad configuration or malformed input files. The CLI maps this
// to exit code 1; anything else that escapes is a runtime failure (exit 2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqdenoise

#endif  // SEQDENOISE_ERRORS_HPP_
