#ifndef ZIGZAG_ERRORS_HPP
#define ZIGZAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zigzag {

// Bad run configuration (schema violations, nonpositive horizons, ...).
// The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: solver non-convergence, thinning bound violation.
// The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zigzag

#endif
