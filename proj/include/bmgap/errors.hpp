#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmgap {

using Point = std::complex<double>;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A path left the grid's bounding box.
class OutOfBounds : public std::out_of_range {
 public:
  OutOfBounds(const std::string& what, Point escape) : std::out_of_range(what), escape_(escape) {}
  Point escape_point() const { return escape_; }

 private:
  Point escape_;
};

/// Requested length scale is below what the grid resolves.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Band narrower than four cells; the estimate would be dominated by the raster.
class BandTooThin : public ResolutionError {
 public:
  BandTooThin(const std::string& what, double eps) : ResolutionError(what), eps_(eps) {}
  double eps() const { return eps_; }

 private:
  double eps_;
};

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Every importance weight in a run was zero.
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) out += "\n  - " + item;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace bmgap
