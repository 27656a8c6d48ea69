#ifndef COOPMAN_ERRORS_HPP
#define COOPMAN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace coopman {

/// Shape or block-structure mismatch (wrong dimensions, inconsistent layout).
class StructuralError : public std::invalid_argument {
public:
  explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// A matrix required to have full column rank does not; carries the
/// offending smallest singular value.
class SingularityError : public std::runtime_error {
public:
  SingularityError(const std::string& what, double sigma_min)
      : std::runtime_error(what), sigma_min_(sigma_min) {}
  double sigma_min() const noexcept { return sigma_min_; }

private:
  double sigma_min_;
};

/// A state lies outside the domain on which a kinematic map is defined.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A closed-loop run had to stop (left its working ball, hit a singular
/// configuration, or violated an integrator precondition).
class RunError : public std::runtime_error {
public:
  explicit RunError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid experiment configuration; carries one message per violation.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> items)
      : std::runtime_error(join(items)), items_(std::move(items)) {}
  const std::vector<std::string>& items() const noexcept { return items_; }

private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) {
      out += "\n  - ";
      out += item;
    }
    return out;
  }
  std::vector<std::string> items_;
};

}  // namespace coopman

#endif
