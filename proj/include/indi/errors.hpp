#pragma once

#include <stdexcept>
#include <string>

namespace indi {

/// Raised when a transfer function is evaluated at a pole or a feedback
/// loop whose return difference vanishes.
class SingularEvaluation : public std::runtime_error {
 public:
  SingularEvaluation(const std::string& what, double omega)
      : std::runtime_error(what), omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// The loop structure itself is degenerate (e.g. 1 - Ga*Gam == 0 identically).
class SingularStructure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration; `where` carries "line N" or a field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string where = {})
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace indi
