#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace jumpinterp {

// Argument outside an operation's mathematical domain (lambda <= 0, empty
// series, p outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input data that parses but violates a stated precondition. `index` names
// the offending item (atom, summand, ...) when there is one.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what,
                      std::optional<std::size_t> index = std::nullopt)
      : std::invalid_argument(what), index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

// Malformed JSON/CSV input. The message carries the field or line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative procedure (Sinkhorn, quadrature refinement) failed to reach its
// tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jumpinterp
