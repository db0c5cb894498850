#pragma once

#include <stdexcept>
#include <string>

namespace facthist {

enum class ErrorKind {
  invalid_space,
  invalid_outcome,
  invalid_rank,
  unknown_factor,
  invalid_variable,
  space_mismatch,
  space_too_large,
  invariant_violation,
  degenerate_block,
  bad_distribution,
  bad_perturbation,
  precondition_not_structural,
  precondition_is_structural,
  invalid_dag,
  unknown_node,
  invalid_query,
  parse_error,
  unknown_name,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported with this exception; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace facthist
