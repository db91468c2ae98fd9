// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nsfold {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularMatrix,
  DegenerateForm,
  NotAFold,
  InvalidResetLaw,
  NonFiniteState,
  DegenerateDenominator,
  StepFailure,
  ChatterBudgetExceeded,
  RepellingSliding,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nsfold
