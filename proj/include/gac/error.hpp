// Copyright 2026 The GAC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAC_ERROR_HPP
#define GAC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace gac {

enum class ErrorKind {
  kInvalidArgument,  // caller passed an out-of-range value
  kParse,            // file contents are not in the expected format
  kValidation,       // parsed data violates a domain invariant
  kInfeasible,       // the budget cannot be met
  kIo,               // file could not be opened, read or written
  kUnsupported,      // query outside the modelled range
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kUnsupported: return "unsupported";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when even the smallest admissible choice exceeds the budget.
// `gap` is the number of parameters by which the budget is short.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, long long gap)
      : Error(ErrorKind::kInfeasible, message), gap_(gap) {}

  long long gap() const noexcept { return gap_; }

 private:
  long long gap_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace gac

#endif  // GAC_ERROR_HPP
