//
// Copyright 2026 The gdc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GDC_ERROR_H_
#define GDC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gdc {

enum class ErrorCode {
  kNegativeLoss,
  kNonFiniteLoss,
  kUnknownSample,
  kIncompleteEpoch,
  kMalformedHeader,
  kDimensionMismatch,
  kDuplicateCell,
  kChecksumMismatch,
  kBadRange,
  kInvalidConfig,
  kEmptyInput,
  kZeroCoverage,
  kEmptyPlan,
  kDivergence,
  kNoCanaries,
  kVocabularyExhausted,
  kSnapshotsAbsent,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library. `what()` carries the code name followed
// by a diagnostic that names the offending cell, line, byte offset or path.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // The diagnostic without the leading code name.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace gdc

#endif  // GDC_ERROR_H_
