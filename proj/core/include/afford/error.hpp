// Copyright 2026 The Afford Authors. All Rights Reserved.
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

#ifndef AFFORD_ERROR_HPP_
#define AFFORD_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace afford {

enum class ErrorCode {
  // Knowledge graph.
  kDuplicateId,
  kDanglingReference,
  kInvalidProbability,
  kInvalidRelation,
  kUnknownEntity,
  // Labels, prompts and detection files.
  kEmptyLabelSet,
  kDuplicateLabel,
  kMalformedPrompt,
  kIoError,
  kSchemaError,
  kDimensionMismatch,
  kZeroNormEmbedding,
  kInvalidBox,
  kInvalidSpec,
  // Projection.
  kTooFewPoints,
  kPerplexityTooLarge,
  kDegenerateDistances,
  kNumericalDivergence,
  kInvalidParams,
  // Relabeling.
  kZeroNormVector,
  kEmptyStore,
  kUnknownObjectId,
  // Spatial rules.
  kInvalidRule,
  // Pipeline and service.
  kInvalidConfig,
  kSchemaVersionMismatch,
  kSessionMismatch,
  kStageNotReached,
  kBindError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `stage()` is filled in by the pipeline
// when an error escapes one of its stages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& stage() const noexcept { return stage_; }

  // Copy of this error annotated with the pipeline stage it escaped from.
  Error with_stage(std::string stage) const;

 private:
  Error(ErrorCode code, std::string detail, std::string stage);

  ErrorCode code_;
  std::string detail_;
  std::string stage_;
};

}  // namespace afford

#endif  // AFFORD_ERROR_HPP_
