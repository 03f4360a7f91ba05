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

#include "afford/error.hpp"

namespace afford {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kInvalidRelation: return "InvalidRelation";
    case ErrorCode::kUnknownEntity: return "UnknownEntity";
    case ErrorCode::kEmptyLabelSet: return "EmptyLabelSet";
    case ErrorCode::kDuplicateLabel: return "DuplicateLabel";
    case ErrorCode::kMalformedPrompt: return "MalformedPrompt";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroNormEmbedding: return "ZeroNormEmbedding";
    case ErrorCode::kInvalidBox: return "InvalidBox";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kPerplexityTooLarge: return "PerplexityTooLarge";
    case ErrorCode::kDegenerateDistances: return "DegenerateDistances";
    case ErrorCode::kNumericalDivergence: return "NumericalDivergence";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kZeroNormVector: return "ZeroNormVector";
    case ErrorCode::kEmptyStore: return "EmptyStore";
    case ErrorCode::kUnknownObjectId: return "UnknownObjectId";
    case ErrorCode::kInvalidRule: return "InvalidRule";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kSessionMismatch: return "SessionMismatch";
    case ErrorCode::kStageNotReached: return "StageNotReached";
    case ErrorCode::kBindError: return "BindError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail,
                    const std::string& stage) {
  std::string what;
  if (!stage.empty()) what += "[stage " + stage + "] ";
  what += std::string(to_string(code));
  if (!detail.empty()) what += ": " + detail;
  return what;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : Error(code, message, std::string()) {}

Error::Error(ErrorCode code, std::string detail, std::string stage)
    : std::runtime_error(compose(code, detail, stage)),
      code_(code),
      detail_(std::move(detail)),
      stage_(std::move(stage)) {}

Error Error::with_stage(std::string stage) const {
  return Error(code_, detail_, std::move(stage));
}

}  // namespace afford
