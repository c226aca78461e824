/*
 *  Copyright 2026 The smm Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smm {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    InvalidSpec,
    NotImplemented,
    InsufficientData,
    NonFiniteValue,
    SingularCrossproduct,
    DivisionByNearZeroLoading,
    Theorem1Divergence,
    NotPositiveDefinite,
    NonPositiveVariance,
    ConditionDegenerate,
    MismatchedConditions,
    EmptyResultSet,
};

/// Stable upper-case identifier, e.g. "NOT_POSITIVE_DEFINITE".
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace smm
