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

#include "smm/error.hpp"

namespace smm {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::InvalidSpec: return "INVALID_SPEC";
    case ErrorCode::NotImplemented: return "NOT_IMPLEMENTED";
    case ErrorCode::InsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::NonFiniteValue: return "NON_FINITE_VALUE";
    case ErrorCode::SingularCrossproduct: return "SINGULAR_CROSSPRODUCT";
    case ErrorCode::DivisionByNearZeroLoading: return "DIVISION_BY_NEAR_ZERO_LOADING";
    case ErrorCode::Theorem1Divergence: return "THEOREM1_DIVERGENCE";
    case ErrorCode::NotPositiveDefinite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::NonPositiveVariance: return "NON_POSITIVE_VARIANCE";
    case ErrorCode::ConditionDegenerate: return "CONDITION_DEGENERATE";
    case ErrorCode::MismatchedConditions: return "MISMATCHED_CONDITIONS";
    case ErrorCode::EmptyResultSet: return "EMPTY_RESULT_SET";
    }
    return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace smm
