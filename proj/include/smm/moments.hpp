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

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smm {

struct Dataset {
    Eigen::MatrixXd values;  // n x p
    std::vector<std::string> variable_names;

    Eigen::Index n() const noexcept { return values.rows(); }
    Eigen::Index p() const noexcept { return values.cols(); }
};

/// Sample mean vector and covariance with denominator n - 1.
struct SampleMoments {
    Eigen::Index n = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::vector<std::string> variable_names;
    std::vector<std::string> warnings;

    Eigen::Index p() const noexcept { return mean.size(); }
};

/// Throws Error(InsufficientData) for n < 2, Error(NonFiniteValue) on NaN/inf.
/// Zero-variance columns add a warning.
SampleMoments compute_moments(const Dataset& data);

}  // namespace smm
