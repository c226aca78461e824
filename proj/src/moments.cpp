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

#include "smm/moments.hpp"

#include "smm/error.hpp"

namespace smm {

SampleMoments compute_moments(const Dataset& data)
{
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 2) throw Error(ErrorCode::InsufficientData, "need at least 2 rows, got " + std::to_string(n));
    if (!data.values.allFinite()) throw Error(ErrorCode::NonFiniteValue, "dataset contains non-finite values");

    SampleMoments m;
    m.n = n;
    m.variable_names = data.variable_names;
    m.mean = data.values.colwise().mean().transpose();

    const Eigen::MatrixXd centered = data.values.rowwise() - m.mean.transpose();
    m.cov.resize(p, p);
    const auto denom = static_cast<double>(n - 1);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = 0; k <= j; ++k) {
            const double c = centered.col(j).dot(centered.col(k)) / denom;
            m.cov(j, k) = c;
            m.cov(k, j) = c;
        }
    }

    for (Eigen::Index j = 0; j < p; ++j) {
        if (m.cov(j, j) == 0.0) {
            const std::string name = j < static_cast<Eigen::Index>(m.variable_names.size())
                                         ? m.variable_names[static_cast<std::size_t>(j)]
                                         : "column " + std::to_string(j + 1);
            m.warnings.push_back("zero variance in " + name);
        }
    }
    return m;
}

}  // namespace smm
