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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "smm/moments.hpp"

namespace smm {

struct StructuredMeans {
    Eigen::VectorXd nu;
    Eigen::VectorXd theta;
};

struct ExplicitMeans {
    Eigen::VectorXd m;
};

/// Generating model: x ~ Normal(mean, Lambda Phi Lambda' + diag(psi2)).
struct PopulationModel {
    Eigen::MatrixXd lambda;
    Eigen::MatrixXd phi;
    Eigen::VectorXd psi2;
    std::variant<StructuredMeans, ExplicitMeans> means;
    std::vector<std::string> variable_names;

    Eigen::Index p() const noexcept { return lambda.rows(); }
};

/// Throws Error(DimensionMismatch), Error(NonPositiveVariance) or
/// Error(NotPositiveDefinite) when the population is unusable.
void check_population(const PopulationModel& pop);

struct Seed {
    std::uint64_t master = 0;
};

struct PopulationMoments {
    Eigen::VectorXd m;
    Eigen::MatrixXd sigma;
};

PopulationMoments population_moments(const PopulationModel& pop);

/// Lower-triangular L with L L' = sigma. Throws Error(NotPositiveDefinite)
/// when a pivot is <= 1e-12.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& sigma);

/// n rows of m + L z, z drawn row-major from NormalStream(seed.master).
Dataset draw_sample(const PopulationModel& pop, Eigen::Index n, Seed seed);

/// Exact population moments as SampleMoments with a nominal sample size.
SampleMoments population_sample_moments(const PopulationModel& pop, Eigen::Index nominal_n);

/// One-factor populations with loadings .3 .. .7, unit factor variance and
/// unit unique variances. Model 1 has means 10 * lambda; Model 2 has the
/// same loadings with means 7, 6, 5, 4, 3.
PopulationModel reference_model1();
PopulationModel reference_model2();

}  // namespace smm
