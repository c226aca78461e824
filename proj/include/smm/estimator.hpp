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

// Maximum-likelihood fitting of mean and covariance structures.
//
// Discrepancy, for implied (Sigma, mu) and sample (S, xbar):
//   F = ln|Sigma| - ln|S| + tr(S Sigma^-1) - p + (xbar - mu)' Sigma^-1 (xbar - mu)
// Test statistic T = (n - 1) F_min with S on denominator n - 1.
//
// The optimizer works on an unconstrained vector in which unique variances
// appear as log(psi2); everything else is on its natural scale.

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "smm/model_spec.hpp"
#include "smm/moments.hpp"

namespace smm {

struct ImpliedMoments {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd mu_model;
};

/// free_values on the natural scale, ordered by parameter_index(spec).
/// Throws Error(NonPositiveVariance) if any unique variance ends up <= 0.
ImpliedMoments implied_moments(const ModelSpec& spec, const Eigen::VectorXd& free_values);
ImpliedMoments implied_moments(const ModelValues& values);

/// Throws Error(NotPositiveDefinite) when Sigma or S is not positive definite.
double ml_discrepancy(const SampleMoments& sample, const ImpliedMoments& implied);

struct FitOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double relative_f_tolerance = 1e-10;
    int max_restarts = 3;
    double jitter = 0.2;
    std::uint64_t seed = 0;
    /// Start free factor means at LS values and free intercepts at residual means.
    bool warm_start_means = true;
};

struct FitResult {
    ModelValues estimates;
    Eigen::VectorXd free_estimates;  // natural scale, parameter_index order
    double f_start = 0.0;
    double f_min = 0.0;
    double chi_square = 0.0;
    long df = 0;
    Eigen::Index n = 0;
    bool converged = false;
    int iterations = 0;
    double grad_inf_norm = 0.0;
    int retries_used = 0;
};

/// Throws Error(InvalidSpec), Error(DimensionMismatch) or
/// Error(NotPositiveDefinite) for unusable input. Non-convergence after all
/// restarts is reported through FitResult::converged.
FitResult fit(const ModelSpec& spec, const SampleMoments& sample, const FitOptions& options = {});

/// Natural <-> optimizer coordinates (log for unique variances).
Eigen::VectorXd to_internal(const ParameterIndex& index, const Eigen::VectorXd& free_values);
Eigen::VectorXd from_internal(const ParameterIndex& index, const Eigen::VectorXd& internal);

/// Step used for coordinate i: 1e-6 * max(1, |x_i|).
double gradient_step(double x) noexcept;

/// Central differences of an arbitrary objective.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x);

/// Gradient of F with respect to the optimizer coordinates, evaluated at
/// natural-scale free_values.
Eigen::VectorXd numeric_gradient(const ModelSpec& spec, const Eigen::VectorXd& free_values,
                                 const SampleMoments& sample);

struct FitStatistics {
    double chi_square = 0.0;
    long df = 0;
};

FitStatistics fit_statistics(double f_min, Eigen::Index n, const ModelSpec& spec);

}  // namespace smm
