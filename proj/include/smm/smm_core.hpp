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

// Closed-form structured-means relations between loadings, intercepts,
// factor means and observed expectations.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smm {

inline constexpr double kLoadingFloor = 1e-8;
inline constexpr double kEqualLoadingFloor = 1e-12;
inline constexpr double kProportionalityCvThreshold = 0.05;

/// nu + Lambda * theta.
Eigen::VectorXd expected_means(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& nu);

/// Least-squares factor means (Lambda' Lambda)^-1 Lambda' (m - nu).
/// Throws Error(SingularCrossproduct) when Lambda lacks full column rank.
Eigen::VectorXd factor_means_ls(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& m,
                                const Eigen::VectorXd& nu);

/// Elementwise m / lambda. Throws Error(DivisionByNearZeroLoading) naming the
/// first variable whose |loading| is below kLoadingFloor.
Eigen::VectorXd hadamard_ratio(const Eigen::VectorXd& m, const Eigen::VectorXd& lambda_col);

/// Factor mean of a one-factor model with every loading equal to w:
/// (1'm) / (p w). Throws Error(Theorem1Divergence) when |w| < kEqualLoadingFloor,
/// since |theta| grows without bound as w shrinks.
double equal_loading_mean(double w, const Eigen::VectorXd& m);

struct ProportionalityReport {
    enum class Verdict { Consistent, Inconsistent };

    std::vector<std::optional<double>> ratios;  // empty where |loading| < floor
    double mean_ratio = 0.0;
    double cv = 0.0;
    double rank_corr = 0.0;  // Spearman(|lambda|, m); NaN when a rank vector is constant
    Verdict verdict = Verdict::Consistent;
    std::vector<std::string> warnings;
};

const char* to_string(ProportionalityReport::Verdict verdict) noexcept;

/// Descriptive check of how close observed means are to proportional with the
/// loadings of a one-factor model. cv uses the n - 1 standard deviation.
ProportionalityReport proportionality_report(const Eigen::VectorXd& lambda_hat, const Eigen::VectorXd& xbar,
                                             double cv_threshold = kProportionalityCvThreshold,
                                             const std::vector<std::string>& variable_names = {});

/// Spearman rank correlation with average ranks for ties.
double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace smm
