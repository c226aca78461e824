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

#include "smm/smm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smm/error.hpp"

namespace smm {

namespace {

std::string label(const std::vector<std::string>& names, Eigen::Index i)
{
    return i < static_cast<Eigen::Index>(names.size()) ? names[static_cast<std::size_t>(i)]
                                                       : "variable " + std::to_string(i + 1);
}

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v)
{
    const Eigen::Index n = v.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
    Eigen::VectorXd ranks(n);
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v(order[j + 1]) == v(order[i])) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks(order[k]) = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

Eigen::VectorXd expected_means(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& nu)
{
    if (lambda.cols() != theta.size() || lambda.rows() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "lambda is " + std::to_string(lambda.rows()) + "x" +
                                                      std::to_string(lambda.cols()) + ", theta has " +
                                                      std::to_string(theta.size()) + ", nu has " +
                                                      std::to_string(nu.size()));
    return nu + lambda * theta;
}

Eigen::VectorXd factor_means_ls(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& m,
                                const Eigen::VectorXd& nu)
{
    if (lambda.rows() != m.size() || m.size() != nu.size())
        throw Error(ErrorCode::DimensionMismatch, "lambda rows, m and nu must have equal length");
    if (lambda.cols() == 0 || lambda.cols() > lambda.rows())
        throw Error(ErrorCode::SingularCrossproduct, "lambda must have 1..p columns");

    const Eigen::MatrixXd cross = lambda.transpose() * lambda;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(cross);
    // Rank check on the crossproduct relative to its own scale.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lambda);
    const auto& sv = svd.singularValues();
    const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(lambda.rows()) *
                       std::max(sv(0), 1.0);
    if (sv(sv.size() - 1) <= tol || ldlt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularCrossproduct, "lambda does not have full column rank");

    return ldlt.solve(lambda.transpose() * (m - nu));
}

Eigen::VectorXd hadamard_ratio(const Eigen::VectorXd& m, const Eigen::VectorXd& lambda_col)
{
    if (m.size() != lambda_col.size())
        throw Error(ErrorCode::DimensionMismatch, "m and lambda must have equal length");
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!(std::abs(lambda_col(i)) >= kLoadingFloor))
            throw Error(ErrorCode::DivisionByNearZeroLoading, "loading of variable " + std::to_string(i + 1) +
                                                                  " is below the floor");
    }
    return m.cwiseQuotient(lambda_col);
}

double equal_loading_mean(double w, const Eigen::VectorXd& m)
{
    if (m.size() == 0) throw Error(ErrorCode::InvalidArgument, "m is empty");
    if (!(std::abs(w) >= kEqualLoadingFloor))
        throw Error(ErrorCode::Theorem1Divergence,
                    "equal loading w is numerically zero; the factor mean diverges as w -> 0");
    return m.sum() / (static_cast<double>(m.size()) * w);
}

const char* to_string(ProportionalityReport::Verdict verdict) noexcept
{
    return verdict == ProportionalityReport::Verdict::Consistent ? "CONSISTENT" : "INCONSISTENT";
}

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "spearman inputs differ in length");
    if (a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const Eigen::VectorXd ra = average_ranks(a).array() - average_ranks(a).mean();
    const Eigen::VectorXd rb = average_ranks(b).array() - average_ranks(b).mean();
    const double denom = std::sqrt(ra.squaredNorm() * rb.squaredNorm());
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return ra.dot(rb) / denom;
}

ProportionalityReport proportionality_report(const Eigen::VectorXd& lambda_hat, const Eigen::VectorXd& xbar,
                                             double cv_threshold, const std::vector<std::string>& variable_names)
{
    if (lambda_hat.size() != xbar.size())
        throw Error(ErrorCode::DimensionMismatch, "loadings and means must have equal length");
    if (lambda_hat.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least 2 variables");

    ProportionalityReport report;
    std::vector<double> used;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < lambda_hat.size(); ++i) {
        if (std::abs(lambda_hat(i)) >= kLoadingFloor) {
            const double r = xbar(i) / lambda_hat(i);
            report.ratios.emplace_back(r);
            used.push_back(r);
            kept.push_back(i);
        } else {
            report.ratios.emplace_back(std::nullopt);
            report.warnings.push_back(to_string(ErrorCode::DivisionByNearZeroLoading).data() +
                                      std::string(": ") + label(variable_names, i) + " excluded");
        }
    }
    if (used.size() < 2) throw Error(ErrorCode::InsufficientData, "fewer than 2 usable loadings");

    const auto k = static_cast<double>(used.size());
    report.mean_ratio = std::accumulate(used.begin(), used.end(), 0.0) / k;
    double ss = 0.0;
    for (double r : used) ss += (r - report.mean_ratio) * (r - report.mean_ratio);
    const double sd = std::sqrt(ss / (k - 1.0));
    report.cv = report.mean_ratio == 0.0 ? (sd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                         : sd / std::abs(report.mean_ratio);

    Eigen::VectorXd abs_l(static_cast<Eigen::Index>(kept.size()));
    Eigen::VectorXd ms(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        abs_l(static_cast<Eigen::Index>(j)) = std::abs(lambda_hat(kept[j]));
        ms(static_cast<Eigen::Index>(j)) = xbar(kept[j]);
    }
    report.rank_corr = spearman(abs_l, ms);
    report.verdict = report.cv <= cv_threshold ? ProportionalityReport::Verdict::Consistent
                                               : ProportionalityReport::Verdict::Inconsistent;
    return report;
}

}  // namespace smm
