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

#include "smm/simulate.hpp"

#include <cmath>

#include "smm/error.hpp"
#include "smm/random.hpp"

namespace smm {

namespace {

std::vector<std::string> default_names(Eigen::Index p)
{
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < p; ++i) names.push_back("x" + std::to_string(i + 1));
    return names;
}

Eigen::VectorXd mean_vector(const PopulationModel& pop)
{
    if (const auto* s = std::get_if<StructuredMeans>(&pop.means)) return s->nu + pop.lambda * s->theta;
    return std::get<ExplicitMeans>(pop.means).m;
}

Eigen::MatrixXd covariance(const PopulationModel& pop)
{
    Eigen::MatrixXd sigma = pop.lambda * pop.phi * pop.lambda.transpose();
    sigma.diagonal() += pop.psi2;
    return 0.5 * (sigma + sigma.transpose());
}

}  // namespace

void check_population(const PopulationModel& pop)
{
    const Eigen::Index p = pop.lambda.rows();
    const Eigen::Index q = pop.lambda.cols();
    if (p < 1 || q < 1 || pop.phi.rows() != q || pop.phi.cols() != q || pop.psi2.size() != p)
        throw Error(ErrorCode::DimensionMismatch, "population matrices have inconsistent dimensions");
    if (const auto* s = std::get_if<StructuredMeans>(&pop.means)) {
        if (s->nu.size() != p || s->theta.size() != q)
            throw Error(ErrorCode::DimensionMismatch, "structured means need p intercepts and q factor means");
    } else if (std::get<ExplicitMeans>(pop.means).m.size() != p) {
        throw Error(ErrorCode::DimensionMismatch, "explicit means need p entries");
    }
    if (!pop.variable_names.empty() && static_cast<Eigen::Index>(pop.variable_names.size()) != p)
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(p) + " variable names");
    if ((pop.phi - pop.phi.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw Error(ErrorCode::NotPositiveDefinite, "phi is not symmetric");
    cholesky(pop.phi);
    for (Eigen::Index i = 0; i < p; ++i)
        if (!(pop.psi2(i) > 0.0))
            throw Error(ErrorCode::NonPositiveVariance, "unique variance " + std::to_string(i + 1) + " is not positive");
    cholesky(covariance(pop));
}

PopulationMoments population_moments(const PopulationModel& pop)
{
    return {mean_vector(pop), covariance(pop)};
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& sigma)
{
    const Eigen::Index p = sigma.rows();
    if (sigma.cols() != p) throw Error(ErrorCode::DimensionMismatch, "cholesky needs a square matrix");
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double pivot = sigma(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > 1e-12))
            throw Error(ErrorCode::NotPositiveDefinite, "pivot " + std::to_string(j + 1) + " is not positive");
        l(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < p; ++i) {
            double acc = sigma(i, j);
            for (Eigen::Index k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            l(i, j) = acc / l(j, j);
        }
    }
    return l;
}

Dataset draw_sample(const PopulationModel& pop, Eigen::Index n, Seed seed)
{
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
    const PopulationMoments moments = population_moments(pop);
    const Eigen::MatrixXd l = cholesky(moments.sigma);
    const Eigen::Index p = l.rows();

    Dataset data;
    data.values.resize(n, p);
    data.variable_names = pop.variable_names.empty() ? default_names(p) : pop.variable_names;

    NormalStream normals(seed.master);
    Eigen::VectorXd z(p);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index j = 0; j < p; ++j) z(j) = normals.next();
        // explicit loop keeps the summation order fixed
        for (Eigen::Index i = 0; i < p; ++i) {
            double acc = moments.m(i);
            for (Eigen::Index k = 0; k <= i; ++k) acc += l(i, k) * z(k);
            data.values(r, i) = acc;
        }
    }
    return data;
}

SampleMoments population_sample_moments(const PopulationModel& pop, Eigen::Index nominal_n)
{
    const PopulationMoments moments = population_moments(pop);
    SampleMoments out;
    out.n = nominal_n;
    out.mean = moments.m;
    out.cov = moments.sigma;
    out.variable_names = pop.variable_names.empty() ? default_names(pop.p()) : pop.variable_names;
    return out;
}

namespace {

PopulationModel reference_base()
{
    PopulationModel pop;
    pop.lambda.resize(5, 1);
    pop.lambda << 0.3, 0.4, 0.5, 0.6, 0.7;
    pop.phi = Eigen::MatrixXd::Identity(1, 1);
    pop.psi2 = Eigen::VectorXd::Ones(5);
    pop.variable_names = default_names(5);
    return pop;
}

}  // namespace

PopulationModel reference_model1()
{
    PopulationModel pop = reference_base();
    pop.means = StructuredMeans{Eigen::VectorXd::Zero(5), Eigen::VectorXd::Constant(1, 10.0)};
    return pop;
}

PopulationModel reference_model2()
{
    PopulationModel pop = reference_base();
    Eigen::VectorXd m(5);
    m << 7.0, 6.0, 5.0, 4.0, 3.0;
    pop.means = ExplicitMeans{m};
    return pop;
}

}  // namespace smm
