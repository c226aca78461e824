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

#include "smm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "smm/error.hpp"
#include "smm/random.hpp"

namespace smm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gradient norm below which a stalled line search still counts as converged.
constexpr double kStallGradientTolerance = 1e-4;

std::optional<double> discrepancy(const Eigen::MatrixXd& s, const Eigen::VectorXd& xbar, double log_det_s,
                                  const ImpliedMoments& implied)
{
    const Eigen::LLT<Eigen::MatrixXd> llt(implied.sigma);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const auto& l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const double d = llt.matrixLLT()(i, i);
        if (!(d > 0.0)) return std::nullopt;
        log_det += 2.0 * std::log(d);
    }
    const double trace = llt.solve(s).trace();
    const Eigen::VectorXd z = l.solve(xbar - implied.mu_model);
    const double f = log_det - log_det_s + trace - static_cast<double>(s.rows()) + z.squaredNorm();
    if (!std::isfinite(f)) return std::nullopt;
    return f;
}

double log_det_pd(const Eigen::MatrixXd& m, const char* what)
{
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    bool ok = llt.info() == Eigen::Success;
    double log_det = 0.0;
    for (Eigen::Index i = 0; ok && i < m.rows(); ++i) {
        const double d = llt.matrixLLT()(i, i);
        ok = d > 1e-12 * std::max(1.0, std::sqrt(std::abs(m(i, i))));
        // log |m| = 2 sum log L_ii
        log_det += 2.0 * std::log(d);
    }
    if (!ok) throw Error(ErrorCode::NotPositiveDefinite, std::string(what) + " is not positive definite");
    return log_det;
}

ImpliedMoments implied_unchecked(const ModelValues& v)
{
    ImpliedMoments out;
    out.sigma = v.lambda * v.phi * v.lambda.transpose();
    out.sigma.diagonal() += v.psi2;
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    out.mu_model = v.nu + v.lambda * v.theta;
    return out;
}

class Objective {
public:
    Objective(const ModelSpec& spec, const ParameterIndex& index, const SampleMoments& sample)
        : spec_(spec), index_(index), s_(sample.cov), xbar_(sample.mean), log_det_s_(log_det_pd(sample.cov, "S"))
    {
    }

    double operator()(const Eigen::VectorXd& internal) const
    {
        const ModelValues v = unflatten(spec_, index_, from_internal(index_, internal));
        if (!v.lambda.allFinite() || !v.phi.allFinite() || !v.psi2.allFinite()) return kInf;
        return discrepancy(s_, xbar_, log_det_s_, implied_unchecked(v)).value_or(kInf);
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const
    {
        return central_difference([this](const Eigen::VectorXd& y) { return (*this)(y); }, x);
    }

private:
    const ModelSpec& spec_;
    const ParameterIndex& index_;
    Eigen::MatrixXd s_;
    Eigen::VectorXd xbar_;
    double log_det_s_;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = kInf;
    int iterations = 0;
    double grad_inf = kInf;
    bool converged = false;
};

// BFGS on the inverse Hessian with a backtracking Armijo line search.
MinimizeResult minimize(const Objective& objective, Eigen::VectorXd x, const FitOptions& options)
{
    MinimizeResult out;
    const Eigen::Index t = x.size();
    double f = objective(x);
    if (!std::isfinite(f)) {
        out.x = x;
        return out;
    }
    if (t == 0) {
        out = {x, f, 0, 0.0, true};
        return out;
    }

    Eigen::VectorXd g = objective.gradient(x);
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(t, t);
    bool fresh_h = true;
    int iter = 0;
    bool converged = false;

    while (iter < options.max_iterations) {
        if (!g.allFinite()) break;
        if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            converged = true;
            break;
        }
        Eigen::VectorXd d = -h * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            h.setIdentity();
            fresh_h = true;
            d = -g;
            slope = -g.squaredNorm();
        }

        double alpha = 1.0;
        double f_new = kInf;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            x_new = x + alpha * d;
            f_new = objective(x_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!fresh_h) {
                h.setIdentity();
                fresh_h = true;
                continue;
            }
            converged = g.lpNorm<Eigen::Infinity>() <= kStallGradientTolerance;
            break;
        }

        ++iter;
        const Eigen::VectorXd g_new = objective.gradient(x_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double decrease = f - f_new;
        x = x_new;
        g = g_new;
        const double f_old = f;
        f = f_new;

        if (decrease <= options.relative_f_tolerance * std::abs(f_old)) {
            converged = true;
            break;
        }

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_h) {
                h *= sy / y.squaredNorm();
                fresh_h = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h * y;
            h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
        }
    }

    out.x = x;
    out.f = f;
    out.iterations = iter;
    out.grad_inf = g.allFinite() ? g.lpNorm<Eigen::Infinity>() : kInf;
    out.converged = converged;
    return out;
}

// Free factor means start at their least-squares value given the starting
// loadings; free intercepts then absorb the remaining mean residual.
void warm_start_means(const ModelSpec& spec, const SampleMoments& sample, ModelValues& v)
{
    bool any_free = false;
    for (std::size_t k = 0; k < spec.q(); ++k) any_free = any_free || spec.theta(k).is_free();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.lambda);
    if (any_free && svd.singularValues().minCoeff() > 1e-10) {
        const Eigen::VectorXd theta0 =
            (v.lambda.transpose() * v.lambda).ldlt().solve(v.lambda.transpose() * (sample.mean - v.nu));
        for (std::size_t k = 0; k < spec.q(); ++k)
            if (spec.theta(k).is_free()) v.theta(static_cast<Eigen::Index>(k)) = theta0(static_cast<Eigen::Index>(k));
    }
    const Eigen::VectorXd residual = sample.mean - v.lambda * v.theta;
    for (std::size_t i = 0; i < spec.p(); ++i)
        if (spec.nu(i).is_free()) v.nu(static_cast<Eigen::Index>(i)) = residual(static_cast<Eigen::Index>(i));
}

// Loadings on each factor summing to a negative value are reflected, along
// with the factor mean and the factor's covariances.
void apply_sign_convention(ModelValues& v)
{
    for (Eigen::Index k = 0; k < v.lambda.cols(); ++k) {
        if (v.lambda.col(k).sum() >= 0.0) continue;
        v.lambda.col(k) *= -1.0;
        v.theta(k) *= -1.0;
        for (Eigen::Index j = 0; j < v.phi.rows(); ++j) {
            if (j == k) continue;
            v.phi(k, j) *= -1.0;
            v.phi(j, k) *= -1.0;
        }
    }
}

}  // namespace

Eigen::VectorXd to_internal(const ParameterIndex& index, const Eigen::VectorXd& free_values)
{
    Eigen::VectorXd out = free_values;
    for (std::size_t i = 0; i < index.size(); ++i)
        if (index.refs[i].block == Block::Psi2) out(static_cast<Eigen::Index>(i)) = std::log(out(static_cast<Eigen::Index>(i)));
    return out;
}

Eigen::VectorXd from_internal(const ParameterIndex& index, const Eigen::VectorXd& internal)
{
    Eigen::VectorXd out = internal;
    for (std::size_t i = 0; i < index.size(); ++i)
        if (index.refs[i].block == Block::Psi2) out(static_cast<Eigen::Index>(i)) = std::exp(out(static_cast<Eigen::Index>(i)));
    return out;
}

ImpliedMoments implied_moments(const ModelValues& values)
{
    for (Eigen::Index i = 0; i < values.psi2.size(); ++i)
        if (!(values.psi2(i) > 0.0))
            throw Error(ErrorCode::NonPositiveVariance, "unique variance " + std::to_string(i + 1) + " is not positive");
    return implied_unchecked(values);
}

ImpliedMoments implied_moments(const ModelSpec& spec, const Eigen::VectorXd& free_values)
{
    return implied_moments(unflatten(spec, parameter_index(spec), free_values));
}

double ml_discrepancy(const SampleMoments& sample, const ImpliedMoments& implied)
{
    if (implied.sigma.rows() != sample.p() || implied.mu_model.size() != sample.p())
        throw Error(ErrorCode::DimensionMismatch, "implied moments and sample differ in p");
    const double log_det_s = log_det_pd(sample.cov, "S");
    log_det_pd(implied.sigma, "implied Sigma");
    const auto f = discrepancy(sample.cov, sample.mean, log_det_s, implied);
    if (!f) throw Error(ErrorCode::NotPositiveDefinite, "implied Sigma is not positive definite");
    return *f;
}

double gradient_step(double x) noexcept { return 1e-6 * std::max(1.0, std::abs(x)); }

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x)
{
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = gradient_step(x(i));
        probe(i) = x(i) + h;
        const double up = f(probe);
        probe(i) = x(i) - h;
        const double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

Eigen::VectorXd numeric_gradient(const ModelSpec& spec, const Eigen::VectorXd& free_values,
                                 const SampleMoments& sample)
{
    const ParameterIndex index = parameter_index(spec);
    if (static_cast<std::size_t>(free_values.size()) != index.size())
        throw Error(ErrorCode::DimensionMismatch, "free_values length differs from the free-parameter count");
    const Objective objective(spec, index, sample);
    const Eigen::VectorXd g = objective.gradient(to_internal(index, free_values));
    if (!g.allFinite())
        throw Error(ErrorCode::NotPositiveDefinite, "discrepancy not evaluable near the requested point");
    return g;
}

FitStatistics fit_statistics(double f_min, Eigen::Index n, const ModelSpec& spec)
{
    if (n < 2) throw Error(ErrorCode::InsufficientData, "n must be at least 2");
    return {static_cast<double>(n - 1) * f_min, validate(spec).df};
}

FitResult fit(const ModelSpec& spec, const SampleMoments& sample, const FitOptions& options)
{
    const ValidationReport report = validate(spec);
    if (!report.is_valid)
        throw Error(ErrorCode::InvalidSpec, report.errors.front().code + ": " + report.errors.front().message);
    const ParameterIndex index = parameter_index(spec);
    if (static_cast<std::size_t>(sample.p()) != spec.p())
        throw Error(ErrorCode::DimensionMismatch, "sample has " + std::to_string(sample.p()) +
                                                      " variables, model has " + std::to_string(spec.p()));
    const Objective objective(spec, index, sample);

    ModelValues start = start_values(spec);
    if (options.warm_start_means) warm_start_means(spec, sample, start);
    const Eigen::VectorXd x0 = to_internal(index, flatten(index, start));
    const double f_start = objective(x0);

    MinimizeResult best = minimize(objective, x0, options);
    int retries = 0;
    const Eigen::VectorXd natural0 = flatten(index, start);
    UniformStream jitter(mix64(options.seed ^ kGoldenGamma));
    while (!best.converged && retries < options.max_restarts) {
        ++retries;
        Eigen::VectorXd natural = natural0;
        for (Eigen::Index i = 0; i < natural.size(); ++i) {
            const double u = options.jitter * (2.0 * jitter.next() - 1.0);
            natural(i) = natural(i) == 0.0 ? u : natural(i) * (1.0 + u);
        }
        MinimizeResult attempt = minimize(objective, to_internal(index, natural), options);
        if (attempt.converged || attempt.f < best.f) best = std::move(attempt);
    }

    FitResult result;
    result.free_estimates = from_internal(index, best.x);
    result.estimates = unflatten(spec, index, result.free_estimates);
    apply_sign_convention(result.estimates);
    result.free_estimates = flatten(index, result.estimates);
    result.f_start = f_start;
    result.f_min = std::max(0.0, best.f);
    const FitStatistics stats = fit_statistics(result.f_min, sample.n, spec);
    result.chi_square = stats.chi_square;
    result.df = stats.df;
    result.n = sample.n;
    result.converged = best.converged && std::isfinite(best.f);
    result.iterations = best.iterations;
    result.grad_inf_norm = best.grad_inf;
    result.retries_used = retries;
    return result;
}

}  // namespace smm
