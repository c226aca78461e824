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

#include <doctest.h>

#include <random>
#include <sstream>

#include "smm/error.hpp"
#include "smm/model_spec.hpp"

using namespace smm;

namespace {

ModelSpec one_factor_spec() { return single_factor_means_spec({"x1", "x2", "x3", "x4", "x5"}); }

std::string serialize(const ModelSpec& spec, const ParameterIndex& index)
{
    std::ostringstream out;
    for (const auto& ref : index.refs) out << parameter_name(spec, ref) << ';';
    return out.str();
}

}  // namespace

TEST_CASE("one-factor means specification is valid with t = 11 and df = 9")
{
    const ValidationReport r = validate(one_factor_spec());
    CHECK(r.is_valid);
    CHECK(r.t == 11);
    CHECK(r.df == 9);
    CHECK(r.warnings.empty());
}

TEST_CASE("free intercepts plus a free factor mean are underidentified")
{
    ModelSpec spec = one_factor_spec();
    for (std::size_t i = 0; i < 5; ++i) spec.nu(i) = free_cell(0.0);
    const ValidationReport r = validate(spec);
    CHECK_FALSE(r.is_valid);
    CHECK(r.has_error("MEAN_STRUCTURE_UNDERIDENTIFIED"));
}

TEST_CASE("saturated mean structure warns")
{
    ModelSpec spec = one_factor_spec();
    for (std::size_t i = 1; i < 5; ++i) spec.nu(i) = free_cell(0.0);
    const ValidationReport r = validate(spec);
    CHECK(r.is_valid);
    CHECK(r.has_warning("MEAN_STRUCTURE_SATURATED"));
}

TEST_CASE("non-positive fixed variances are rejected")
{
    ModelSpec spec = one_factor_spec();
    spec.psi2(2) = fixed_cell(-0.1);
    ValidationReport r = validate(spec);
    CHECK_FALSE(r.is_valid);
    CHECK(r.has_error("NEGATIVE_FIXED_VARIANCE"));

    spec = one_factor_spec();
    spec.phi(0, 0) = fixed_cell(0.0);
    r = validate(spec);
    CHECK(r.has_error("NEGATIVE_FIXED_VARIANCE"));

    spec = one_factor_spec();
    spec.psi2(0) = free_cell(0.0);
    CHECK(validate(spec).has_error("INVALID_START"));
}

TEST_CASE("too many parameters")
{
    ModelSpec spec(2, 1);
    spec.theta(0) = free_cell(0.0);
    spec.nu(0) = free_cell(0.0);
    // 2 loadings + 2 psi2 + 1 nu + theta = 6 > 5 moments
    const ValidationReport r = validate(spec);
    CHECK(r.has_error("TOO_MANY_PARAMETERS"));
    CHECK(r.df == -1);
}

TEST_CASE("dimension checks")
{
    CHECK(validate(ModelSpec(2, 3)).has_error("DIMENSION_MISMATCH"));
    CHECK(validate(ModelSpec(0, 1)).has_error("DIMENSION_MISMATCH"));
    ModelSpec spec = one_factor_spec();
    spec.variable_names.pop_back();
    CHECK(validate(spec).has_error("DIMENSION_MISMATCH"));
    spec = one_factor_spec();
    spec.lambda(0, 0) = free_cell(std::nan(""));
    CHECK(validate(spec).has_error("NON_FINITE_VALUE"));
}

TEST_CASE("parameter index order")
{
    ModelSpec spec(3, 2);
    spec.phi(1, 0) = free_cell(0.0);
    spec.nu(1) = free_cell(0.0);
    spec.theta(1) = free_cell(0.0);
    const ParameterIndex index = parameter_index(spec);
    REQUIRE(index.size() == 6 + 1 + 3 + 1 + 1);
    CHECK(index.refs[0] == ParameterRef{Block::Lambda, 0, 0});
    CHECK(index.refs[2] == ParameterRef{Block::Lambda, 2, 0});
    CHECK(index.refs[3] == ParameterRef{Block::Lambda, 0, 1});
    CHECK(index.refs[6] == ParameterRef{Block::Phi, 1, 0});
    CHECK(index.refs[7] == ParameterRef{Block::Psi2, 0, 0});
    CHECK(index.refs[10] == ParameterRef{Block::Nu, 1, 0});
    CHECK(index.refs[11] == ParameterRef{Block::Theta, 1, 0});
    CHECK(serialize(spec, index) == serialize(spec, parameter_index(spec)));
    CHECK(parameter_name(spec, index.refs[6]) == "phi[F2,F1]");
}

TEST_CASE("parameter index sizes")
{
    CHECK(parameter_index(one_factor_spec()).size() == 11);

    ModelSpec fixed(3, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        fixed.lambda(i, 0) = fixed_cell(0.5);
        fixed.psi2(i) = fixed_cell(1.0);
    }
    CHECK(parameter_index(fixed).size() == 0);

    ModelSpec bad = one_factor_spec();
    bad.psi2(0) = fixed_cell(-1.0);
    CHECK_THROWS_AS(parameter_index(bad), Error);
}

TEST_CASE("flatten after unflatten is the identity on random vectors")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    ModelSpec spec(4, 2);
    spec.phi(1, 0) = free_cell(0.1);
    spec.nu(0) = free_cell(0.0);
    spec.theta(0) = free_cell(0.0);
    const ParameterIndex index = parameter_index(spec);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(index.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
        const ModelValues values = unflatten(spec, index, v);
        CHECK(flatten(index, values) == v);
        CHECK(values.phi(0, 1) == values.phi(1, 0));
    }
    CHECK(flatten(index, start_values(spec)).size() == static_cast<Eigen::Index>(index.size()));
    CHECK_THROWS_AS(unflatten(spec, index, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("df + t equals the moment count for random valid specs")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t q = 1 + rng() % 3;
        const std::size_t p = q + rng() % 6;
        ModelSpec spec(p, q);
        for (std::size_t i = 0; i < p; ++i) {
            if (rng() % 3 == 0) spec.lambda(i, 0) = fixed_cell(0.0);
            if (rng() % 4 == 0) spec.nu(i) = free_cell(0.0);
        }
        const ValidationReport r = validate(spec);
        if (!r.is_valid) continue;
        CHECK(r.df + static_cast<long>(r.t) == moment_count(p));
    }
}

TEST_CASE("fix_intercept_variant")
{
    const ModelSpec base = one_factor_spec();
    const ModelSpec x1 = fix_intercept_variant(base, 0);
    const ModelSpec x5 = fix_intercept_variant(base, 4);
    CHECK(x1.nu(0) == fixed_cell(0.0));
    for (std::size_t i = 1; i < 5; ++i) CHECK(x1.nu(i) == free_cell(0.0));
    CHECK(x5.nu(4) == fixed_cell(0.0));
    CHECK(x1.theta(0).is_free());
    CHECK(x1.lambda(2, 0) == base.lambda(2, 0));
    CHECK(x1.psi2(3) == base.psi2(3));

    const ValidationReport r1 = validate(x1);
    const ValidationReport r5 = validate(x5);
    CHECK(r1.t == 15);
    CHECK(r1.df == 5);
    CHECK(r5.t == r1.t);
    CHECK(r5.df == r1.df);
    for (std::size_t a = 0; a < 5; ++a) CHECK(validate(fix_intercept_variant(base, a)).df == 5);

    try {
        fix_intercept_variant(base, 7);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
    try {
        fix_intercept_variant(ModelSpec(4, 2), 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotImplemented);
    }
}
