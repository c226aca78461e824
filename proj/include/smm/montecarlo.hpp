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
#include <optional>
#include <string>
#include <vector>

#include "smm/estimator.hpp"
#include "smm/model_spec.hpp"
#include "smm/simulate.hpp"

namespace smm {

struct StudyConfig {
    std::string name;
    PopulationModel population;
    ModelSpec spec;
    std::vector<Eigen::Index> sample_sizes;
    int replications = 0;
    Seed seed;
    int max_parallelism = 1;
    FitOptions fit_options;
    std::string reference;  // key into the reference table, empty for none
};

struct ParameterSummary {
    std::string name;
    ParameterRef ref;
    double mean = 0.0;
    double sd = 0.0;
};

struct ReplicationSummary {
    Eigen::Index n = 0;
    int replications = 0;
    int r_effective = 0;
    int convergence_failures = 0;
    std::vector<ParameterSummary> parameters;
    double chi_square_mean = 0.0;
    double chi_square_sd = 0.0;
    long df = 0;

    const ParameterSummary* find(const ParameterRef& ref) const;
};

struct StudySummary {
    std::string name;
    std::string reference;
    std::uint64_t seed = 0;
    std::vector<ReplicationSummary> conditions;
};

/// Seed of replication `rep` in condition `condition`:
/// mix64(mix64(mix64(master) + G (condition + 1)) + G (rep + 1)), G the golden gamma.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t condition, std::uint64_t rep) noexcept;

/// Means and SDs (denominator R_effective - 1) over converged fits. `results`
/// holds one entry per replication; std::nullopt marks a replication whose
/// data could not be fitted at all. Throws Error(EmptyResultSet) when nothing
/// converged.
ReplicationSummary aggregate(const std::vector<std::optional<FitResult>>& results, const ModelSpec& spec);

/// Throws Error(InvalidSpec) for an invalid model or empty design, and
/// Error(ConditionDegenerate) when every replication of a condition failed.
/// Output does not depend on max_parallelism.
StudySummary run_study(const StudyConfig& config);

struct ReferenceStat {
    double mean = 0.0;
    double sd = 0.0;
};

struct ReferenceCell {
    std::string model;
    Eigen::Index n = 0;
    std::vector<ReferenceStat> loadings;  // empty when not reported
    ReferenceStat factor_mean;
    std::optional<ReferenceStat> chi_square;
    long df = 0;
};

struct ReferenceTable {
    std::vector<ReferenceCell> cells;

    const ReferenceCell* find(const std::string& model, Eigen::Index n) const;
};

/// Published single-group results (2,000 replications per cell): "model1"
/// and "model2" at N = 150, 300, 900, plus the anchored-intercept Model 2
/// runs "model2_anchor_x1" and "model2_anchor_x5" at N = 900.
const ReferenceTable& reference_table();

struct ComparisonRow {
    std::string condition;
    std::string quantity;
    double artifact = 0.0;
    double reference = 0.0;
    double reference_sd = 0.0;
    double deviation = 0.0;
    double z = 0.0;
    double tolerance = 0.0;
    bool gated = true;  // SD rows are informational
    bool pass = false;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;

    bool all_pass() const;
};

// Reported values carry two decimals.
inline constexpr double kReferenceRounding = 0.005;

/// Mean rows pass when |deviation| <= 4 SD/sqrt(R) + rounding; chi-square
/// means use max(4 SD/sqrt(R), 1% of the reference). Throws
/// Error(MismatchedConditions) when a condition has no reference cell.
ComparisonReport compare_to_reference(const StudySummary& summary, const ReferenceTable& reference);

}  // namespace smm
