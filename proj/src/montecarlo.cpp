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

#include "smm/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "smm/error.hpp"
#include "smm/random.hpp"

namespace smm {

const ParameterSummary* ReplicationSummary::find(const ParameterRef& ref) const
{
    for (const auto& p : parameters)
        if (p.ref == ref) return &p;
    return nullptr;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t condition, std::uint64_t rep) noexcept
{
    const std::uint64_t c = mix64(mix64(master) + kGoldenGamma * (condition + 1));
    return mix64(c + kGoldenGamma * (rep + 1));
}

namespace {

// Two-pass mean and SD in index order.
ReferenceStat mean_sd(const std::vector<double>& xs)
{
    ReferenceStat out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

}  // namespace

ReplicationSummary aggregate(const std::vector<std::optional<FitResult>>& results, const ModelSpec& spec)
{
    const ParameterIndex index = parameter_index(spec);
    std::vector<const FitResult*> ok;
    for (const auto& r : results)
        if (r && r->converged) ok.push_back(&*r);
    if (ok.empty()) throw Error(ErrorCode::EmptyResultSet, "no converged replications to aggregate");

    ReplicationSummary summary;
    summary.n = ok.front()->n;
    summary.replications = static_cast<int>(results.size());
    summary.r_effective = static_cast<int>(ok.size());
    summary.convergence_failures = summary.replications - summary.r_effective;
    summary.df = ok.front()->df;

    std::vector<double> column(ok.size());
    for (std::size_t j = 0; j < index.size(); ++j) {
        for (std::size_t r = 0; r < ok.size(); ++r)
            column[r] = ok[r]->free_estimates(static_cast<Eigen::Index>(j));
        const ReferenceStat s = mean_sd(column);
        summary.parameters.push_back({parameter_name(spec, index.refs[j]), index.refs[j], s.mean, s.sd});
    }
    for (std::size_t r = 0; r < ok.size(); ++r) column[r] = ok[r]->chi_square;
    const ReferenceStat chi = mean_sd(column);
    summary.chi_square_mean = chi.mean;
    summary.chi_square_sd = chi.sd;
    return summary;
}

StudySummary run_study(const StudyConfig& config)
{
    const ValidationReport report = validate(config.spec);
    if (!report.is_valid)
        throw Error(ErrorCode::InvalidSpec, report.errors.front().code + ": " + report.errors.front().message);
    if (config.replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be at least 1");
    if (config.sample_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no sample sizes given");
    for (Eigen::Index n : config.sample_sizes)
        if (n < 2) throw Error(ErrorCode::InvalidArgument, "sample sizes must be at least 2");
    if (config.population.p() != static_cast<Eigen::Index>(config.spec.p()))
        throw Error(ErrorCode::DimensionMismatch, "population and model differ in p");
    check_population(config.population);

    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t conditions = config.sample_sizes.size();
    const std::size_t total = reps * conditions;
    std::vector<std::optional<FitResult>> slots(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t task = next++; task < total; task = next++) {
            const std::size_t c = task / reps;
            const std::size_t r = task % reps;
            const std::uint64_t seed = split_seed(config.seed.master, c, r);
            try {
                const Dataset data = draw_sample(config.population, config.sample_sizes[c], Seed{seed});
                const SampleMoments moments = compute_moments(data);
                FitOptions options = config.fit_options;
                options.seed = seed;
                slots[task] = fit(config.spec, moments, options);
            } catch (const Error&) {
                slots[task].reset();
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, config.max_parallelism));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < std::min(threads, total); ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    StudySummary summary;
    summary.name = config.name;
    summary.reference = config.reference;
    summary.seed = config.seed.master;
    for (std::size_t c = 0; c < conditions; ++c) {
        std::vector<std::optional<FitResult>> cell(std::make_move_iterator(slots.begin() + c * reps),
                                                   std::make_move_iterator(slots.begin() + (c + 1) * reps));
        try {
            summary.conditions.push_back(aggregate(cell, config.spec));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyResultSet) throw;
            throw Error(ErrorCode::ConditionDegenerate,
                        "every replication failed at N=" + std::to_string(config.sample_sizes[c]));
        }
        summary.conditions.back().n = config.sample_sizes[c];
    }
    return summary;
}

const ReferenceCell* ReferenceTable::find(const std::string& model, Eigen::Index n) const
{
    for (const auto& cell : cells)
        if (cell.model == model && cell.n == n) return &cell;
    return nullptr;
}

const ReferenceTable& reference_table()
{
    static const ReferenceTable table{{
        {"model1", 900, {{.30, .01}, {.40, .02}, {.50, .02}, {.60, .03}, {.70, .03}}, {10.04, 0.43}, ReferenceStat{9.15, 4.26}, 9},
        {"model2", 900, {{.56, .03}, {.48, .03}, {.40, .02}, {.32, .02}, {.24, .01}}, {12.49, 0.66}, ReferenceStat{126.82, 22.88}, 9},
        {"model1", 300, {{.30, .02}, {.40, .03}, {.50, .04}, {.60, .05}, {.70, .05}}, {10.10, 0.79}, ReferenceStat{9.01, 4.28}, 9},
        {"model2", 300, {{.56, .05}, {.48, .04}, {.40, .04}, {.32, .03}, {.24, .02}}, {12.59, 1.21}, ReferenceStat{48.47, 13.42}, 9},
        {"model1", 150, {{.30, .03}, {.40, .04}, {.49, .05}, {.59, .06}, {.69, .07}}, {10.25, 1.16}, ReferenceStat{9.16, 4.32}, 9},
        {"model2", 150, {{.56, .07}, {.48, .06}, {.40, .05}, {.32, .04}, {.24, .03}}, {12.83, 1.89}, ReferenceStat{28.46, 9.99}, 9},
        {"model2_anchor_x1", 900, {}, {23.82, 3.90}, std::nullopt, 5},
        {"model2_anchor_x5", 900, {}, {4.32, 0.37}, std::nullopt, 5},
    }};
    return table;
}

bool ComparisonReport::all_pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return !r.gated || r.pass; });
}

namespace {

ComparisonRow compare(std::string condition, std::string quantity, double artifact, ReferenceStat ref,
                      double standard_error_scale, double tolerance, bool gated)
{
    ComparisonRow row;
    row.condition = std::move(condition);
    row.quantity = std::move(quantity);
    row.artifact = artifact;
    row.reference = ref.mean;
    row.reference_sd = ref.sd;
    row.deviation = artifact - ref.mean;
    const double se = ref.sd * standard_error_scale;
    row.z = se > 0.0 ? row.deviation / se : (row.deviation == 0.0 ? 0.0 : std::copysign(INFINITY, row.deviation));
    row.tolerance = tolerance;
    row.gated = gated;
    row.pass = std::abs(row.deviation) <= tolerance;
    return row;
}

}  // namespace

ComparisonReport compare_to_reference(const StudySummary& summary, const ReferenceTable& reference)
{
    ComparisonReport report;
    for (const auto& cond : summary.conditions) {
        const ReferenceCell* cell = reference.find(summary.reference, cond.n);
        if (!cell)
            throw Error(ErrorCode::MismatchedConditions,
                        "no reference for '" + summary.reference + "' at N=" + std::to_string(cond.n));
        const std::string label = summary.reference + " N=" + std::to_string(cond.n);
        const double mean_scale = 1.0 / std::sqrt(static_cast<double>(cond.r_effective));
        const double sd_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(cond.r_effective));

        auto add_pair = [&](const std::string& name, const ParameterSummary& got, ReferenceStat ref) {
            report.rows.push_back(compare(label, name + " mean", got.mean, ref, mean_scale,
                                          4.0 * ref.sd * mean_scale + kReferenceRounding, true));
            report.rows.push_back(compare(label, name + " sd", got.sd, {ref.sd, ref.sd}, sd_scale,
                                          4.0 * ref.sd * sd_scale + kReferenceRounding, false));
        };

        for (std::size_t i = 0; i < cell->loadings.size(); ++i) {
            const ParameterSummary* got = cond.find({Block::Lambda, i, 0});
            if (!got)
                throw Error(ErrorCode::MismatchedConditions, "loading " + std::to_string(i + 1) + " is not free");
            add_pair(got->name, *got, cell->loadings[i]);
        }
        const ParameterSummary* theta = cond.find({Block::Theta, 0, 0});
        if (!theta) throw Error(ErrorCode::MismatchedConditions, "factor mean is not free");
        add_pair(theta->name, *theta, cell->factor_mean);

        if (cell->chi_square) {
            const ReferenceStat chi = *cell->chi_square;
            report.rows.push_back(compare(label, "chi_square mean", cond.chi_square_mean, chi, mean_scale,
                                          std::max(4.0 * chi.sd * mean_scale, 0.01 * std::abs(chi.mean)), true));
            report.rows.push_back(compare(label, "chi_square sd", cond.chi_square_sd, {chi.sd, chi.sd}, sd_scale,
                                          4.0 * chi.sd * sd_scale + kReferenceRounding, false));
        }
        report.rows.push_back(compare(label, "df", static_cast<double>(cond.df),
                                      {static_cast<double>(cell->df), 0.0}, 0.0, 0.0, true));
    }
    return report;
}

}  // namespace smm
