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

// smm: command-line front end.
//
//   smm fit <model.json> <data.csv> [--json out.json]
//   smm means <model.json> <data.csv> [--loadings a,b,...] [--cv-threshold c] [--json out.json]
//   smm simulate <population.json> --n N --seed S --out data.csv
//   smm replicate <study.json> [--compare] [--reps R] [--seed S] [--parallelism K] [--json out.json]
//   smm diagnose <model.json> [--json out.json]
//
// Exit codes: 0 success, 1 input error, 2 non-convergence, 3 comparison failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "smm/error.hpp"
#include "smm/estimator.hpp"
#include "smm/io.hpp"
#include "smm/moments.hpp"
#include "smm/montecarlo.hpp"
#include "smm/simulate.hpp"
#include "smm/smm_core.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitComparison = 3;

using smm::io::json;

void write_json(const std::string& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw smm::io::InputError(path + ": cannot write file");
    out << j.dump(2) << '\n';
    if (!out) throw smm::io::InputError(path + ": write failed");
}

smm::ModelSpec read_model(const std::string& path)
{
    const json j = smm::io::read_json_file(path);
    try {
        return smm::io::model_from_json(j);
    } catch (const smm::io::InputError& e) {
        throw smm::io::InputError(path + ": " + e.what());
    }
}

// Data columns are matched to the model by position; names must agree when
// both are present.
smm::SampleMoments read_moments(const std::string& path, const smm::ModelSpec& spec)
{
    const smm::Dataset data = smm::io::read_csv(path);
    if (static_cast<std::size_t>(data.p()) != spec.p())
        throw smm::io::InputError(path + ":1: data has " + std::to_string(data.p()) + " columns, model has " +
                                  std::to_string(spec.p()) + " variables");
    for (std::size_t i = 0; i < spec.p(); ++i)
        if (data.variable_names[i] != spec.variable_names[i])
            throw smm::io::InputError(path + ":1: column " + std::to_string(i + 1) + " is '" + data.variable_names[i] +
                                      "', model expects '" + spec.variable_names[i] + "'");
    smm::SampleMoments moments = smm::compute_moments(data);
    for (const auto& w : moments.warnings) std::cerr << "warning: " << w << '\n';
    return moments;
}

int cmd_fit(const std::string& model_path, const std::string& data_path, const std::string& json_path)
{
    const smm::ModelSpec spec = read_model(model_path);
    const smm::ValidationReport report = smm::validate(spec);
    if (!report.is_valid)
        throw smm::io::InputError(model_path + ": " + report.errors.front().code + ": " + report.errors.front().message);
    const smm::SampleMoments moments = read_moments(data_path, spec);
    const smm::FitResult result = smm::fit(spec, moments);
    std::cout << smm::io::format_fit(result, spec);
    if (!json_path.empty()) write_json(json_path, smm::io::fit_result_to_json(result, spec));
    return result.converged ? kExitOk : kExitNotConverged;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const std::string item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw smm::io::InputError("--loadings: '" + item + "' is not a number");
        out.push_back(v);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

int cmd_means(const std::string& model_path, const std::string& data_path, const std::string& loadings,
              double cv_threshold, const std::string& json_path)
{
    const smm::ModelSpec spec = read_model(model_path);
    const smm::SampleMoments moments = read_moments(data_path, spec);

    Eigen::MatrixXd lambda;
    Eigen::VectorXd nu;
    std::string source;
    if (!loadings.empty()) {
        const std::vector<double> values = parse_list(loadings);
        if (values.size() != spec.p())
            throw smm::io::InputError("--loadings: expected " + std::to_string(spec.p()) + " values");
        lambda = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
        nu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.p()));
        source = "supplied";
    } else {
        bool any_free = false;
        for (std::size_t i = 0; i < spec.p(); ++i) {
            for (std::size_t k = 0; k < spec.q(); ++k) any_free = any_free || spec.lambda(i, k).is_free();
            any_free = any_free || spec.nu(i).is_free();
        }
        smm::ModelValues values = smm::start_values(spec);
        source = "fixed in model";
        if (any_free) {
            const smm::FitResult result = smm::fit(spec, moments);
            if (!result.converged) {
                std::cerr << "error: model fit did not converge\n";
                return kExitNotConverged;
            }
            values = result.estimates;
            source = "fitted";
        }
        lambda = values.lambda;
        nu = values.nu;
    }

    const Eigen::VectorXd theta = smm::factor_means_ls(lambda, moments.mean, nu);
    std::printf("loadings: %s\n\n", source.c_str());
    std::printf("%-12s %12s %12s %12s\n", "variable", "mean", "loading", "ratio");

    json out;
    out["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
    if (lambda.cols() == 1) {
        const Eigen::VectorXd m = moments.mean - nu;
        for (Eigen::Index i = 0; i < m.size(); ++i)
            if (std::abs(lambda(i, 0)) < smm::kLoadingFloor)
                throw smm::Error(smm::ErrorCode::DivisionByNearZeroLoading,
                                 "loading of " + spec.variable_names[static_cast<std::size_t>(i)] + " is below the floor");
        const Eigen::VectorXd ratios = smm::hadamard_ratio(m, lambda.col(0));
        for (Eigen::Index i = 0; i < m.size(); ++i)
            std::printf("%-12s %12.4f %12.4f %12.4f\n", spec.variable_names[static_cast<std::size_t>(i)].c_str(), m(i),
                        lambda(i, 0), ratios(i));
        const smm::ProportionalityReport prop =
            smm::proportionality_report(lambda.col(0), m, cv_threshold, spec.variable_names);
        std::printf("\nfactor mean (least squares) = %.6f\nmean ratio = %.6f\ncv = %.6f\nrank_corr = %.6f\n"
                    "verdict = %s\n",
                    theta(0), prop.mean_ratio, prop.cv, prop.rank_corr, smm::to_string(prop.verdict));
        for (const auto& w : prop.warnings) std::printf("warning: %s\n", w.c_str());
        out["proportionality"] = smm::io::proportionality_to_json(prop);
    } else {
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            std::printf("factor mean %s (least squares) = %.6f\n", spec.factor_names[static_cast<std::size_t>(k)].c_str(),
                        theta(k));
    }
    if (!json_path.empty()) write_json(json_path, out);
    return kExitOk;
}

int cmd_simulate(const std::string& population_path, long long n, std::uint64_t seed, const std::string& out_path)
{
    if (n < 1) throw smm::io::InputError("--n must be at least 1");
    const json j = smm::io::read_json_file(population_path);
    smm::PopulationModel pop;
    try {
        pop = smm::io::population_from_json(j);
    } catch (const smm::io::InputError& e) {
        throw smm::io::InputError(population_path + ": " + e.what());
    }
    const smm::Dataset data = smm::draw_sample(pop, static_cast<Eigen::Index>(n), smm::Seed{seed});
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw smm::io::InputError(out_path + ": cannot write file");
    smm::io::write_csv(out, data);
    if (!out) throw smm::io::InputError(out_path + ": write failed");
    return kExitOk;
}

int cmd_replicate(const std::string& study_path, bool compare, std::optional<int> reps,
                  std::optional<std::uint64_t> seed, std::optional<int> parallelism, const std::string& json_path)
{
    smm::StudyConfig config = smm::io::read_study(study_path);
    if (reps) {
        if (*reps < 1) throw smm::io::InputError("--reps must be at least 1");
        config.replications = *reps;
    }
    if (seed) config.seed.master = *seed;
    if (parallelism) config.max_parallelism = std::max(1, *parallelism);

    const smm::StudySummary summary = smm::run_study(config);
    std::cout << smm::io::format_study(summary);
    json out{{"summary", smm::io::study_summary_to_json(summary)}};
    int code = kExitOk;
    if (compare) {
        if (summary.reference.empty())
            throw smm::io::InputError(study_path + ": /reference: --compare needs a reference key");
        const smm::ComparisonReport report = smm::compare_to_reference(summary, smm::reference_table());
        std::cout << '\n' << smm::io::format_comparison(report);
        out["comparison"] = smm::io::comparison_to_json(report);
        if (!report.all_pass()) code = kExitComparison;
    }
    if (!json_path.empty()) write_json(json_path, out);
    return code;
}

int cmd_diagnose(const std::string& model_path, const std::string& json_path)
{
    const smm::ModelSpec spec = read_model(model_path);
    const smm::ValidationReport report = smm::validate(spec);
    std::printf("valid = %s\nfree parameters t = %zu\ndf = %ld\n", report.is_valid ? "true" : "false", report.t,
                report.df);
    for (const auto& e : report.errors) std::printf("error: %s: %s\n", e.code.c_str(), e.message.c_str());
    for (const auto& w : report.warnings) std::printf("warning: %s: %s\n", w.code.c_str(), w.message.c_str());
    if (report.is_valid) {
        const smm::ParameterIndex index = smm::parameter_index(spec);
        for (std::size_t i = 0; i < index.size(); ++i)
            std::printf("  %2zu  %s\n", i, smm::parameter_name(spec, index.refs[i]).c_str());
    }
    if (!json_path.empty()) write_json(json_path, smm::io::validation_to_json(report, spec));
    return report.is_valid ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-group structured means analysis"};
    app.require_subcommand(1);

    std::string model_path, data_path, json_path, loadings, population_path, out_path, study_path;
    double cv_threshold = smm::kProportionalityCvThreshold;
    long long n = 0;
    std::uint64_t seed = 0;
    bool compare = false;
    std::optional<int> reps, parallelism;
    std::optional<std::uint64_t> study_seed;

    auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of a model to CSV data");
    fit->add_option("model", model_path, "model JSON")->required();
    fit->add_option("data", data_path, "data CSV")->required();
    fit->add_option("--json", json_path, "write the FitResult as JSON");

    auto* means = app.add_subcommand("means", "Closed-form factor means and proportionality diagnostic");
    means->add_option("model", model_path, "model JSON")->required();
    means->add_option("data", data_path, "data CSV")->required();
    means->add_option("--loadings", loadings, "comma-separated one-factor loadings (intercepts taken as 0)");
    means->add_option("--cv-threshold", cv_threshold, "coefficient-of-variation threshold for CONSISTENT");
    means->add_option("--json", json_path, "write the report as JSON");

    auto* simulate = app.add_subcommand("simulate", "Draw a multivariate-normal sample from a population");
    simulate->add_option("population", population_path, "population JSON")->required();
    simulate->add_option("--n", n, "number of observations")->required();
    simulate->add_option("--seed", seed, "64-bit seed")->required();
    simulate->add_option("--out", out_path, "output CSV")->required();

    auto* replicate = app.add_subcommand("replicate", "Run a Monte Carlo study");
    replicate->add_option("study", study_path, "study JSON")->required();
    replicate->add_flag("--compare", compare, "compare against the embedded reference table");
    replicate->add_option("--reps", reps, "override the replication count");
    replicate->add_option("--seed", study_seed, "override the master seed");
    replicate->add_option("--parallelism", parallelism, "worker threads");
    replicate->add_option("--json", json_path, "write summary (and comparison) as JSON");

    auto* diagnose = app.add_subcommand("diagnose", "Validate a model and list its free parameters");
    diagnose->add_option("model", model_path, "model JSON")->required();
    diagnose->add_option("--json", json_path, "write the validation report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*fit) return cmd_fit(model_path, data_path, json_path);
        if (*means) return cmd_means(model_path, data_path, loadings, cv_threshold, json_path);
        if (*simulate) return cmd_simulate(population_path, n, seed, out_path);
        if (*replicate) return cmd_replicate(study_path, compare, reps, study_seed, parallelism, json_path);
        if (*diagnose) return cmd_diagnose(model_path, json_path);
    } catch (const smm::io::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const smm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
