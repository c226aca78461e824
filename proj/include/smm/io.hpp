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

// File formats: model, population and study JSON; data CSV; JSON and text
// reports. Schemas are documented in docs/formats.md.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "smm/estimator.hpp"
#include "smm/model_spec.hpp"
#include "smm/moments.hpp"
#include "smm/montecarlo.hpp"
#include "smm/simulate.hpp"
#include "smm/smm_core.hpp"

namespace smm::io {

using json = nlohmann::json;

/// Malformed or unreadable input. The message names the file and, where
/// known, the line or JSON path.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::filesystem::path& path);

ModelSpec model_from_json(const json& j);
json model_to_json(const ModelSpec& spec);

PopulationModel population_from_json(const json& j);
json population_to_json(const PopulationModel& pop);

/// "population" and "model" may be inline objects or paths relative to base_dir.
StudyConfig study_from_json(const json& j, const std::filesystem::path& base_dir);
StudyConfig read_study(const std::filesystem::path& path);

Dataset parse_csv(std::istream& in, const std::string& source);
Dataset read_csv(const std::filesystem::path& path);
/// Header row, then one row per observation at 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);

json validation_to_json(const ValidationReport& report, const ModelSpec& spec);
json fit_result_to_json(const FitResult& result, const ModelSpec& spec);
json study_summary_to_json(const StudySummary& summary);
StudySummary study_summary_from_json(const json& j);
json comparison_to_json(const ComparisonReport& report);
json proportionality_to_json(const ProportionalityReport& report);

std::string format_fit(const FitResult& result, const ModelSpec& spec);
std::string format_study(const StudySummary& summary);
std::string format_comparison(const ComparisonReport& report);

}  // namespace smm::io
