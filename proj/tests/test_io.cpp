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

#include <sstream>

#include "smm/io.hpp"

using namespace smm;
using io::json;

namespace {

const char* kModel = R"({
  "variables": ["x1", "x2", "x3"],
  "lambda": [["free"], [{"free": 0.7}], [{"fixed": 0.4}]],
  "phi": [[{"fixed": 1.0}]],
  "psi2": ["free", "free", 0.5],
  "theta": ["free"]
})";

}  // namespace

TEST_CASE("model JSON cells")
{
    const ModelSpec spec = io::model_from_json(json::parse(kModel));
    CHECK(spec.p() == 3);
    CHECK(spec.q() == 1);
    CHECK(spec.lambda(0, 0) == free_cell(kStartLoading));
    CHECK(spec.lambda(1, 0) == free_cell(0.7));
    CHECK(spec.lambda(2, 0) == fixed_cell(0.4));
    CHECK(spec.psi2(2) == fixed_cell(0.5));
    CHECK(spec.nu(0) == fixed_cell(0.0));
    CHECK(spec.factor_names == std::vector<std::string>{"F1"});
    CHECK(io::model_from_json(io::model_to_json(spec)) == spec);
}

TEST_CASE("model JSON errors name the offending path")
{
    json j = json::parse(kModel);
    j["lambda"][1][0] = "sometimes";
    try {
        io::model_from_json(j);
        FAIL("expected an error");
    } catch (const io::InputError& e) {
        CHECK(std::string(e.what()).find("/lambda/1/0") != std::string::npos);
    }
    j = json::parse(kModel);
    j["psi2"].erase(0);
    CHECK_THROWS_AS(io::model_from_json(j), io::InputError);

    j = json::parse(R"({"variables": ["a", "b"], "lambda": [["free", "free"], ["free", "free"]],
                        "phi": [[1, "free"], [0, 1]]})");
    CHECK_THROWS_WITH_AS(io::model_from_json(j), doctest::Contains("symmetric"), io::InputError);
}

TEST_CASE("population JSON")
{
    PopulationModel m1 = io::population_from_json(io::population_to_json(reference_model1()));
    CHECK(std::holds_alternative<StructuredMeans>(m1.means));
    CHECK(population_moments(m1).m.isApprox(population_moments(reference_model1()).m));
    PopulationModel m2 = io::population_from_json(io::population_to_json(reference_model2()));
    CHECK(std::get<ExplicitMeans>(m2.means).m == std::get<ExplicitMeans>(reference_model2().means).m);

    json bad = io::population_to_json(reference_model2());
    bad["psi2"][0] = -1.0;
    CHECK_THROWS_AS(io::population_from_json(bad), io::InputError);
    bad = io::population_to_json(reference_model2());
    bad["means"] = json::object();
    CHECK_THROWS_AS(io::population_from_json(bad), io::InputError);
}

TEST_CASE("CSV parsing")
{
    std::istringstream in("a,b\n1,2\n3.5, 4e1\n\n");
    const Dataset d = io::parse_csv(in, "mem");
    CHECK(d.variable_names == std::vector<std::string>{"a", "b"});
    REQUIRE(d.n() == 2);
    CHECK(d.values(1, 0) == 3.5);
    CHECK(d.values(1, 1) == 40.0);

    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_WITH_AS(io::parse_csv(ragged, "mem"), doctest::Contains("mem:3:"), io::InputError);
    std::istringstream text("a,b\n1,x\n");
    CHECK_THROWS_WITH_AS(io::parse_csv(text, "mem"), doctest::Contains("mem:2:"), io::InputError);
    std::istringstream comma_decimal("a\n1,5\n");
    CHECK_THROWS_AS(io::parse_csv(comma_decimal, "mem"), io::InputError);
    std::istringstream empty("");
    CHECK_THROWS_AS(io::parse_csv(empty, "mem"), io::InputError);
}

TEST_CASE("CSV written at 17 digits reads back exactly")
{
    const Dataset d = draw_sample(reference_model1(), 50, Seed{3});
    std::stringstream buf;
    io::write_csv(buf, d);
    const Dataset back = io::parse_csv(buf, "mem");
    CHECK(back.values == d.values);
    CHECK(back.variable_names == d.variable_names);
}

TEST_CASE("JSON reports re-emit identically")
{
    const ModelSpec spec = single_factor_means_spec({"x1", "x2", "x3", "x4", "x5"});
    const FitResult r = fit(spec, compute_moments(draw_sample(reference_model2(), 300, Seed{8})));
    const std::string once = io::fit_result_to_json(r, spec).dump(2);
    CHECK(json::parse(once).dump(2) == once);

    StudyConfig c;
    c.population = reference_model1();
    c.spec = spec;
    c.sample_sizes = {150};
    c.replications = 5;
    c.reference = "model1";
    const StudySummary s = run_study(c);
    const std::string summary = io::study_summary_to_json(s).dump(2);
    CHECK(json::parse(summary).dump(2) == summary);
    CHECK(io::study_summary_to_json(io::study_summary_from_json(json::parse(summary))).dump(2) == summary);
}

TEST_CASE("study JSON with an anchor")
{
    json j = {{"population", io::population_to_json(reference_model2())},
              {"model", io::model_to_json(single_factor_means_spec({"x1", "x2", "x3", "x4", "x5"}))},
              {"anchor", "x5"},
              {"sample_sizes", {900}},
              {"replications", 10},
              {"seed", 1},
              {"reference", "model2_anchor_x5"}};
    const StudyConfig c = io::study_from_json(j, ".");
    CHECK(c.spec.nu(4) == fixed_cell(0.0));
    CHECK(c.spec.nu(0).is_free());
    CHECK(validate(c.spec).df == 5);

    j["anchor"] = "x9";
    CHECK_THROWS_AS(io::study_from_json(j, "."), io::InputError);
    j.erase("anchor");
    j["replications"] = 0;
    CHECK_THROWS_AS(io::study_from_json(j, "."), io::InputError);
}
