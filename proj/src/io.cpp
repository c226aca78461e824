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

#include "smm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smm/error.hpp"

namespace smm::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw InputError(where + ": " + what);
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double number_at(const json& j, const std::string& where)
{
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "value is not finite");
    return v;
}

const json& array_at(const json& j, const std::string& where, std::size_t expected)
{
    if (!j.is_array()) fail(where, "expected an array");
    if (expected != 0 && j.size() != expected)
        fail(where, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
    return j;
}

std::vector<std::string> names_at(const json& j, const std::string& where)
{
    array_at(j, where, 0);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) fail(where + "/" + std::to_string(i), "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

ParameterCell cell_at(const json& j, const std::string& where, double default_start)
{
    if (j.is_number()) return fixed_cell(number_at(j, where));
    if (j.is_string()) {
        if (j.get<std::string>() == "free") return free_cell(default_start);
        if (j.get<std::string>() == "fixed") fail(where, "\"fixed\" needs a value, write {\"fixed\": v}");
        fail(where, "unknown cell shorthand '" + j.get<std::string>() + "'");
    }
    if (j.is_object() && j.size() == 1) {
        if (j.contains("free")) return free_cell(number_at(j["free"], where + "/free"));
        if (j.contains("fixed")) return fixed_cell(number_at(j["fixed"], where + "/fixed"));
    }
    fail(where, "expected {\"free\": start}, {\"fixed\": value}, \"free\" or a number");
}

json cell_to_json(const ParameterCell& c)
{
    return c.is_free() ? json{{"free", c.value}} : json{{"fixed", c.value}};
}

Eigen::VectorXd vector_at(const json& j, const std::string& where, std::size_t expected)
{
    array_at(j, where, expected);
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_at(j[i], where + "/" + std::to_string(i));
    return v;
}

Eigen::MatrixXd matrix_at(const json& j, const std::string& where, std::size_t rows, std::size_t cols)
{
    array_at(j, where, rows);
    if (j.empty()) fail(where, "matrix is empty");
    const std::size_t c = cols != 0 ? cols : (j[0].is_array() ? j[0].size() : 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string row = where + "/" + std::to_string(r);
        array_at(j[r], row, c);
        for (std::size_t k = 0; k < c; ++k)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = number_at(j[r][k], row + "/" + std::to_string(k));
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json stat_json(double mean, double sd) { return json{{"mean", mean}, {"sd", sd}}; }

Block block_from(const std::string& s)
{
    for (Block b : {Block::Lambda, Block::Phi, Block::Psi2, Block::Nu, Block::Theta})
        if (to_string(b) == s) return b;
    throw InputError("unknown parameter block '" + s + "'");
}

}  // namespace

json read_json_file(const std::filesystem::path& path)
{
    const std::string text = slurp(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": invalid JSON (" + e.what() + ")");
    }
}

ModelSpec model_from_json(const json& j)
{
    if (!j.is_object()) fail("/", "model must be a JSON object");
    if (!j.contains("variables")) fail("/variables", "missing");
    if (!j.contains("lambda")) fail("/lambda", "missing");
    std::vector<std::string> variables = names_at(j["variables"], "/variables");
    const std::size_t p = variables.size();
    if (p == 0) fail("/variables", "need at least one variable");

    const json& lam = array_at(j["lambda"], "/lambda", p);
    if (!lam[0].is_array() || lam[0].empty()) fail("/lambda/0", "expected a non-empty row");
    const std::size_t q = lam[0].size();
    ModelSpec spec(p, q);
    spec.variable_names = std::move(variables);
    if (j.contains("factors")) {
        spec.factor_names = names_at(j["factors"], "/factors");
        if (spec.factor_names.size() != q) fail("/factors", "expected " + std::to_string(q) + " names");
    }

    for (std::size_t i = 0; i < p; ++i) {
        const std::string row = "/lambda/" + std::to_string(i);
        array_at(lam[i], row, q);
        for (std::size_t k = 0; k < q; ++k)
            spec.lambda(i, k) = cell_at(lam[i][k], row + "/" + std::to_string(k), kStartLoading);
    }
    if (j.contains("phi")) {
        const json& phi = array_at(j["phi"], "/phi", q);
        for (std::size_t r = 0; r < q; ++r) array_at(phi[r], "/phi/" + std::to_string(r), q);
        for (std::size_t r = 0; r < q; ++r) {
            for (std::size_t c = 0; c <= r; ++c) {
                const std::string where = "/phi/" + std::to_string(r) + "/" + std::to_string(c);
                const double start = r == c ? kStartFactorVariance : kStartFactorCovariance;
                const ParameterCell lower = cell_at(phi[r][c], where, start);
                const ParameterCell upper =
                    cell_at(phi[c][r], "/phi/" + std::to_string(c) + "/" + std::to_string(r), start);
                if (!(lower == upper)) fail(where, "phi pattern is not symmetric");
                spec.phi(r, c) = lower;
            }
        }
    }
    auto read_vector = [&](const char* key, std::size_t len, double start, auto&& assign) {
        if (!j.contains(key)) return;
        const std::string where = std::string("/") + key;
        const json& arr = array_at(j[key], where, len);
        for (std::size_t i = 0; i < len; ++i) assign(i, cell_at(arr[i], where + "/" + std::to_string(i), start));
    };
    read_vector("psi2", p, kStartUniqueVariance, [&](std::size_t i, ParameterCell c) { spec.psi2(i) = c; });
    read_vector("nu", p, kStartIntercept, [&](std::size_t i, ParameterCell c) { spec.nu(i) = c; });
    read_vector("theta", q, kStartFactorMean, [&](std::size_t i, ParameterCell c) { spec.theta(i) = c; });
    return spec;
}

json model_to_json(const ModelSpec& spec)
{
    json j;
    j["variables"] = spec.variable_names;
    j["factors"] = spec.factor_names;
    json lam = json::array();
    for (std::size_t i = 0; i < spec.p(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < spec.q(); ++k) row.push_back(cell_to_json(spec.lambda(i, k)));
        lam.push_back(std::move(row));
    }
    j["lambda"] = std::move(lam);
    json phi = json::array();
    for (std::size_t r = 0; r < spec.q(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < spec.q(); ++c) row.push_back(cell_to_json(spec.phi(r, c)));
        phi.push_back(std::move(row));
    }
    j["phi"] = std::move(phi);
    json psi2 = json::array(), nu = json::array(), theta = json::array();
    for (std::size_t i = 0; i < spec.p(); ++i) {
        psi2.push_back(cell_to_json(spec.psi2(i)));
        nu.push_back(cell_to_json(spec.nu(i)));
    }
    for (std::size_t k = 0; k < spec.q(); ++k) theta.push_back(cell_to_json(spec.theta(k)));
    j["psi2"] = std::move(psi2);
    j["nu"] = std::move(nu);
    j["theta"] = std::move(theta);
    return j;
}

PopulationModel population_from_json(const json& j)
{
    if (!j.is_object()) fail("/", "population must be a JSON object");
    for (const char* key : {"lambda", "psi2", "means"})
        if (!j.contains(key)) fail(std::string("/") + key, "missing");
    PopulationModel pop;
    pop.lambda = matrix_at(j["lambda"], "/lambda", 0, 0);
    const auto p = static_cast<std::size_t>(pop.lambda.rows());
    const auto q = static_cast<std::size_t>(pop.lambda.cols());
    if (q == 0) fail("/lambda", "need at least one factor");
    pop.phi = j.contains("phi") ? matrix_at(j["phi"], "/phi", q, q)
                                : Eigen::MatrixXd::Identity(pop.lambda.cols(), pop.lambda.cols());
    pop.psi2 = vector_at(j["psi2"], "/psi2", p);
    if (j.contains("variables")) {
        pop.variable_names = names_at(j["variables"], "/variables");
        if (pop.variable_names.size() != p) fail("/variables", "expected " + std::to_string(p) + " names");
    } else {
        for (std::size_t i = 0; i < p; ++i) pop.variable_names.push_back("x" + std::to_string(i + 1));
    }
    const json& means = j["means"];
    if (means.is_object() && means.contains("explicit")) {
        pop.means = ExplicitMeans{vector_at(means["explicit"], "/means/explicit", p)};
    } else if (means.is_object() && means.contains("structured")) {
        const json& s = means["structured"];
        if (!s.is_object()) fail("/means/structured", "expected an object");
        StructuredMeans sm;
        sm.nu = s.contains("nu") ? vector_at(s["nu"], "/means/structured/nu", p)
                                 : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
        if (!s.contains("theta")) fail("/means/structured/theta", "missing");
        sm.theta = vector_at(s["theta"], "/means/structured/theta", q);
        pop.means = std::move(sm);
    } else {
        fail("/means", "expected {\"explicit\": [...]} or {\"structured\": {\"nu\": [...], \"theta\": [...]}}");
    }
    try {
        check_population(pop);
    } catch (const Error& e) {
        fail("/", e.what());
    }
    return pop;
}

json population_to_json(const PopulationModel& pop)
{
    json j;
    j["variables"] = pop.variable_names;
    j["lambda"] = matrix_to_json(pop.lambda);
    j["phi"] = matrix_to_json(pop.phi);
    j["psi2"] = vector_to_json(pop.psi2);
    if (const auto* s = std::get_if<StructuredMeans>(&pop.means))
        j["means"] = {{"structured", {{"nu", vector_to_json(s->nu)}, {"theta", vector_to_json(s->theta)}}}};
    else
        j["means"] = {{"explicit", vector_to_json(std::get<ExplicitMeans>(pop.means).m)}};
    return j;
}

StudyConfig study_from_json(const json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object()) fail("/", "study must be a JSON object");
    auto load = [&](const char* key) -> json {
        if (!j.contains(key)) fail(std::string("/") + key, "missing");
        const json& v = j[key];
        if (v.is_string()) return read_json_file(base_dir / v.get<std::string>());
        if (v.is_object()) return v;
        fail(std::string("/") + key, "expected an object or a file path");
    };

    StudyConfig config;
    config.name = j.value("name", std::string{});
    try {
        config.population = population_from_json(load("population"));
    } catch (const InputError& e) {
        throw InputError(std::string("/population: ") + e.what());
    }
    try {
        config.spec = model_from_json(load("model"));
    } catch (const InputError& e) {
        throw InputError(std::string("/model: ") + e.what());
    }
    if (j.contains("anchor")) {
        if (!j["anchor"].is_string()) fail("/anchor", "expected a variable name");
        const std::string anchor = j["anchor"].get<std::string>();
        const auto& names = config.spec.variable_names;
        const auto it = std::find(names.begin(), names.end(), anchor);
        if (it == names.end()) fail("/anchor", "unknown variable '" + anchor + "'");
        try {
            config.spec = fix_intercept_variant(config.spec, static_cast<std::size_t>(it - names.begin()));
        } catch (const Error& e) {
            fail("/anchor", e.what());
        }
    }

    if (!j.contains("sample_sizes")) fail("/sample_sizes", "missing");
    array_at(j["sample_sizes"], "/sample_sizes", 0);
    if (j["sample_sizes"].empty()) fail("/sample_sizes", "need at least one sample size");
    for (std::size_t i = 0; i < j["sample_sizes"].size(); ++i) {
        const json& n = j["sample_sizes"][i];
        if (!n.is_number_integer() || n.get<long long>() < 2)
            fail("/sample_sizes/" + std::to_string(i), "expected an integer >= 2");
        config.sample_sizes.push_back(static_cast<Eigen::Index>(n.get<long long>()));
    }
    if (!j.contains("replications") || !j["replications"].is_number_integer() || j["replications"].get<long long>() < 1)
        fail("/replications", "expected an integer >= 1");
    config.replications = j["replications"].get<int>();
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) fail("/seed", "expected a non-negative integer");
        config.seed.master = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("max_parallelism")) {
        if (!j["max_parallelism"].is_number_integer() || j["max_parallelism"].get<long long>() < 1)
            fail("/max_parallelism", "expected an integer >= 1");
        config.max_parallelism = j["max_parallelism"].get<int>();
    }
    config.reference = j.value("reference", std::string{});
    if (j.contains("fit")) {
        const json& f = j["fit"];
        if (!f.is_object()) fail("/fit", "expected an object");
        config.fit_options.max_iterations = f.value("max_iterations", config.fit_options.max_iterations);
        config.fit_options.gradient_tolerance = f.value("gradient_tolerance", config.fit_options.gradient_tolerance);
        config.fit_options.relative_f_tolerance =
            f.value("relative_f_tolerance", config.fit_options.relative_f_tolerance);
        config.fit_options.max_restarts = f.value("max_restarts", config.fit_options.max_restarts);
    }
    const ValidationReport report = validate(config.spec);
    if (!report.is_valid) fail("/model", report.errors.front().code + ": " + report.errors.front().message);
    if (config.population.p() != static_cast<Eigen::Index>(config.spec.p()))
        fail("/model", "model and population differ in the number of variables");
    return config;
}

StudyConfig read_study(const std::filesystem::path& path)
{
    const json j = read_json_file(path);
    try {
        return study_from_json(j, path.parent_path());
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

Dataset parse_csv(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    Dataset data;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw InputError(source + ": empty file, a header row is required");
    for (std::string name : split_commas(line)) {
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
        if (name.empty()) throw InputError(source + ":" + std::to_string(line_no) + ": empty column name");
        header.push_back(name);
    }
    const std::size_t p = header.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != p)
            throw InputError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(p) +
                             " fields, got " + std::to_string(fields.size()));
        for (std::size_t k = 0; k < p; ++k) {
            const std::string& f = fields[k];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
                throw InputError(source + ":" + std::to_string(line_no) + ": column '" + header[k] +
                                 "' is not a finite number: '" + f + "'");
            values.push_back(v);
        }
        ++rows;
    }
    data.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < p; ++k)
            data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = values[r * p + k];
    data.variable_names = std::move(header);
    return data;
}

Dataset read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    return parse_csv(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& data)
{
    for (std::size_t k = 0; k < data.variable_names.size(); ++k) out << (k ? "," : "") << data.variable_names[k];
    out << '\n';
    for (Eigen::Index r = 0; r < data.n(); ++r) {
        for (Eigen::Index k = 0; k < data.p(); ++k) out << (k ? "," : "") << format_double(data.values(r, k));
        out << '\n';
    }
}

json validation_to_json(const ValidationReport& report, const ModelSpec& spec)
{
    auto issues = [](const std::vector<ValidationIssue>& v) {
        json out = json::array();
        for (const auto& i : v) out.push_back({{"code", i.code}, {"message", i.message}});
        return out;
    };
    json j{{"is_valid", report.is_valid},
           {"errors", issues(report.errors)},
           {"warnings", issues(report.warnings)},
           {"t", report.t},
           {"df", report.df}};
    if (report.is_valid) {
        json params = json::array();
        for (const auto& ref : parameter_index(spec).refs) params.push_back(parameter_name(spec, ref));
        j["free_parameters"] = std::move(params);
    }
    return j;
}

json fit_result_to_json(const FitResult& result, const ModelSpec& spec)
{
    json j;
    j["variables"] = spec.variable_names;
    j["factors"] = spec.factor_names;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["retries_used"] = result.retries_used;
    j["grad_inf_norm"] = result.grad_inf_norm;
    j["n"] = result.n;
    j["f_start"] = result.f_start;
    j["f_min"] = result.f_min;
    j["chi_square"] = result.chi_square;
    j["df"] = result.df;
    j["estimates"] = {{"lambda", matrix_to_json(result.estimates.lambda)},
                      {"phi", matrix_to_json(result.estimates.phi)},
                      {"psi2", vector_to_json(result.estimates.psi2)},
                      {"nu", vector_to_json(result.estimates.nu)},
                      {"theta", vector_to_json(result.estimates.theta)}};
    json params = json::array();
    const ParameterIndex index = parameter_index(spec);
    for (std::size_t i = 0; i < index.size(); ++i)
        params.push_back({{"name", parameter_name(spec, index.refs[i])},
                          {"value", result.free_estimates(static_cast<Eigen::Index>(i))}});
    j["free_parameters"] = std::move(params);
    return j;
}

json study_summary_to_json(const StudySummary& summary)
{
    json conds = json::array();
    for (const auto& c : summary.conditions) {
        json params = json::array();
        for (const auto& p : c.parameters)
            params.push_back({{"name", p.name},
                              {"block", std::string(to_string(p.ref.block))},
                              {"row", p.ref.row},
                              {"col", p.ref.col},
                              {"mean", p.mean},
                              {"sd", p.sd}});
        conds.push_back({{"n", c.n},
                         {"replications", c.replications},
                         {"r_effective", c.r_effective},
                         {"convergence_failures", c.convergence_failures},
                         {"df", c.df},
                         {"chi_square", stat_json(c.chi_square_mean, c.chi_square_sd)},
                         {"parameters", std::move(params)}});
    }
    return {{"name", summary.name}, {"reference", summary.reference}, {"seed", summary.seed}, {"conditions", std::move(conds)}};
}

StudySummary study_summary_from_json(const json& j)
{
    try {
        StudySummary s;
        s.name = j.at("name").get<std::string>();
        s.reference = j.at("reference").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& c : j.at("conditions")) {
            ReplicationSummary r;
            r.n = c.at("n").get<Eigen::Index>();
            r.replications = c.at("replications").get<int>();
            r.r_effective = c.at("r_effective").get<int>();
            r.convergence_failures = c.at("convergence_failures").get<int>();
            r.df = c.at("df").get<long>();
            r.chi_square_mean = c.at("chi_square").at("mean").get<double>();
            r.chi_square_sd = c.at("chi_square").at("sd").get<double>();
            for (const auto& p : c.at("parameters")) {
                ParameterSummary ps;
                ps.name = p.at("name").get<std::string>();
                ps.ref = {block_from(p.at("block").get<std::string>()), p.at("row").get<std::size_t>(),
                          p.at("col").get<std::size_t>()};
                ps.mean = p.at("mean").get<double>();
                ps.sd = p.at("sd").get<double>();
                r.parameters.push_back(std::move(ps));
            }
            s.conditions.push_back(std::move(r));
        }
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("study summary: ") + e.what());
    }
}

json comparison_to_json(const ComparisonReport& report)
{
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"condition", r.condition},
                        {"quantity", r.quantity},
                        {"artifact", r.artifact},
                        {"reference", r.reference},
                        {"reference_sd", r.reference_sd},
                        {"deviation", r.deviation},
                        {"z", std::isfinite(r.z) ? json(r.z) : json(nullptr)},
                        {"tolerance", r.tolerance},
                        {"gated", r.gated},
                        {"pass", r.pass}});
    return {{"all_pass", report.all_pass()}, {"rows", std::move(rows)}};
}

json proportionality_to_json(const ProportionalityReport& report)
{
    json ratios = json::array();
    for (const auto& r : report.ratios) ratios.push_back(r ? json(*r) : json(nullptr));
    return {{"ratios", std::move(ratios)},
            {"mean_ratio", report.mean_ratio},
            {"cv", std::isfinite(report.cv) ? json(report.cv) : json(nullptr)},
            {"rank_corr", std::isfinite(report.rank_corr) ? json(report.rank_corr) : json(nullptr)},
            {"verdict", to_string(report.verdict)},
            {"warnings", report.warnings}};
}

std::string format_fit(const FitResult& result, const ModelSpec& spec)
{
    std::ostringstream out;
    char buf[256];
    const ParameterIndex index = parameter_index(spec);
    std::snprintf(buf, sizeof buf, "%-24s %14s\n", "parameter", "estimate");
    out << buf;
    for (std::size_t i = 0; i < index.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%-24s %14.6f\n", parameter_name(spec, index.refs[i]).c_str(),
                      result.free_estimates(static_cast<Eigen::Index>(i)));
        out << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "\nF = %.10g\nchi_square = %.6f\ndf = %ld\nn = %ld\nconverged = %s\niterations = %d\n"
                  "grad_inf_norm = %.3e\nretries_used = %d\n",
                  result.f_min, result.chi_square, result.df, static_cast<long>(result.n),
                  result.converged ? "true" : "false", result.iterations, result.grad_inf_norm, result.retries_used);
    out << buf;
    return out.str();
}

std::string format_study(const StudySummary& summary)
{
    std::ostringstream out;
    char buf[256];
    if (!summary.name.empty()) out << summary.name << "\n";
    for (const auto& c : summary.conditions) {
        std::snprintf(buf, sizeof buf, "\nN = %ld  (R = %d, converged %d, failures %d)\n", static_cast<long>(c.n),
                      c.replications, c.r_effective, c.convergence_failures);
        out << buf;
        std::snprintf(buf, sizeof buf, "%-24s %12s %12s\n", "parameter", "mean", "sd");
        out << buf;
        for (const auto& p : c.parameters) {
            std::snprintf(buf, sizeof buf, "%-24s %12.4f %12.4f\n", p.name.c_str(), p.mean, p.sd);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%-24s %12.4f %12.4f\n%-24s %12ld\n", "chi_square", c.chi_square_mean,
                      c.chi_square_sd, "df", c.df);
        out << buf;
    }
    return out.str();
}

std::string format_comparison(const ComparisonReport& report)
{
    std::ostringstream out;
    char buf[320];
    std::snprintf(buf, sizeof buf, "%-24s %-24s %12s %10s %10s %9s %10s  %s\n", "condition", "quantity", "artifact",
                  "reference", "deviation", "z", "tolerance", "result");
    out << buf;
    for (const auto& r : report.rows) {
        const char* verdict = r.pass ? "PASS" : (r.gated ? "FAIL" : "info");
        if (!r.gated && r.pass) verdict = "info";
        std::snprintf(buf, sizeof buf, "%-24s %-24s %12.4f %10.4f %10.4f %9.2f %10.4f  %s\n", r.condition.c_str(),
                      r.quantity.c_str(), r.artifact, r.reference, r.deviation, r.z, r.tolerance, verdict);
        out << buf;
    }
    out << (report.all_pass() ? "ALL PASS\n" : "SOME FAIL\n");
    return out.str();
}

}  // namespace smm::io
