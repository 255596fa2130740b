#pragma once

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bitrans/oracle.hpp"
#include "bitrans/sequences.hpp"
#include "bitrans/solver.hpp"
#include "bitrans/symbol.hpp"

namespace bitrans::io {

using json = nlohmann::json;

/// Shortest decimal with 15 significant digits; infinities become "inf"/"-inf", NaN becomes null.
inline json sig15(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::stod(buf);
}

inline std::string format15(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline json to_json(const Field& f) {
    json j;
    j["domain"] = domain_name(f.grid->domain());
    j["N"] = f.size();
    if (f.grid->whole_line()) j["L"] = sig15(f.grid->length() / 2.0);
    json values = json::array();
    for (double v : f.values) values.push_back(sig15(v));
    j["values"] = std::move(values);
    return j;
}

inline Field field_from_json(const json& j) {
    const std::string domain = j.at("domain").get<std::string>();
    const auto n = j.at("N").get<std::size_t>();
    DomainSpec spec;
    if (domain == "whole_line") {
        spec = WholeLine{j.at("L").get<double>(), n};
    } else if (domain == "interval") {
        spec = PeriodicInterval{n};
    } else {
        throw InvalidArgument("unknown domain '" + domain + "'");
    }
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != n) throw InvalidArgument("field JSON: values has the wrong length");
    return Field(build_grid(spec), std::move(values));
}

inline std::string to_csv(const Field& f) {
    std::ostringstream os;
    os << "x,value\n";
    const auto xs = f.grid->x();
    for (std::size_t k = 0; k < f.size(); ++k) os << format15(xs[k]) << ',' << format15(f.values[k]) << '\n';
    return os.str();
}

/// Two-column (x, value) samples; a header line is skipped when present.
inline std::pair<std::vector<double>, std::vector<double>> read_csv_columns(std::istream& in) {
    std::vector<double> xs;
    std::vector<double> vs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidArgument("CSV line " + std::to_string(lineno) + ": expected x,value");
        try {
            xs.push_back(std::stod(line.substr(0, comma)));
            vs.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            if (lineno == 1 && xs.empty()) continue;
            throw InvalidArgument("CSV line " + std::to_string(lineno) + ": not numeric");
        }
    }
    return {std::move(xs), std::move(vs)};
}

inline json to_json(const MultiplierReport& r) {
    return {{"a", sig15(r.params.a)},
            {"b", sig15(r.params.b)},
            {"domain", domain_name(r.domain)},
            {"N_value", sig15(r.n_value)},
            {"sup_low", sig15(r.sup_low)},
            {"sup_high", sig15(r.sup_high)},
            {"tail_bound", sig15(r.tail_bound)},
            {"min_abs_symbol", sig15(r.min_abs_symbol)},
            {"solvable", r.solvable},
            {"orthogonality_residual", sig15(r.orthogonality_residual)},
            {"moment1", sig15(r.moment1)}};
}

inline json to_json(const SolveReport& r) {
    json steps = json::array();
    for (double s : r.step_norms) steps.push_back(sig15(s));
    return {{"iterations", r.iterations},
            {"step_norms", std::move(steps)},
            {"measured_ratio", sig15(r.measured_ratio)},
            {"q_bound", sig15(r.q_bound)},
            {"n_value", sig15(r.n_value)},
            {"residual_l2", sig15(r.residual_l2)},
            {"nontrivial", r.nontrivial},
            {"solution_h4", sig15(r.solution_h4)},
            {"boundary_leak", sig15(r.boundary_leak)},
            {"truncation_ok", r.truncation_ok}};
}

inline json to_json(const SequenceReport& r) {
    json rows = json::array();
    for (const auto& row : r.per_m) {
        json j = {{"m", row.m},
                  {"l1_distance", sig15(row.l1_distance)},
                  {"multiplier_sup_distance", sig15(row.multiplier_sup_distance)},
                  {"multiplier_high_sup_distance", sig15(row.multiplier_high_sup_distance)},
                  {"n_value_m", sig15(row.n_value_m)},
                  {"solution_h4_distance", sig15(row.solution_h4_distance)},
                  {"solution_l2_distance", sig15(row.solution_l2_distance)},
                  {"theorem_bound", sig15(row.theorem_bound)},
                  {"iterations", row.iterations}};
        if (row.moment_distance) j["moment_distance"] = sig15(*row.moment_distance);
        rows.push_back(std::move(j));
    }
    json j = {{"mode", to_string(r.mode)},
              {"per_m", std::move(rows)},
              {"limit_solution", to_json(r.limit_solution)},
              {"bounds_hold", r.bounds_hold}};
    j["fitted_slope"] = r.fitted_slope ? sig15(*r.fitted_slope) : json(nullptr);
    return j;
}

inline std::string to_csv(const SequenceReport& r) {
    std::ostringstream os;
    os << "m,l1_distance,moment_distance,multiplier_sup_distance,multiplier_high_sup_distance,n_value_m,"
          "solution_h4_distance,solution_l2_distance,theorem_bound\n";
    for (const auto& row : r.per_m) {
        os << row.m << ',' << format15(row.l1_distance) << ','
           << (row.moment_distance ? format15(*row.moment_distance) : std::string()) << ','
           << format15(row.multiplier_sup_distance) << ',' << format15(row.multiplier_high_sup_distance) << ','
           << format15(row.n_value_m) << ',' << format15(row.solution_h4_distance) << ','
           << format15(row.solution_l2_distance) << ',' << format15(row.theorem_bound) << '\n';
    }
    return os.str();
}

inline json to_json(const VerificationReport& r) {
    return {{"samples", r.samples},
            {"max_lipschitz_ratio", sig15(r.max_lipschitz_ratio)},
            {"max_growth_ratio", sig15(r.max_growth_ratio)},
            {"lipschitz_ok", r.lipschitz_ok},
            {"growth_ok", r.growth_ok},
            {"pass", r.pass()}};
}

inline json to_json(const oracle::ResolutionReport& r) {
    return {{"coarse_points", r.coarse_points},
            {"fine_points", r.fine_points},
            {"distance", sig15(r.distance)},
            {"coarse_residual", sig15(r.coarse_residual)},
            {"fine_residual", sig15(r.fine_residual)},
            {"pass", r.pass}};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace bitrans::io
