#include "harness/goldens.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "harness/errors.hpp"
#include "harness/strings.hpp"

namespace harness::goldens {

const std::vector<double>* GoldenFile::find(const std::string& name) const {
    for (const auto& [n, v] : variables)
        if (n == name) return &v;
    return nullptr;
}

std::string serialize_golden(const GoldenFile& g) {
    std::string out;
    for (const auto& [name, values] : g.variables) {
        if (name.empty() ||
            std::any_of(name.begin(), name.end(),
                        [](unsigned char c) { return std::isspace(c); }))
            throw ConfigError("golden variable name '" + name + "' is empty or has whitespace");
        if (values.empty())
            throw ConfigError("golden variable '" + name + "' has an empty array");
        out += name;
        for (double v : values) {
            if (!std::isfinite(v))
                throw ConfigError("golden variable '" + name + "' has a non-finite value");
            out += ' ';
            out += format_scientific17(v);
        }
        out += '\n';
    }
    return out;
}

GoldenFile parse_golden(const std::string& text) {
    GoldenFile g;
    int lineno = 0;
    for (const std::string& line : split_lines(text)) {
        ++lineno;
        auto tokens = split_whitespace(line);
        if (tokens.empty())
            throw ParseError("golden line " + std::to_string(lineno) + ": empty line");
        if (tokens.size() < 2)
            throw ParseError("golden line " + std::to_string(lineno) + ": variable '" +
                             tokens[0] + "' has no values");
        if (g.find(tokens[0]) != nullptr)
            throw ParseError("golden line " + std::to_string(lineno) +
                             ": duplicate variable '" + tokens[0] + "'");
        std::vector<double> values;
        values.reserve(tokens.size() - 1);
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            double v;
            try {
                v = parse_double(tokens[i]);
            } catch (const ParseError&) {
                throw ParseError("golden line " + std::to_string(lineno) +
                                 ": unparseable value '" + tokens[i] + "'");
            }
            if (!std::isfinite(v))
                throw ParseError("golden line " + std::to_string(lineno) +
                                 ": non-finite value '" + tokens[i] + "'");
            values.push_back(v);
        }
        g.variables.emplace_back(tokens[0], std::move(values));
    }
    return g;
}

ComparisonReport compare(const GoldenFile& candidate, const GoldenFile& reference,
                         double atol, double rtol) {
    if (atol < 0.0 || rtol < 0.0)
        throw ConfigError("tolerances must be non-negative");

    ComparisonReport report;
    for (const auto& [name, ref_values] : reference.variables) {
        const std::vector<double>* cand = candidate.find(name);
        if (cand == nullptr) {
            report.missing_in_candidate.push_back(name);
            continue;
        }
        VariableReport var;
        var.name = name;
        if (cand->size() != ref_values.size()) {
            var.length_mismatch = true;
            var.pass = false;
        } else {
            double worst_excess = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ref_values.size(); ++i) {
                double r = ref_values[i];
                double diff = std::abs((*cand)[i] - r);
                var.max_abs_err = std::max(var.max_abs_err, diff);
                if (r != 0.0) var.max_rel_err = std::max(var.max_rel_err, diff / std::abs(r));
                double excess = diff - std::max(atol, rtol * std::abs(r));
                if (excess > worst_excess || std::isnan(diff)) {
                    worst_excess = std::isnan(diff)
                                       ? std::numeric_limits<double>::infinity()
                                       : excess;
                    var.worst_index = i;
                }
                if (!(diff <= std::max(atol, rtol * std::abs(r)))) var.pass = false;
            }
        }
        report.per_variable.push_back(var);
        if (!var.pass) report.overall_pass = false;
    }
    for (const auto& [name, values] : candidate.variables)
        if (reference.find(name) == nullptr) report.extra_in_candidate.push_back(name);
    if (!report.missing_in_candidate.empty()) report.overall_pass = false;
    return report;
}

GoldenFile add_new_variables(const GoldenFile& existing, const GoldenFile& fresh) {
    GoldenFile out = existing;
    for (const auto& [name, values] : fresh.variables)
        if (out.find(name) == nullptr) out.variables.emplace_back(name, values);
    return out;
}

std::string write_metadata(const GoldenMetadata& meta) {
    auto check = [](const std::string& key, const std::string& value) {
        if (value.find('\n') != std::string::npos)
            throw ConfigError("metadata value for '" + key + "' must be single-line");
    };
    check("creation_timestamp", meta.creation_timestamp);
    check("system_description", meta.system_description);
    check("hardware_description", meta.hardware_description);

    std::string out;
    out += "creation_timestamp: " + meta.creation_timestamp + "\n";
    out += "system_description: " + meta.system_description + "\n";
    out += "hardware_description: " + meta.hardware_description + "\n";
    for (const auto& [k, v] : meta.build_config) {
        check("build_config." + k, v);
        out += "build_config." + k + ": " + v + "\n";
    }
    return out;
}

GoldenMetadata parse_metadata(const std::string& text) {
    GoldenMetadata meta;
    int lineno = 0;
    for (const std::string& line : split_lines(text)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto sep = line.find(": ");
        if (sep == std::string::npos)
            throw ParseError("metadata line " + std::to_string(lineno) +
                             ": expected 'key: value'");
        std::string key = line.substr(0, sep);
        std::string value = line.substr(sep + 2);
        const std::string bc = "build_config.";
        if (key == "creation_timestamp") meta.creation_timestamp = value;
        else if (key == "system_description") meta.system_description = value;
        else if (key == "hardware_description") meta.hardware_description = value;
        else if (key.starts_with(bc)) meta.build_config[key.substr(bc.size())] = value;
        else
            throw ParseError("metadata line " + std::to_string(lineno) + ": unknown key '" +
                             key + "'");
    }
    return meta;
}

}  // namespace harness::goldens
