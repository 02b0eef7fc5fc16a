#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace harness::goldens {

inline constexpr double kDefaultAtol = 1e-12;
inline constexpr double kDefaultRtol = 1e-12;

/// Named flattened float arrays, one variable per line on disk:
///   <name> <v1> <v2> ...
/// with values in 17-significant-digit scientific notation.
struct GoldenFile {
    std::vector<std::pair<std::string, std::vector<double>>> variables;

    const std::vector<double>* find(const std::string& name) const;
    bool operator==(const GoldenFile&) const = default;
};

struct VariableReport {
    std::string name;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
    bool length_mismatch = false;
    bool pass = true;
};

struct ComparisonReport {
    std::vector<VariableReport> per_variable;
    std::vector<std::string> missing_in_candidate;
    std::vector<std::string> extra_in_candidate;
    bool overall_pass = true;
};

std::string serialize_golden(const GoldenFile& g);
GoldenFile parse_golden(const std::string& text);

/// Element i of a variable passes iff |c_i - r_i| <= max(atol, rtol*|r_i|)
/// (the "absolute OR relative" rule). The relative branch is anchored to the
/// reference. Variables missing from the candidate fail the comparison;
/// extra candidate variables are reported but do not fail.
ComparisonReport compare(const GoldenFile& candidate, const GoldenFile& reference,
                         double atol = kDefaultAtol, double rtol = kDefaultRtol);

/// Keeps every existing variable untouched and appends variables that are
/// only in `fresh`, in fresh order. Idempotent.
GoldenFile add_new_variables(const GoldenFile& existing, const GoldenFile& fresh);

struct GoldenMetadata {
    std::map<std::string, std::string> build_config;
    std::string system_description;
    std::string hardware_description;
    std::string creation_timestamp;
    bool operator==(const GoldenMetadata&) const = default;
};

std::string write_metadata(const GoldenMetadata& meta);
GoldenMetadata parse_metadata(const std::string& text);

}  // namespace harness::goldens
