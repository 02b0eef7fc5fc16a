#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace harness::bench {

/// Grindtime: nanoseconds of wall time per grid point, equation, and
/// right-hand-side evaluation.
double grindtime(double wall_ns, std::int64_t cells, std::int64_t equations,
                 std::int64_t total_rhs_evals);

/// Per-rank cube edge N from a decimal-GB memory budget:
/// cells = floor(mem_gb * 1e9 / (equations * bytes_per_cell_per_eq)),
/// N = floor(cbrt(cells)). The default 250 B/cell/eq makes 16 GB at 8
/// equations size to a 200^3 block. N < 4 is a sizing error.
int size_problem(double mem_gb_per_rank, int equations, int bytes_per_cell_per_eq = 250);

struct BenchRecord {
    std::string case_name;
    std::string status = "ok";  // "ok" | "failed"
    double wall_s = 0.0;
    double grind_ns = 0.0;
    std::int64_t cells = 0;
    int equations = 0;
    int steps = 0;
    int rhs_per_step = 3;
    int ranks = 1;
    std::string invocation;
    bool operator==(const BenchRecord&) const = default;
};

struct BenchReport {
    std::string system_id;
    std::string mode = "cpu";
    double mem_gb_per_rank = 0.0;
    int nranks = 1;
    std::string tool_version;
    std::string invocation;
    std::vector<BenchRecord> records;
    bool operator==(const BenchReport&) const = default;
};

struct BenchCaseSpec {
    std::string name;
    int equations = 8;
    int steps = 20;
    bool case_optimization = false;
};

/// The shipped five-case suite over equation counts, step counts, and the
/// kernel-specialization toggle.
const std::vector<BenchCaseSpec>& default_suite();

struct RunOptions {
    double mem_gb_per_rank = 1.0;
    std::string system_id = "default";
    std::string mode = "cpu";
    int nranks = 1;
    int bytes_per_cell_per_eq = 250;
    unsigned workers = 0;
    std::string invocation;
};

/// Sizes, decomposes, and runs each case sequentially. Workload errors are
/// recorded as failed entries; the report always covers the whole suite.
BenchReport run_benchmarks(const std::vector<BenchCaseSpec>& suite, const RunOptions& opt,
                           std::ostream* log = nullptr);

/// YAML schema (top-level keys exactly): system, mode, mem_gb_per_rank,
/// nranks, tool_version, invocation, cases; each case mapping carries name,
/// status, wall_s, grind_ns, cells, equations, steps, rhs_per_step.
std::string serialize_report(const BenchReport& report);
BenchReport parse_report(const std::string& yaml_text);
BenchReport load_report(const std::filesystem::path& path);

struct DiffRow {
    std::string case_name;
    double ref_grind_ns = 0.0;
    double new_grind_ns = 0.0;
    double speedup = 0.0;  // ref / new
    bool regression = false;
};

struct DiffTable {
    std::vector<DiffRow> rows;
    std::vector<std::string> missing_cases;  // in reference, absent or failed in candidate
    std::vector<std::string> extra_cases;
    bool overall_regression = false;
};

/// A row regresses when new_grind > ref_grind * (1 + threshold); a missing
/// reference case also counts as a regression.
DiffTable bench_diff(const BenchReport& reference, const BenchReport& candidate,
                     double threshold = 0.10);

std::string render_diff_table(const DiffTable& table, double threshold);
std::string diff_to_yaml(const DiffTable& table, double threshold);

/// Reference hardware grindtimes (data/reference_grindtimes.tsv): tab-
/// separated columns hardware, type, usage, grind_ns with a header row.
struct ReferenceEntry {
    std::string hardware;
    std::string type;
    std::string usage;
    double grind_ns = 0.0;
};

std::vector<ReferenceEntry> parse_reference_table(const std::string& tsv_text);

}  // namespace harness::bench
