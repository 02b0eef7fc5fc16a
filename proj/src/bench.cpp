#include "harness/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "harness/errors.hpp"
#include "harness/scaling.hpp"
#include "harness/strings.hpp"
#include "harness/version.hpp"
#include "harness/workload.hpp"

namespace harness::bench {

namespace {

std::string yaml_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out += c;
        if (c == '\'') out += '\'';
    }
    out += "'";
    return out;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

double grindtime(double wall_ns, std::int64_t cells, std::int64_t equations,
                 std::int64_t total_rhs_evals) {
    if (cells <= 0 || equations <= 0 || total_rhs_evals <= 0)
        throw ConfigError("grindtime: cells, equations, and rhs evaluations must be positive");
    if (wall_ns < 0.0) throw ConfigError("grindtime: wall time must be >= 0");
    return wall_ns / (static_cast<double>(cells) * static_cast<double>(equations) *
                      static_cast<double>(total_rhs_evals));
}

int size_problem(double mem_gb_per_rank, int equations, int bytes_per_cell_per_eq) {
    if (mem_gb_per_rank <= 0.0) throw ConfigError("size_problem: memory budget must be positive");
    if (equations <= 0) throw ConfigError("size_problem: equations must be positive");
    if (bytes_per_cell_per_eq <= 0)
        throw ConfigError("size_problem: bytes per cell per equation must be positive");

    const double cells_d = std::floor(
        mem_gb_per_rank * 1e9 /
        (static_cast<double>(equations) * static_cast<double>(bytes_per_cell_per_eq)));
    if (cells_d > 9e18)
        throw ConfigError("size_problem: memory budget overflows the cell counter");
    const auto cells = static_cast<std::int64_t>(cells_d);
    auto cube = [](std::int64_t n) { return n * n * n; };
    std::int64_t n = std::llround(std::cbrt(cells_d));
    while (cube(n + 1) <= cells) ++n;
    while (n > 0 && cube(n) > cells) --n;
    if (n < 4)
        throw ConfigError("size_problem: " + format_double(mem_gb_per_rank) +
                          " GB/rank at " + std::to_string(equations) +
                          " equation(s) sizes to edge " + std::to_string(n) +
                          " (< 4); increase the memory budget");
    return static_cast<int>(n);
}

const std::vector<BenchCaseSpec>& default_suite() {
    static const std::vector<BenchCaseSpec> suite = {
        {"eq8_base", 8, 20, false},
        {"eq4", 4, 25, false},
        {"eq1", 1, 40, false},
        {"eq8_caseopt", 8, 20, true},
        {"eq8_long", 8, 60, false},
    };
    return suite;
}

BenchReport run_benchmarks(const std::vector<BenchCaseSpec>& suite, const RunOptions& opt,
                           std::ostream* log) {
    if (suite.empty()) throw ConfigError("benchmark suite is empty");
    BenchReport report;
    report.system_id = opt.system_id;
    report.mode = opt.mode;
    report.mem_gb_per_rank = opt.mem_gb_per_rank;
    report.nranks = opt.nranks;
    report.tool_version = kToolVersion;
    report.invocation = opt.invocation;

    const auto d = scaling::balanced_decomposition(opt.nranks);
    for (const auto& spec : suite) {
        BenchRecord rec;
        rec.case_name = spec.name;
        rec.ranks = opt.nranks;
        rec.invocation = opt.invocation;
        rec.equations = spec.equations;
        rec.steps = spec.steps;
        if (log != nullptr) *log << "  " << pad_right(spec.name, 14) << " " << std::flush;
        try {
            const int edge = size_problem(opt.mem_gb_per_rank, spec.equations,
                                          opt.bytes_per_cell_per_eq);
            workload::WorkloadCase wc;
            wc.m = edge * d[0];
            wc.n = edge * d[1];
            wc.p = edge * d[2];
            wc.num_equations = spec.equations;
            wc.t_steps = spec.steps;
            wc.case_optimization = spec.case_optimization;
            wc.decomposition = {d[0], d[1], d[2]};
            if (log != nullptr)
                *log << wc.m << "x" << wc.n << "x" << wc.p << " (" << edge
                     << "^3/rank) ... " << std::flush;

            const auto rr = workload::run_case(wc, opt.nranks, opt.workers);
            rec.wall_s = static_cast<double>(rr.wall_ns) / 1e9;
            rec.grind_ns = grindtime(static_cast<double>(rr.wall_ns), rr.cells, rr.equations,
                                     rr.total_rhs_evals);
            rec.cells = rr.cells;
            rec.rhs_per_step = rr.rhs_evals_per_step;
            if (log != nullptr)
                *log << "grind " << fixed6(rec.grind_ns) << " ns, wall " << fixed2(rec.wall_s)
                     << " s\n";
        } catch (const std::exception& e) {
            rec.status = "failed";
            if (log != nullptr) *log << "failed: " << e.what() << "\n";
        }
        report.records.push_back(std::move(rec));
    }
    return report;
}

std::string serialize_report(const BenchReport& report) {
    std::string out;
    out += "system: " + yaml_quote(report.system_id) + "\n";
    out += "mode: " + yaml_quote(report.mode) + "\n";
    out += "mem_gb_per_rank: " + format_double(report.mem_gb_per_rank) + "\n";
    out += "nranks: " + std::to_string(report.nranks) + "\n";
    out += "tool_version: " + yaml_quote(report.tool_version) + "\n";
    out += "invocation: " + yaml_quote(report.invocation) + "\n";
    if (report.records.empty()) {
        out += "cases: []\n";
        return out;
    }
    out += "cases:\n";
    for (const auto& rec : report.records) {
        out += "  - name: " + yaml_quote(rec.case_name) + "\n";
        out += "    status: " + yaml_quote(rec.status) + "\n";
        out += "    wall_s: " + format_double(rec.wall_s) + "\n";
        out += "    grind_ns: " + format_double(rec.grind_ns) + "\n";
        out += "    cells: " + std::to_string(rec.cells) + "\n";
        out += "    equations: " + std::to_string(rec.equations) + "\n";
        out += "    steps: " + std::to_string(rec.steps) + "\n";
        out += "    rhs_per_step: " + std::to_string(rec.rhs_per_step) + "\n";
    }
    return out;
}

BenchReport parse_report(const std::string& yaml_text) {
    try {
        YAML::Node root = YAML::Load(yaml_text);
        if (!root.IsMap()) throw ParseError("benchmark report: top level must be a mapping");
        auto need = [&root](const char* key) -> YAML::Node {
            YAML::Node n = root[key];
            if (!n) throw ParseError(std::string("benchmark report: missing key '") + key + "'");
            return n;
        };
        BenchReport report;
        report.system_id = need("system").as<std::string>();
        report.mode = need("mode").as<std::string>();
        report.mem_gb_per_rank = need("mem_gb_per_rank").as<double>();
        report.nranks = need("nranks").as<int>();
        report.tool_version = need("tool_version").as<std::string>();
        report.invocation = need("invocation").as<std::string>();
        YAML::Node cases = need("cases");
        if (!cases.IsSequence() && !cases.IsNull())
            throw ParseError("benchmark report: 'cases' must be a sequence");
        for (const auto& c : cases) {
            auto field = [&c](const char* key) -> YAML::Node {
                YAML::Node n = c[key];
                if (!n)
                    throw ParseError(std::string("benchmark report: case missing key '") + key +
                                     "'");
                return n;
            };
            BenchRecord rec;
            rec.case_name = field("name").as<std::string>();
            rec.status = field("status").as<std::string>();
            rec.wall_s = field("wall_s").as<double>();
            rec.grind_ns = field("grind_ns").as<double>();
            rec.cells = field("cells").as<std::int64_t>();
            rec.equations = field("equations").as<int>();
            rec.steps = field("steps").as<int>();
            rec.rhs_per_step = field("rhs_per_step").as<int>();
            rec.ranks = report.nranks;
            rec.invocation = report.invocation;
            report.records.push_back(std::move(rec));
        }
        return report;
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("benchmark report: ") + e.what());
    }
}

BenchReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read benchmark report '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_report(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

DiffTable bench_diff(const BenchReport& reference, const BenchReport& candidate,
                     double threshold) {
    if (threshold < 0.0) throw ConfigError("bench_diff: threshold must be >= 0");
    DiffTable table;
    std::map<std::string, const BenchRecord*> by_name;
    for (const auto& rec : candidate.records)
        if (rec.status == "ok") by_name[rec.case_name] = &rec;

    for (const auto& ref : reference.records) {
        if (ref.status != "ok") continue;
        auto it = by_name.find(ref.case_name);
        if (it == by_name.end() || it->second->grind_ns <= 0.0) {
            table.missing_cases.push_back(ref.case_name);
            continue;
        }
        DiffRow row;
        row.case_name = ref.case_name;
        row.ref_grind_ns = ref.grind_ns;
        row.new_grind_ns = it->second->grind_ns;
        row.speedup = row.ref_grind_ns / row.new_grind_ns;
        row.regression = row.new_grind_ns > row.ref_grind_ns * (1.0 + threshold);
        table.rows.push_back(row);
        by_name.erase(it);
    }
    for (const auto& [name, rec] : by_name) table.extra_cases.push_back(name);
    table.overall_regression =
        !table.missing_cases.empty() ||
        std::any_of(table.rows.begin(), table.rows.end(),
                    [](const DiffRow& r) { return r.regression; });
    return table;
}

std::string render_diff_table(const DiffTable& table, double threshold) {
    std::vector<std::array<std::string, 5>> cells;
    cells.push_back({"case", "ref_grind_ns", "new_grind_ns", "speedup", "regression"});
    for (const auto& row : table.rows) {
        cells.push_back({row.case_name, fixed6(row.ref_grind_ns), fixed6(row.new_grind_ns),
                         fixed2(row.speedup), row.regression ? "YES" : "no"});
    }
    std::array<std::size_t, 5> width{0, 0, 0, 0, 0};
    for (const auto& line : cells)
        for (int c = 0; c < 5; ++c) width[c] = std::max(width[c], line[c].size());

    std::string out;
    for (const auto& line : cells) {
        out += "  " + pad_right(line[0], width[0]);
        out += "  " + pad_left(line[1], width[1]);
        out += "  " + pad_left(line[2], width[2]);
        out += "  " + pad_left(line[3], width[3]);
        out += "  " + pad_left(line[4], width[4]);
        out += '\n';
    }
    for (const auto& name : table.missing_cases)
        out += "  missing in candidate: " + name + "\n";
    for (const auto& name : table.extra_cases)
        out += "  extra in candidate:   " + name + "\n";

    char pct[32];
    std::snprintf(pct, sizeof(pct), "%g%%", threshold * 100.0);
    if (table.overall_regression)
        out += "verdict: REGRESSION (threshold " + std::string(pct) + ")\n";
    else
        out += "verdict: OK (" + std::to_string(table.rows.size()) + " case(s) compared, threshold " +
               std::string(pct) + ")\n";
    return out;
}

std::string diff_to_yaml(const DiffTable& table, double threshold) {
    std::string out;
    out += "threshold: " + format_double(threshold) + "\n";
    out += std::string("overall_regression: ") + (table.overall_regression ? "true" : "false") +
           "\n";
    out += table.rows.empty() ? "rows: []\n" : "rows:\n";
    for (const auto& row : table.rows) {
        out += "  - name: " + yaml_quote(row.case_name) + "\n";
        out += "    ref_grind_ns: " + format_double(row.ref_grind_ns) + "\n";
        out += "    new_grind_ns: " + format_double(row.new_grind_ns) + "\n";
        out += "    speedup: " + format_double(row.speedup) + "\n";
        out += std::string("    regression: ") + (row.regression ? "true" : "false") + "\n";
    }
    out += table.missing_cases.empty() ? "missing: []\n" : "missing:\n";
    for (const auto& name : table.missing_cases) out += "  - " + yaml_quote(name) + "\n";
    out += table.extra_cases.empty() ? "extra: []\n" : "extra:\n";
    for (const auto& name : table.extra_cases) out += "  - " + yaml_quote(name) + "\n";
    return out;
}

std::vector<ReferenceEntry> parse_reference_table(const std::string& tsv_text) {
    auto lines = split_lines(tsv_text);
    if (lines.empty()) throw ParseError("reference grindtime table is empty");
    if (lines[0] != "hardware\ttype\tusage\tgrind_ns")
        throw ParseError("reference grindtime table: bad header '" + lines[0] + "'");
    std::vector<ReferenceEntry> entries;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = split(lines[i], '\t');
        if (fields.size() != 4)
            throw ParseError("reference grindtime table line " + std::to_string(i + 1) +
                             ": expected 4 tab-separated fields");
        ReferenceEntry e;
        e.hardware = fields[0];
        e.type = fields[1];
        e.usage = fields[2];
        try {
            e.grind_ns = parse_double(fields[3]);
        } catch (const ParseError&) {
            throw ParseError("reference grindtime table line " + std::to_string(i + 1) +
                             ": bad grindtime '" + fields[3] + "'");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace harness::bench
