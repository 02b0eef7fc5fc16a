#include "harness/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "harness/bench.hpp"
#include "harness/caseengine.hpp"
#include "harness/errors.hpp"
#include "harness/goldens.hpp"
#include "harness/scaling.hpp"
#include "harness/strings.hpp"
#include "harness/sysconfig.hpp"
#include "harness/templates.hpp"
#include "harness/version.hpp"
#include "harness/workload.hpp"

namespace fs = std::filesystem;

namespace harness::cli {

namespace {

constexpr const char* kUsage =
    "usage: harness <tool> [tool-flags] [-- -c <system> -n <nranks> (--gpu|--no-gpu)]\n"
    "\n"
    "tools:\n"
    "  load        print a sourceable environment load script\n"
    "  build       validate the configuration and write a build manifest\n"
    "  test        run the regression suite against golden files\n"
    "  bench       run the benchmark suite and report grindtimes\n"
    "  bench_diff  compare two benchmark reports\n"
    "  run         run a single case file\n"
    "  scaling     plan and analyze weak/strong scaling studies\n"
    "\n"
    "`harness <tool> --help` lists the tool's flags. HARNESS_CONFIG_DIR\n"
    "overrides the default config/ root.\n";

struct RunContext {
    std::string system = "default";
    std::optional<int> nranks;
    std::optional<bool> gpu;
    int ranks() const { return nranks.value_or(1); }
    std::string mode() const { return gpu.value_or(false) ? "gpu" : "cpu"; }
};

RunContext parse_run_context(const std::vector<std::string>& tokens) {
    RunContext ctx;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t == "-c") {
            if (++i >= tokens.size()) throw UsageError("-c requires a system name");
            ctx.system = tokens[i];
        } else if (t == "-n") {
            if (++i >= tokens.size()) throw UsageError("-n requires a rank count");
            ctx.nranks = static_cast<int>(parse_int(tokens[i]));
            if (*ctx.nranks < 1) throw UsageError("-n requires a positive rank count");
        } else if (t == "--gpu") {
            ctx.gpu = true;
        } else if (t == "--no-gpu") {
            ctx.gpu = false;
        } else {
            throw UsageError("unknown run-context option '" + t +
                             "' (expected -c, -n, --gpu, --no-gpu)");
        }
    }
    return ctx;
}

fs::path resolve_config_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("HARNESS_CONFIG_DIR")) return env;
    return "config";
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* compiler_id() {
#if defined(__clang__)
    return "clang";
#elif defined(__GNUC__)
    return "gcc";
#else
    return "unknown";
#endif
}

goldens::GoldenMetadata collect_metadata(const RunContext& ctx) {
    goldens::GoldenMetadata meta;
    meta.creation_timestamp = utc_timestamp();
    meta.system_description = "system=" + ctx.system + " mode=" + ctx.mode() +
                              " compiler=" + compiler_id();
    meta.hardware_description =
        std::to_string(std::thread::hardware_concurrency()) + " hardware threads, " +
        std::to_string(sizeof(void*) * 8) + "-bit";
    meta.build_config["tool_version"] = kToolVersion;
    meta.build_config["kernels"] = "generic,eq8_specialized";
    return meta;
}

/// CLI11 wants the argument vector reversed.
void parse_app(CLI::App& app, std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    app.parse(args);
}

/// Shared CLI11 boilerplate: returns an exit code when parsing ended the
/// command (help or usage error), nullopt to continue.
std::optional<int> parse_or_exit(CLI::App& app, const std::vector<std::string>& args,
                                 std::ostream& out, std::ostream& err) {
    try {
        parse_app(app, args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return std::nullopt;
}

std::vector<std::int64_t> parse_rank_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const auto& tok : split(text, ',')) {
        std::string t = trim(tok);
        if (t.empty()) throw UsageError("empty entry in rank list '" + text + "'");
        out.push_back(parse_int(t));
        if (out.back() < 1) throw UsageError("rank counts must be >= 1");
    }
    if (out.empty()) throw UsageError("rank list is empty");
    return out;
}

// ---------------------------------------------------------------------------
// load
// ---------------------------------------------------------------------------

int cmd_load(const std::vector<std::string>& args, const RunContext& ctx, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"Print a sourceable script that purges modules and loads the\n"
                 "environment for the selected system (-c) and mode (--gpu/--no-gpu).",
                 "harness load"};
    std::string modules_file;
    std::string config_flag;
    app.add_option("--modules-file", modules_file, "modules file (default <config>/modules)");
    app.add_option("--config-dir", config_flag, "configuration root (default config/)");
    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    fs::path path = modules_file.empty() ? resolve_config_dir(config_flag) / "modules"
                                         : fs::path(modules_file);
    auto entries = sysconfig::parse_modules_file(read_file(path));
    auto mode = ctx.gpu.value_or(false) ? sysconfig::Mode::gpu : sysconfig::Mode::cpu;
    out << sysconfig::emit_load_script(sysconfig::resolve_environment(entries, ctx.system, mode));
    return 0;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

int cmd_build(const std::vector<std::string>& args, const RunContext& ctx, std::ostream& out,
              std::ostream& err) {
    CLI::App app{"Validate the configuration (modules file, templates) and write a\n"
                 "manifest of the resolved build.",
                 "harness build"};
    std::string config_flag;
    std::string manifest_path = "harness-build.yml";
    app.add_option("--config-dir", config_flag, "configuration root (default config/)");
    app.add_option("-o,--output", manifest_path, "manifest path (default harness-build.yml)");
    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    fs::path config = resolve_config_dir(config_flag);
    auto entries = sysconfig::parse_modules_file(read_file(config / "modules"));
    out << "modules file: " << (config / "modules").string() << " (" << entries.size()
        << " system(s))\n";

    std::vector<std::string> template_names;
    fs::path tdir = config / "templates";
    if (fs::is_directory(tdir)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(tdir))
            if (e.path().extension() == ".tmpl") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto t = templates::load_template_file(f);
            auto unknown = templates::validate_template(t);
            if (!unknown.empty())
                throw ConfigError("template '" + t.name + "': unresolvable placeholder(s): " +
                                  join(unknown, ", "));
            template_names.push_back(t.name);
            out << "template ok: " << t.name << " (" << templates::scheduler_name(t.scheduler)
                << ")\n";
        }
    }

    std::string manifest;
    manifest += "tool_version: '" + std::string(kToolVersion) + "'\n";
    manifest += "system: '" + ctx.system + "'\n";
    manifest += "mode: '" + ctx.mode() + "'\n";
    manifest += "config_dir: '" + config.string() + "'\n";
    manifest += "kernels:\n  - generic\n  - eq8_specialized\n";
    manifest += template_names.empty() ? "templates: []\n" : "templates:\n";
    for (const auto& n : template_names) manifest += "  - " + n + "\n";
    manifest += "systems:\n";
    for (const auto& e : entries) manifest += "  - " + e.id + "\n";
    write_file(manifest_path, manifest);
    out << "wrote " << manifest_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

int cmd_test(const std::vector<std::string>& args, const RunContext& ctx, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"Run the generated regression suite against per-case golden files\n"
                 "(tests/<uuid>/golden.txt).",
                 "harness test"};
    bool list = false, generate = false, add_new = false, force = false;
    std::string only_uuid, tests_dir = "tests";
    double atol = goldens::kDefaultAtol, rtol = goldens::kDefaultRtol;
    unsigned workers = 0;
    app.add_flag("--list", list, "print `uuid  trace` for every case and exit");
    app.add_option("-o,--only", only_uuid, "restrict to one case uuid");
    app.add_flag("--generate", generate, "write golden.txt and golden-metadata.txt");
    app.add_flag("--add-new-variables", add_new,
                 "append variables missing from an existing golden file");
    app.add_flag("--force", force, "allow --generate to overwrite existing goldens");
    app.add_option("--tests-dir", tests_dir, "golden directory root (default tests/)");
    app.add_option("--atol", atol, "absolute tolerance (default 1e-12)");
    app.add_option("--rtol", rtol, "relative tolerance (default 1e-12)");
    app.add_option("--workers", workers, "rank workers per case (0 = auto, 1 = serial)");
    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    auto suite = cases::generate_suite(cases::default_registry());
    if (list) {
        for (const auto& c : suite) out << c.uuid << "  " << c.trace << "\n";
        return 0;
    }

    std::vector<const cases::CaseDefinition*> selected;
    if (!only_uuid.empty()) {
        for (const auto& c : suite)
            if (c.uuid == only_uuid) selected.push_back(&c);
        if (selected.empty()) {
            err << "error: no case with uuid '" << only_uuid << "'; available cases:\n";
            for (const auto& c : suite) err << "  " << c.uuid << "  " << c.trace << "\n";
            return 2;
        }
    } else {
        for (const auto& c : suite) selected.push_back(&c);
    }

    int failures = 0;
    for (const auto* def : selected) {
        fs::path dir = fs::path(tests_dir) / def->uuid;
        fs::path golden_path = dir / "golden.txt";
        auto wc = workload::case_from_params(def->params);
        auto run = [&] { return workload::run_case(wc, wc.decomposition.ranks(), workers); };

        if (generate) {
            if (fs::exists(golden_path) && !force)
                throw ConfigError("refusing to overwrite '" + golden_path.string() +
                                  "' without --force");
            auto result = run();
            fs::create_directories(dir);
            write_file(dir / "case.json", cases::params_to_json(def->params));
            write_file(golden_path, goldens::serialize_golden(result.samples));
            write_file(dir / "golden-metadata.txt",
                       goldens::write_metadata(collect_metadata(ctx)));
            out << "[GEN ] " << def->uuid << "  " << def->trace << "\n";
        } else if (add_new) {
            if (!fs::exists(golden_path))
                throw ConfigError("no golden file at '" + golden_path.string() +
                                  "'; run --generate first");
            auto existing = goldens::parse_golden(read_file(golden_path));
            auto merged = goldens::add_new_variables(existing, run().samples);
            write_file(golden_path, goldens::serialize_golden(merged));
            out << "[UPD ] " << def->uuid << "  " << def->trace << "\n";
        } else {
            if (!fs::exists(golden_path)) {
                out << "[FAIL] " << def->uuid << "  " << def->trace << " (no golden at "
                    << golden_path.string() << ")\n";
                ++failures;
                continue;
            }
            auto reference = goldens::parse_golden(read_file(golden_path));
            auto report = goldens::compare(run().samples, reference, atol, rtol);
            if (report.overall_pass) {
                out << "[PASS] " << def->uuid << "  " << def->trace << "\n";
            } else {
                out << "[FAIL] " << def->uuid << "  " << def->trace << "\n";
                for (const auto& var : report.per_variable) {
                    if (var.pass) continue;
                    if (var.length_mismatch)
                        out << "       " << var.name << ": length mismatch\n";
                    else
                        out << "       " << var.name << ": max abs err "
                            << format_double(var.max_abs_err) << ", max rel err "
                            << format_double(var.max_rel_err) << " (worst index "
                            << var.worst_index << ")\n";
                }
                for (const auto& name : report.missing_in_candidate)
                    out << "       missing output variable: " << name << "\n";
                ++failures;
            }
        }
    }
    if (!generate && !add_new) {
        out << (selected.size() - failures) << "/" << selected.size() << " cases passed\n";
        if (failures > 0) return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench / bench_diff
// ---------------------------------------------------------------------------

int cmd_bench(const std::vector<std::string>& args, const RunContext& ctx,
              const std::string& invocation, std::ostream& out, std::ostream& err) {
    CLI::App app{"Run the five-case benchmark suite, sized from a per-rank memory\n"
                 "budget, and report grindtimes.",
                 "harness bench"};
    double mem = 0.0;
    std::string output;
    int bytes_per = 250;
    unsigned workers = 0;
    app.add_option("--mem", mem, "problem size per rank in GB")->required();
    app.add_option("-o,--output", output, "write the report YAML here");
    app.add_option("--bytes-per-cell-eq", bytes_per,
                   "memory model constant (default 250 B per cell per equation)");
    app.add_option("--workers", workers, "rank workers per case (0 = auto, 1 = serial)");
    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    bench::RunOptions opt;
    opt.mem_gb_per_rank = mem;
    opt.system_id = ctx.system;
    opt.mode = ctx.mode();
    opt.nranks = ctx.ranks();
    opt.bytes_per_cell_per_eq = bytes_per;
    opt.workers = workers;
    opt.invocation = invocation;

    out << "benchmark suite: " << bench::default_suite().size() << " case(s), " << opt.nranks
        << " rank(s), " << format_double(mem) << " GB/rank, mode " << opt.mode << "\n";
    auto report = bench::run_benchmarks(bench::default_suite(), opt, &out);
    if (!output.empty()) {
        write_file(output, bench::serialize_report(report));
        out << "wrote " << output << "\n";
    }
    bool any_failed = std::any_of(report.records.begin(), report.records.end(),
                                  [](const bench::BenchRecord& r) { return r.status != "ok"; });
    return any_failed ? 1 : 0;
}

int cmd_bench_diff(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compare two benchmark report YAMLs case by case and flag\n"
                 "grindtime regressions.",
                 "harness bench_diff"};
    std::string ref_path, new_path, output;
    double threshold = 0.10;
    app.add_option("reference", ref_path, "reference report YAML")->required();
    app.add_option("candidate", new_path, "candidate report YAML")->required();
    app.add_option("--threshold", threshold, "regression threshold fraction (default 0.10)");
    app.add_option("-o,--output", output, "write the diff YAML here");
    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    auto reference = bench::load_report(ref_path);
    auto candidate = bench::load_report(new_path);
    auto table = bench::bench_diff(reference, candidate, threshold);
    out << bench::render_diff_table(table, threshold);
    if (!output.empty()) {
        write_file(output, bench::diff_to_yaml(table, threshold));
        out << "wrote " << output << "\n";
    }
    return table.overall_regression ? 1 : 0;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int cmd_run(const std::vector<std::string>& args, const RunContext& ctx,
            const std::string& invocation, std::ostream& out, std::ostream& err) {
    CLI::App app{"Run one case file (a flat JSON object of workload parameters) and\n"
                 "print its timings, or render a batch job script for it.",
                 "harness run"};
    std::string case_path, output, emit_job_dir, config_flag;
    std::string walltime = "01:00:00", job_name;
    int nodes = 1, gpus_per_node = 0;
    unsigned workers = 0;
    app.add_option("case", case_path, "case JSON file")->required();
    app.add_option("-o,--output", output, "write run metrics YAML here");
    app.add_option("--workers", workers, "rank workers (0 = auto, 1 = serial)");
    app.add_option("--emit-job", emit_job_dir,
                   "render <dir>/job.sh from the system template instead of running");
    app.add_option("--config-dir", config_flag, "configuration root (default config/)");
    app.add_option("--walltime", walltime, "job walltime HH:MM:SS (with --emit-job)");
    app.add_option("--nodes", nodes, "node count (with --emit-job)");
    app.add_option("--gpus-per-node", gpus_per_node, "gpus per node (with --emit-job)");
    app.add_option("--job-name", job_name, "job name (default: case file stem)");
    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    auto params = cases::params_from_json(read_file(case_path));
    auto wc = workload::case_from_params(params);
    int case_ranks = wc.decomposition.ranks();
    if (ctx.nranks && *ctx.nranks != case_ranks)
        throw UsageError("-n " + std::to_string(*ctx.nranks) +
                         " does not match the case decomposition (" +
                         std::to_string(case_ranks) + " ranks)");

    if (!emit_job_dir.empty()) {
        templates::JobParams jp;
        jp.job_name = job_name.empty() ? fs::path(case_path).stem().string() : job_name;
        jp.nodes = nodes;
        if (case_ranks % nodes != 0)
            throw UsageError("--nodes " + std::to_string(nodes) +
                             " does not divide the rank count " + std::to_string(case_ranks));
        jp.ranks_per_node = case_ranks / nodes;
        jp.total_ranks = case_ranks;
        jp.walltime = walltime;
        jp.gpu_per_node = gpus_per_node;
        jp.command = "harness run " + case_path + " -- -c " + ctx.system + " -n " +
                     std::to_string(case_ranks) + (ctx.gpu.value_or(false) ? " --gpu" : " --no-gpu");
        fs::path tpath = resolve_config_dir(config_flag) / "templates" / (ctx.system + ".tmpl");
        auto tmpl = templates::load_template_file(tpath);
        auto script = templates::render_job_script(tmpl, jp, templates::RenderMode::batch);
        auto path = templates::write_job_script(emit_job_dir, script);
        out << "wrote " << path.string() << "\n";
        return 0;
    }

    auto result = workload::run_case(wc, case_ranks, workers);
    out << "case: " << case_path << "\n";
    out << "uuid: " << cases::case_uuid(params) << "\n";
    out << "grid: " << wc.m << " x " << wc.n << " x " << wc.p << " (" << result.cells
        << " cells), " << result.equations << " equation(s)\n";
    out << "ranks: " << result.ranks << " (" << wc.decomposition.px << " x "
        << wc.decomposition.py << " x " << wc.decomposition.pz << ")\n";
    out << "steps: " << result.steps << " (" << result.rhs_evals_per_step
        << " rhs evals/step)\n";
    out << "wall_s: " << format_double(static_cast<double>(result.wall_ns) / 1e9) << "\n";
    std::string grind = "n/a";
    if (result.total_rhs_evals > 0)
        grind = format_double(bench::grindtime(static_cast<double>(result.wall_ns), result.cells,
                                               result.equations, result.total_rhs_evals));
    out << "grind_ns: " << grind << "\n";
    out << "conserved:";
    for (double v : result.conserved_totals) out << " " << format_double(v);
    out << "\n";

    if (!output.empty()) {
        std::string y;
        y += "invocation: '" + invocation + "'\n";
        y += "case_file: '" + case_path + "'\n";
        y += "uuid: '" + cases::case_uuid(params) + "'\n";
        y += "wall_s: " + format_double(static_cast<double>(result.wall_ns) / 1e9) + "\n";
        y += "grind_ns: " + (result.total_rhs_evals > 0 ? grind : std::string("null")) + "\n";
        y += "cells: " + std::to_string(result.cells) + "\n";
        y += "equations: " + std::to_string(result.equations) + "\n";
        y += "steps: " + std::to_string(result.steps) + "\n";
        y += "rhs_per_step: " + std::to_string(result.rhs_evals_per_step) + "\n";
        y += "ranks: " + std::to_string(result.ranks) + "\n";
        y += std::string("rdma_mpi: ") + (result.rdma_mpi ? "true" : "false") + "\n";
        y += std::string("case_optimization: ") + (result.case_optimization ? "true" : "false") +
             "\n";
        write_file(output, y);
        out << "wrote " << output << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// scaling
// ---------------------------------------------------------------------------

int cmd_scaling(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Plan weak/strong scaling studies and compute efficiencies from\n"
                 "benchmark reports.",
                 "harness scaling"};
    app.require_subcommand(1);

    auto* weak = app.add_subcommand("weak", "rank counts -> decompositions and grids");
    std::string weak_ranks = "128,384,1024,3072,8192,24576,65536";
    std::int64_t edge = 200;
    std::string weak_out;
    weak->add_option("--ranks", weak_ranks, "comma-separated rank counts");
    weak->add_option("--edge", edge, "per-rank cube edge (default 200)");
    weak->add_option("-o,--output", weak_out, "write the plan YAML here");

    auto* strong = app.add_subcommand("strong", "fixed grid split over rank counts");
    std::string strong_ranks = "8,16,32,64,128,256";
    std::int64_t base_edge = 634;
    std::string strong_out;
    strong->add_option("--ranks", strong_ranks, "comma-separated nondecreasing rank counts");
    strong->add_option("--base-edge", base_edge, "global cube edge (default 634)");
    strong->add_option("-o,--output", strong_out, "write the plan YAML here");

    auto* eff = app.add_subcommand("efficiency",
                                   "weak efficiency and speedup between two bench reports");
    std::string base_path, limit_path, eff_out;
    eff->add_option("base", base_path, "base benchmark report YAML")->required();
    eff->add_option("limit", limit_path, "limit benchmark report YAML")->required();
    eff->add_option("-o,--output", eff_out, "write results YAML here");

    if (auto rc = parse_or_exit(app, args, out, err)) return *rc;

    if (weak->parsed()) {
        auto plan = scaling::weak_scaling_plan(parse_rank_list(weak_ranks), edge);
        out << scaling::render_plan_table(plan);
        if (!weak_out.empty()) {
            write_file(weak_out, scaling::plan_to_yaml(plan));
            out << "wrote " << weak_out << "\n";
        }
        return 0;
    }
    if (strong->parsed()) {
        auto plan = scaling::strong_scaling_plan(base_edge, parse_rank_list(strong_ranks));
        out << scaling::render_plan_table(plan);
        if (!strong_out.empty()) {
            write_file(strong_out, scaling::plan_to_yaml(plan));
            out << "wrote " << strong_out << "\n";
        }
        return 0;
    }

    // efficiency
    auto base = bench::load_report(base_path);
    auto limit = bench::load_report(limit_path);
    std::string yaml = "cases:\n";
    bool any = false;
    out << "  " << "case           base(ranks,grind)   limit(ranks,grind)   efficiency  speedup\n";
    for (const auto& b : base.records) {
        if (b.status != "ok") continue;
        for (const auto& l : limit.records) {
            if (l.case_name != b.case_name || l.status != "ok") continue;
            scaling::EfficiencyRecord rec;
            rec.base = {base.nranks, b.grind_ns};
            rec.limit = {limit.nranks, l.grind_ns};
            rec.efficiency = scaling::weak_efficiency(rec.base, rec.limit);
            double s = scaling::speedup(rec.base.grind_ns, rec.limit.grind_ns);
            char line[160];
            std::snprintf(line, sizeof(line), "  %-14s (%lld, %.6f)   (%lld, %.6f)   %.0f%%  %.2fx\n",
                          b.case_name.c_str(), static_cast<long long>(rec.base.ranks),
                          rec.base.grind_ns, static_cast<long long>(rec.limit.ranks),
                          rec.limit.grind_ns, rec.efficiency * 100.0, s);
            out << line;
            yaml += "  - name: '" + b.case_name + "'\n";
            yaml += "    efficiency: " + format_double(rec.efficiency) + "\n";
            yaml += "    speedup: " + format_double(s) + "\n";
            any = true;
        }
    }
    if (!any) {
        out << "  (no common ok cases)\n";
        yaml = "cases: []\n";
    }
    if (!eff_out.empty()) {
        write_file(eff_out, yaml);
        out << "wrote " << eff_out << "\n";
    }
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.empty()) {
            err << kUsage;
            return 2;
        }
        std::vector<std::string> head, tail;
        bool after = false;
        for (const auto& a : args) {
            if (!after && a == "--") {
                after = true;
                continue;
            }
            (after ? tail : head).push_back(a);
        }

        const std::string tool = head.front();
        if (tool == "--help" || tool == "-h" || tool == "help") {
            out << kUsage;
            return 0;
        }
        head.erase(head.begin());
        RunContext ctx = parse_run_context(tail);
        std::string invocation = "harness " + join(args, " ");

        if (tool == "load") return cmd_load(head, ctx, out, err);
        if (tool == "build") return cmd_build(head, ctx, out, err);
        if (tool == "test") return cmd_test(head, ctx, out, err);
        if (tool == "bench") return cmd_bench(head, ctx, invocation, out, err);
        if (tool == "bench_diff") return cmd_bench_diff(head, out, err);
        if (tool == "run") return cmd_run(head, ctx, invocation, out, err);
        if (tool == "scaling") return cmd_scaling(head, out, err);

        err << "error: unknown tool '" << tool << "'\n" << kUsage;
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace harness::cli
