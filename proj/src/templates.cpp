#include "harness/templates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "harness/errors.hpp"
#include "harness/strings.hpp"

namespace harness::templates {

namespace {

struct Walltime {
    int hours = 0, minutes = 0, seconds = 0;
};

Walltime parse_walltime(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() != 3)
        throw ConfigError("walltime '" + text + "' is not HH:MM:SS");
    Walltime w;
    try {
        w.hours = static_cast<int>(parse_int(parts[0]));
        w.minutes = static_cast<int>(parse_int(parts[1]));
        w.seconds = static_cast<int>(parse_int(parts[2]));
    } catch (const ParseError&) {
        throw ConfigError("walltime '" + text + "' is not HH:MM:SS");
    }
    if (w.hours < 0 || w.minutes < 0 || w.minutes >= 60 || w.seconds < 0 || w.seconds >= 60)
        throw ConfigError("walltime '" + text + "' out of range (MM and SS must be in [0,60))");
    return w;
}

const std::vector<std::string>& builtin_fields() {
    static const std::vector<std::string> fields = {
        "job_name", "nodes", "ranks_per_node", "total_ranks", "walltime",
        "partition_or_queue", "account", "gpu_per_node", "command", "profile_hook"};
    return fields;
}

std::optional<std::string> resolve_field(const std::string& name, const JobParams& p) {
    if (name == "job_name") return p.job_name;
    if (name == "nodes") return std::to_string(p.nodes);
    if (name == "ranks_per_node") return std::to_string(p.ranks_per_node);
    if (name == "total_ranks") return std::to_string(p.total_ranks);
    if (name == "walltime") return p.walltime;
    if (name == "partition_or_queue") return p.partition_or_queue.value_or("");
    if (name == "account") return p.account.value_or("");
    if (name == "gpu_per_node") return std::to_string(p.gpu_per_node);
    if (name == "command")
        return p.profile_hook ? *p.profile_hook + " " + p.command : p.command;
    if (name == "profile_hook") return p.profile_hook.value_or("");
    for (const auto& [k, v] : p.extra_env)
        if (k == name) return v;
    return std::nullopt;
}

/// Literal `${name}` substitution. `on_name` returns the replacement or
/// nullopt; nullopt is a render error.
std::string substitute(const std::string& text, const std::string& template_name,
                       const JobParams& p) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
            auto close = text.find('}', i + 2);
            if (close == std::string::npos)
                throw ParseError("template '" + template_name + "': unclosed '${' at offset " +
                                 std::to_string(i));
            std::string name = text.substr(i + 2, close - i - 2);
            auto value = resolve_field(name, p);
            if (!value)
                throw ConfigError("template '" + template_name +
                                  "': unresolved placeholder '${" + name + "}'");
            out += *value;
            i = close + 1;
        } else {
            out += text[i];
            ++i;
        }
    }
    return out;
}

std::vector<std::string> placeholder_names(const std::string& text,
                                           const std::string& template_name) {
    std::vector<std::string> names;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
            auto close = text.find('}', i + 2);
            if (close == std::string::npos)
                throw ParseError("template '" + template_name + "': unclosed '${' at offset " +
                                 std::to_string(i));
            names.push_back(text.substr(i + 2, close - i - 2));
            i = close + 1;
        } else {
            ++i;
        }
    }
    return names;
}

std::string with_trailing_newline(std::string s) {
    if (!s.empty() && s.back() != '\n') s += '\n';
    return s;
}

}  // namespace

Scheduler parse_scheduler(const std::string& token) {
    if (token == "slurm") return Scheduler::slurm;
    if (token == "pbs") return Scheduler::pbs;
    if (token == "lsf") return Scheduler::lsf;
    if (token == "flux") return Scheduler::flux;
    if (token == "none") return Scheduler::none;
    throw ConfigError("unsupported scheduler '" + token +
                      "' (expected slurm, pbs, lsf, flux, or none)");
}

const char* scheduler_name(Scheduler s) {
    switch (s) {
        case Scheduler::slurm: return "slurm";
        case Scheduler::pbs: return "pbs";
        case Scheduler::lsf: return "lsf";
        case Scheduler::flux: return "flux";
        case Scheduler::none: return "none";
    }
    return "none";
}

void validate(const JobParams& p) {
    if (p.nodes <= 0 || p.ranks_per_node <= 0 || p.total_ranks <= 0)
        throw ConfigError("job parameters: nodes, ranks_per_node, and total_ranks must be positive");
    if (p.total_ranks != p.nodes * p.ranks_per_node)
        throw ConfigError("job parameters: total_ranks (" + std::to_string(p.total_ranks) +
                          ") != nodes * ranks_per_node (" +
                          std::to_string(p.nodes * p.ranks_per_node) + ")");
    if (p.gpu_per_node < 0)
        throw ConfigError("job parameters: gpu_per_node must be >= 0");
    parse_walltime(p.walltime);
}

std::vector<std::string> scheduler_header(Scheduler s, const JobParams& p) {
    validate(p);
    std::vector<std::string> lines;
    Walltime w = parse_walltime(p.walltime);
    char buf[64];
    switch (s) {
        case Scheduler::slurm:
            lines.push_back("#SBATCH --job-name=" + p.job_name);
            lines.push_back("#SBATCH --nodes=" + std::to_string(p.nodes));
            lines.push_back("#SBATCH --ntasks-per-node=" + std::to_string(p.ranks_per_node));
            lines.push_back("#SBATCH --time=" + p.walltime);
            if (p.partition_or_queue)
                lines.push_back("#SBATCH --partition=" + *p.partition_or_queue);
            if (p.account) lines.push_back("#SBATCH --account=" + *p.account);
            if (p.gpu_per_node > 0)
                lines.push_back("#SBATCH --gpus-per-node=" + std::to_string(p.gpu_per_node));
            break;
        case Scheduler::pbs: {
            lines.push_back("#PBS -N " + p.job_name);
            std::string select = "#PBS -l select=" + std::to_string(p.nodes) +
                                 ":mpiprocs=" + std::to_string(p.ranks_per_node);
            if (p.gpu_per_node > 0) select += ":ngpus=" + std::to_string(p.gpu_per_node);
            lines.push_back(select);
            lines.push_back("#PBS -l walltime=" + p.walltime);
            if (p.partition_or_queue) lines.push_back("#PBS -q " + *p.partition_or_queue);
            if (p.account) lines.push_back("#PBS -A " + *p.account);
            break;
        }
        case Scheduler::lsf:
            lines.push_back("#BSUB -J " + p.job_name);
            lines.push_back("#BSUB -nnodes " + std::to_string(p.nodes));
            std::snprintf(buf, sizeof(buf), "#BSUB -W %02d:%02d", w.hours, w.minutes);
            lines.push_back(buf);
            if (p.partition_or_queue) lines.push_back("#BSUB -q " + *p.partition_or_queue);
            if (p.account) lines.push_back("#BSUB -P " + *p.account);
            if (p.gpu_per_node > 0)
                lines.push_back("#BSUB -gpu num=" + std::to_string(p.gpu_per_node));
            break;
        case Scheduler::flux: {
            lines.push_back("# flux: --job-name=" + p.job_name);
            lines.push_back("# flux: -N " + std::to_string(p.nodes));
            lines.push_back("# flux: -n " + std::to_string(p.total_ranks));
            // round seconds up so the allocation is never shorter than asked
            int minutes = w.hours * 60 + w.minutes + (w.seconds > 0 ? 1 : 0);
            lines.push_back("# flux: -t " + std::to_string(minutes) + "m");
            if (p.partition_or_queue) lines.push_back("# flux: -q " + *p.partition_or_queue);
            if (p.account) lines.push_back("# flux: --bank=" + *p.account);
            if (p.gpu_per_node > 0)
                lines.push_back("# flux: --gpus-per-node=" + std::to_string(p.gpu_per_node));
            break;
        }
        case Scheduler::none:
            break;
    }
    return lines;
}

std::string render_job_script(const Template& t, const JobParams& p, RenderMode mode) {
    validate(p);
    std::string out = "#!/bin/bash\n";
    if (mode == RenderMode::batch) {
        for (const auto& line : scheduler_header(t.scheduler, p)) out += line + "\n";
    }
    if (!t.setup_lines.empty()) out += with_trailing_newline(t.setup_lines);
    out += with_trailing_newline(substitute(t.body, t.name, p));
    return out;
}

std::vector<std::string> validate_template(const Template& t) {
    std::vector<std::string> unknown;
    const auto& fields = builtin_fields();
    for (const auto& name : placeholder_names(t.body, t.name)) {
        bool known = std::find(fields.begin(), fields.end(), name) != fields.end();
        bool seen = std::find(unknown.begin(), unknown.end(), name) != unknown.end();
        if (!known && !seen) unknown.push_back(name);
    }
    return unknown;
}

Template parse_template_file(const std::string& name, const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || !lines[0].starts_with("#! scheduler="))
        throw ParseError("template '" + name +
                         "': first line must be '#! scheduler=<dialect>'");
    Template t;
    t.name = name;
    t.scheduler = parse_scheduler(trim(lines[0].substr(std::string("#! scheduler=").size())));

    std::vector<std::string> body, setup;
    bool in_setup = false;
    bool saw_setup_end = true;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (trim(line) == "#! setup-begin") {
            if (in_setup)
                throw ParseError("template '" + name + "' line " + std::to_string(i + 1) +
                                 ": nested '#! setup-begin'");
            in_setup = true;
            saw_setup_end = false;
        } else if (trim(line) == "#! setup-end") {
            if (!in_setup)
                throw ParseError("template '" + name + "' line " + std::to_string(i + 1) +
                                 ": '#! setup-end' without '#! setup-begin'");
            in_setup = false;
            saw_setup_end = true;
        } else if (in_setup) {
            setup.push_back(line);
        } else {
            body.push_back(line);
        }
    }
    if (!saw_setup_end)
        throw ParseError("template '" + name + "': missing '#! setup-end'");

    t.setup_lines = join(setup, "\n");
    t.body = join(body, "\n");
    return t;
}

Template load_template_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read template file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_template_file(path.stem().string(), ss.str());
}

std::filesystem::path write_job_script(const std::filesystem::path& dir,
                                       const std::string& script) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::path path = dir / "job.sh";
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + path.string() + "'");
        out << script;
    }
    fs::permissions(path, fs::perms::owner_all | fs::perms::group_read |
                              fs::perms::group_exec | fs::perms::others_read |
                              fs::perms::others_exec,
                    fs::perm_options::replace);
    return path;
}

}  // namespace harness::templates
