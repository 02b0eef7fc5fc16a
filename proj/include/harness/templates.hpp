#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace harness::templates {

/// Template file format
/// ---------------------
/// First line:   #! scheduler=<slurm|pbs|lsf|flux|none>
/// Optional fenced block, anywhere after the first line:
///   #! setup-begin
///   <setup lines, emitted verbatim after the scheduler header>
///   #! setup-end
/// Every other line belongs to the body. Placeholders `${name}` in the body
/// resolve from the JobParams fields (job_name, nodes, ranks_per_node,
/// total_ranks, walltime, partition_or_queue, account, gpu_per_node,
/// command, profile_hook), then from extra_env. There is no escape syntax.
///
/// Scheduler directive sets (directives for unset optional fields are
/// omitted; gpu directives only when gpu_per_node > 0):
///   slurm  #SBATCH --job-name= / --nodes= / --ntasks-per-node= / --time=
///          / --partition= / --account= / --gpus-per-node=
///   pbs    #PBS -N / -l select=<nodes>:mpiprocs=<rpn>[:ngpus=<g>]
///          / -l walltime= / -q / -A
///   lsf    #BSUB -J / -nnodes / -W HH:MM / -q / -P / -gpu num=<g>
///   flux   # flux: --job-name= / -N / -n / -t <minutes>m / -q / --bank=
///          / --gpus-per-node=
///   none   (no directives)

enum class Scheduler { slurm, pbs, lsf, flux, none };

Scheduler parse_scheduler(const std::string& token);
const char* scheduler_name(Scheduler s);

struct JobParams {
    std::string job_name = "job";
    int nodes = 1;
    int ranks_per_node = 1;
    int total_ranks = 1;
    std::string walltime = "01:00:00";  // HH:MM:SS
    std::optional<std::string> partition_or_queue;
    std::optional<std::string> account;
    int gpu_per_node = 0;
    std::vector<std::pair<std::string, std::string>> extra_env;
    std::string command;
    std::optional<std::string> profile_hook;
};

/// Enforces total_ranks == nodes * ranks_per_node and HH:MM:SS walltime.
void validate(const JobParams& p);

struct Template {
    std::string name;
    Scheduler scheduler = Scheduler::none;
    std::string body;         // placeholder text, trailing newline normalized
    std::string setup_lines;  // verbatim block, empty when absent
};

enum class RenderMode { batch, interactive };

std::vector<std::string> scheduler_header(Scheduler s, const JobParams& p);

/// batch: shebang + directives + setup + substituted body.
/// interactive: shebang + setup + substituted body.
std::string render_job_script(const Template& t, const JobParams& p, RenderMode mode);

/// Placeholder names in the body that no JobParams field can satisfy
/// (extra_env escape-hatch names included), in order of first appearance.
std::vector<std::string> validate_template(const Template& t);

Template parse_template_file(const std::string& name, const std::string& text);
Template load_template_file(const std::filesystem::path& path);

/// Writes <dir>/job.sh with mode 755; returns the script path.
std::filesystem::path write_job_script(const std::filesystem::path& dir,
                                       const std::string& script);

}  // namespace harness::templates
