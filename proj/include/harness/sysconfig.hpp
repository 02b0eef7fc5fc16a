#pragma once

#include <string>
#include <utility>
#include <vector>

namespace harness::sysconfig {

enum class Mode { cpu, gpu };

/// Accepts "c", "cpu", "g", "gpu"; throws UsageError otherwise.
Mode parse_mode(const std::string& token);
const char* mode_name(Mode m);

/// One system from the modules file.
///
/// File grammar, one entry per declared id:
///   <id> <display name...>        declaration (id has no '-')
///   <id>-all <item ...>           items shared by every build
///   <id>-cpu <item ...>           cpu-only items
///   <id>-gpu <item ...>           gpu-only items
/// An item is a module name (no '=') or an env assignment KEY=VALUE,
/// split at the first '=' so values may themselves contain '='.
/// Blank lines and lines starting with '#' are ignored.
struct SystemEntry {
    std::string id;
    std::string display_name;
    std::vector<std::string> all_items;
    std::vector<std::string> cpu_items;
    std::vector<std::string> gpu_items;
    bool operator==(const SystemEntry&) const = default;
};

struct EnvironmentSpec {
    std::string system_id;
    Mode mode = Mode::cpu;
    std::vector<std::string> modules;
    std::vector<std::pair<std::string, std::string>> env;
    bool operator==(const EnvironmentSpec&) const = default;
};

std::vector<SystemEntry> parse_modules_file(const std::string& text);

EnvironmentSpec resolve_environment(const std::vector<SystemEntry>& entries,
                                    const std::string& system_id, Mode mode);

/// Sourceable POSIX sh text: `module purge`, then one `module load` per
/// module, then one `export K=V` per env pair. Byte-deterministic.
std::string emit_load_script(const EnvironmentSpec& spec);

}  // namespace harness::sysconfig
