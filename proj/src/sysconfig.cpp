#include "harness/sysconfig.hpp"

#include <algorithm>
#include <cctype>

#include "harness/errors.hpp"
#include "harness/strings.hpp"

namespace harness::sysconfig {

namespace {

SystemEntry* find_entry(std::vector<SystemEntry>& entries, const std::string& id) {
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const SystemEntry& e) { return e.id == id; });
    return it == entries.end() ? nullptr : &*it;
}

const SystemEntry* find_entry(const std::vector<SystemEntry>& entries, const std::string& id) {
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const SystemEntry& e) { return e.id == id; });
    return it == entries.end() ? nullptr : &*it;
}

void check_item(const std::string& item, int lineno) {
    auto eq = item.find('=');
    if (eq == 0)
        throw ParseError("modules file line " + std::to_string(lineno) +
                         ": env assignment with empty key: '" + item + "'");
}

bool needs_quoting(const std::string& v) {
    for (char c : v) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '\'' || c == '"') return true;
    }
    return false;
}

std::string shell_value(const std::string& v) {
    if (!needs_quoting(v)) return v;
    std::string out = "'";
    for (char c : v) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

}  // namespace

Mode parse_mode(const std::string& token) {
    if (token == "c" || token == "cpu") return Mode::cpu;
    if (token == "g" || token == "gpu") return Mode::gpu;
    throw UsageError("unknown mode '" + token + "' (expected cpu or gpu)");
}

const char* mode_name(Mode m) { return m == Mode::cpu ? "cpu" : "gpu"; }

std::vector<SystemEntry> parse_modules_file(const std::string& text) {
    std::vector<SystemEntry> entries;
    int lineno = 0;
    for (const std::string& raw : split_lines(text)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        auto tokens = split_whitespace(line);
        const std::string& head = tokens[0];
        auto dash = head.rfind('-');
        if (dash != std::string::npos) {
            std::string base = head.substr(0, dash);
            std::string suffix = head.substr(dash + 1);
            if (suffix != "all" && suffix != "cpu" && suffix != "gpu")
                throw ParseError("modules file line " + std::to_string(lineno) +
                                 ": unknown suffix '-" + suffix + "' in '" + head + "'");
            SystemEntry* entry = find_entry(entries, base);
            if (entry == nullptr)
                throw ParseError("modules file line " + std::to_string(lineno) +
                                 ": items for undeclared system '" + base + "'");
            auto& bucket = suffix == "all" ? entry->all_items
                         : suffix == "cpu" ? entry->cpu_items
                                           : entry->gpu_items;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                check_item(tokens[i], lineno);
                bucket.push_back(tokens[i]);
            }
        } else {
            if (find_entry(entries, head) != nullptr)
                throw ParseError("modules file line " + std::to_string(lineno) +
                                 ": duplicate system id '" + head + "'");
            SystemEntry entry;
            entry.id = head;
            // everything after the id token, inner spacing preserved
            auto rest = line.find_first_of(" \t");
            if (rest != std::string::npos) entry.display_name = trim(line.substr(rest));
            entries.push_back(std::move(entry));
        }
    }
    return entries;
}

EnvironmentSpec resolve_environment(const std::vector<SystemEntry>& entries,
                                    const std::string& system_id, Mode mode) {
    const SystemEntry* entry = find_entry(entries, system_id);
    if (entry == nullptr) {
        std::vector<std::string> ids;
        for (const auto& e : entries) ids.push_back(e.id);
        throw ConfigError("unknown system id '" + system_id + "' (available: " +
                          (ids.empty() ? std::string("none") : join(ids, ", ")) + ")");
    }

    EnvironmentSpec spec;
    spec.system_id = system_id;
    spec.mode = mode;

    auto absorb = [&spec](const std::vector<std::string>& items) {
        for (const auto& item : items) {
            auto eq = item.find('=');
            if (eq == std::string::npos) {
                spec.modules.push_back(item);
            } else {
                std::string key = item.substr(0, eq);
                std::string value = item.substr(eq + 1);
                auto it = std::find_if(spec.env.begin(), spec.env.end(),
                                       [&](const auto& kv) { return kv.first == key; });
                if (it != spec.env.end()) it->second = value;  // later assignment wins
                else spec.env.emplace_back(std::move(key), std::move(value));
            }
        }
    };
    absorb(entry->all_items);
    absorb(mode == Mode::cpu ? entry->cpu_items : entry->gpu_items);
    return spec;
}

std::string emit_load_script(const EnvironmentSpec& spec) {
    std::string out = "module purge\n";
    for (const auto& m : spec.modules) out += "module load " + m + "\n";
    for (const auto& [k, v] : spec.env) out += "export " + k + "=" + shell_value(v) + "\n";
    return out;
}

}  // namespace harness::sysconfig
