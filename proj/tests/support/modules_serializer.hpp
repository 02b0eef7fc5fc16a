#pragma once

#include <string>
#include <vector>

#include "harness/strings.hpp"
#include "harness/sysconfig.hpp"

namespace harness::testkit {

/// Inverse of sysconfig::parse_modules_file for round-trip testing.
inline std::string serialize_modules_file(const std::vector<sysconfig::SystemEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += e.id;
        if (!e.display_name.empty()) out += " " + e.display_name;
        out += "\n";
        if (!e.all_items.empty()) out += e.id + "-all " + join(e.all_items, " ") + "\n";
        if (!e.cpu_items.empty()) out += e.id + "-cpu " + join(e.cpu_items, " ") + "\n";
        if (!e.gpu_items.empty()) out += e.id + "-gpu " + join(e.gpu_items, " ") + "\n";
    }
    return out;
}

}  // namespace harness::testkit
