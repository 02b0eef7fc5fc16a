#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace harness::cases {

using ParamValue = std::variant<std::int64_t, double, bool, std::string>;

/// Flat parameter map; std::map keeps keys in the canonical (sorted) order.
using ParamMap = std::map<std::string, ParamValue>;

inline ParamValue val(int v) { return ParamValue{static_cast<std::int64_t>(v)}; }
inline ParamValue val(std::int64_t v) { return ParamValue{v}; }
inline ParamValue val(double v) { return ParamValue{v}; }
inline ParamValue val(bool v) { return ParamValue{v}; }
inline ParamValue val(const char* v) { return ParamValue{std::string(v)}; }
inline ParamValue val(std::string v) { return ParamValue{std::move(v)}; }

/// Canonical text for one value: ints in decimal, floats in shortest
/// round-trip decimal, bools as T/F, strings verbatim.
std::string render_value(const ParamValue& v);

/// `key=value` lines joined by LF, keys sorted; the uuid hash input.
std::string canonical_form(const ParamMap& params);

std::uint64_t fnv1a64(std::string_view bytes);

/// Low 32 bits of the 64-bit FNV-1a hash of the canonical form, as 8
/// lowercase hex digits. Stable across platforms and runs.
std::string case_uuid(const ParamMap& params);

struct CaseDefinition {
    ParamMap params;
    std::string trace;
    std::string uuid;
    bool operator==(const CaseDefinition&) const = default;
};

class CaseStack {
public:
    void push(std::string trace_fragment, ParamMap params);
    void pop();  // UsageError on empty stack
    std::size_t depth() const { return frames_.size(); }

    /// Later frames override earlier ones for duplicate keys.
    ParamMap flatten() const;
    /// Trace fragments joined by " -> ".
    std::string joined_trace() const;

    bool operator==(const CaseStack&) const = default;

private:
    struct Frame {
        std::string trace_fragment;
        ParamMap params;
        bool operator==(const Frame&) const = default;
    };
    std::vector<Frame> frames_;
};

/// Stack flattened and overlaid with `extra` (extra wins); the stack itself
/// is left untouched.
CaseDefinition define_case(const CaseStack& stack, const std::string& trace_fragment,
                           const ParamMap& extra);

using Generator = std::function<void(CaseStack&, std::vector<CaseDefinition>&)>;

struct GeneratorEntry {
    std::string name;
    Generator fn;
};

using Registry = std::vector<GeneratorEntry>;

/// Runs each generator on a fresh empty stack, in registration order.
/// Throws ConfigError on a duplicate uuid (naming both traces) or if a
/// generator leaves frames on its stack.
std::vector<CaseDefinition> generate_suite(const Registry& registry);

/// The shipped workload suite (~30 cases over grids, equation counts,
/// rank layouts, velocities, and toggles).
Registry default_registry();

/// Flat JSON object <-> ParamMap. Non-scalar values are a ParseError.
std::string params_to_json(const ParamMap& params);
ParamMap params_from_json(const std::string& text);

}  // namespace harness::cases
