#include "harness/caseengine.hpp"

#include <cstdio>

#include <json.hpp>

#include "harness/errors.hpp"
#include "harness/strings.hpp"

namespace harness::cases {

std::string render_value(const ParamValue& v) {
    return std::visit(
        [](auto&& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
            else if constexpr (std::is_same_v<T, double>) return format_double(x);
            else if constexpr (std::is_same_v<T, bool>) return x ? "T" : "F";
            else return x;
        },
        v);
}

std::string canonical_form(const ParamMap& params) {
    std::string out;
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) out += '\n';
        out += k;
        out += '=';
        out += render_value(v);
        first = false;
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string case_uuid(const ParamMap& params) {
    std::uint64_t hash = fnv1a64(canonical_form(params));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", static_cast<std::uint32_t>(hash & 0xffffffffULL));
    return buf;
}

void CaseStack::push(std::string trace_fragment, ParamMap params) {
    frames_.push_back({std::move(trace_fragment), std::move(params)});
}

void CaseStack::pop() {
    if (frames_.empty()) throw UsageError("pop on an empty case stack");
    frames_.pop_back();
}

ParamMap CaseStack::flatten() const {
    ParamMap out;
    for (const auto& frame : frames_)
        for (const auto& [k, v] : frame.params) out[k] = v;
    return out;
}

std::string CaseStack::joined_trace() const {
    std::string out;
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        if (i > 0) out += " -> ";
        out += frames_[i].trace_fragment;
    }
    return out;
}

CaseDefinition define_case(const CaseStack& stack, const std::string& trace_fragment,
                           const ParamMap& extra) {
    CaseDefinition def;
    def.params = stack.flatten();
    for (const auto& [k, v] : extra) def.params[k] = v;
    std::string prefix = stack.joined_trace();
    def.trace = prefix.empty() ? trace_fragment : prefix + " -> " + trace_fragment;
    def.uuid = case_uuid(def.params);
    return def;
}

std::vector<CaseDefinition> generate_suite(const Registry& registry) {
    std::vector<CaseDefinition> suite;
    std::map<std::string, std::string> seen;  // uuid -> trace
    for (const auto& entry : registry) {
        CaseStack stack;
        std::vector<CaseDefinition> generated;
        entry.fn(stack, generated);
        if (stack.depth() != 0)
            throw ConfigError("suite generator '" + entry.name + "' left " +
                              std::to_string(stack.depth()) + " frame(s) on the stack");
        for (auto& def : generated) {
            auto [it, inserted] = seen.emplace(def.uuid, def.trace);
            if (!inserted)
                throw ConfigError("duplicate case uuid " + def.uuid + ": '" + it->second +
                                  "' vs '" + def.trace + "'");
            suite.push_back(std::move(def));
        }
    }
    return suite;
}

Registry default_registry() {
    Registry reg;

    reg.push_back({"grid_cubes", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        stack.push("cubes", {{"num_equations", val(8)}, {"t_steps", val(5)}, {"cfl", val(0.25)}});
        for (int edge : {8, 12, 16, 24}) {
            out.push_back(define_case(stack, "edge=" + std::to_string(edge),
                                      {{"m", val(edge)}, {"n", val(edge)}, {"p", val(edge)}}));
        }
        stack.pop();
    }});

    reg.push_back({"equation_counts", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        // t_steps differs from the cube sweep so the eq=8 row stays distinct
        stack.push("equations", {{"m", val(16)}, {"n", val(16)}, {"p", val(16)},
                                 {"t_steps", val(6)}, {"cfl", val(0.25)}});
        for (int eq : {1, 2, 4, 8}) {
            out.push_back(define_case(stack, "eq=" + std::to_string(eq),
                                      {{"num_equations", val(eq)}}));
        }
        stack.pop();
    }});

    reg.push_back({"rank_layouts", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        stack.push("ranks", {{"m", val(16)}, {"n", val(16)}, {"p", val(16)},
                             {"num_equations", val(4)}, {"t_steps", val(5)}, {"cfl", val(0.25)}});
        struct Layout { int px, py, pz; };
        for (Layout l : {Layout{1, 1, 1}, Layout{1, 1, 2}, Layout{2, 2, 2}, Layout{1, 2, 4}}) {
            std::string frag = std::to_string(l.px) + "x" + std::to_string(l.py) + "x" +
                               std::to_string(l.pz);
            out.push_back(define_case(stack, frag, {{"px", val(l.px)}, {"py", val(l.py)},
                                                    {"pz", val(l.pz)}}));
        }
        stack.pop();
    }});

    reg.push_back({"velocities", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        stack.push("velocity", {{"m", val(16)}, {"n", val(16)}, {"p", val(16)},
                                {"num_equations", val(2)}, {"t_steps", val(5)}, {"cfl", val(0.25)}});
        struct Vel { const char* frag; double x, y, z; };
        for (Vel v : {Vel{"x-only", 1.0, 0.0, 0.0}, Vel{"y-only", 0.0, 1.0, 0.0},
                      Vel{"z-only", 0.0, 0.0, 1.0}, Vel{"oblique", 1.0, 0.5, 0.25},
                      Vel{"reversed", -1.0, -0.5, 0.25}, Vel{"still", 0.0, 0.0, 0.0}}) {
            out.push_back(define_case(stack, v.frag, {{"vel_x", val(v.x)}, {"vel_y", val(v.y)},
                                                      {"vel_z", val(v.z)}}));
        }
        stack.pop();
    }});

    reg.push_back({"anisotropic_grids", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        stack.push("aniso", {{"num_equations", val(4)}, {"t_steps", val(5)}, {"cfl", val(0.25)}});
        struct Grid { int m, n, p; };
        for (Grid g : {Grid{32, 8, 8}, Grid{8, 32, 8}, Grid{8, 8, 32}, Grid{24, 12, 8}}) {
            std::string frag = std::to_string(g.m) + "x" + std::to_string(g.n) + "x" +
                               std::to_string(g.p);
            out.push_back(define_case(stack, frag,
                                      {{"m", val(g.m)}, {"n", val(g.n)}, {"p", val(g.p)}}));
        }
        stack.pop();
    }});

    reg.push_back({"step_counts", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        stack.push("stepping", {{"m", val(16)}, {"n", val(16)}, {"p", val(16)},
                                {"num_equations", val(2)}, {"cfl", val(0.25)}});
        for (int steps : {0, 1, 10, 25}) {
            out.push_back(define_case(stack, "steps=" + std::to_string(steps),
                                      {{"t_steps", val(steps)}}));
        }
        stack.pop();
    }});

    reg.push_back({"toggles", [](CaseStack& stack, std::vector<CaseDefinition>& out) {
        stack.push("toggles", {{"m", val(16)}, {"n", val(16)}, {"p", val(16)},
                               {"num_equations", val(8)}, {"t_steps", val(5)}, {"cfl", val(0.25)}});
        out.push_back(define_case(stack, "rdma", {{"rdma_mpi", val("T")}}));
        out.push_back(define_case(stack, "caseopt", {{"case_optimization", val(true)}}));
        out.push_back(define_case(stack, "rdma+caseopt",
                                  {{"rdma_mpi", val("T")}, {"case_optimization", val(true)}}));
        stack.pop();
    }});

    return reg;
}

std::string params_to_json(const ParamMap& params) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : params)
        std::visit([&j, &k](auto&& x) { j[k] = x; }, v);
    return j.dump(2) + "\n";
}

ParamMap params_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("case file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("case file must be a flat JSON object");
    ParamMap out;
    for (const auto& [k, v] : j.items()) {
        if (v.is_boolean()) out[k] = v.get<bool>();
        else if (v.is_number_integer()) out[k] = v.get<std::int64_t>();
        else if (v.is_number_float()) out[k] = v.get<double>();
        else if (v.is_string()) out[k] = v.get<std::string>();
        else throw ParseError("case key '" + k + "': values must be scalars");
    }
    return out;
}

}  // namespace harness::cases
