#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "harness/caseengine.hpp"
#include "harness/errors.hpp"

using namespace harness;
using namespace harness::cases;

TEST_CASE("fnv1a64 matches the reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("empty param map hashes to the offset-basis low bits") {
    CHECK(case_uuid({}) == "84222325");
}

TEST_CASE("uuid is deterministic and content sensitive") {
    ParamMap a{{"m", val(10)}};
    ParamMap b{{"m", val(10)}};
    ParamMap c{{"m", val(11)}};
    CHECK(case_uuid(a) == case_uuid(b));
    CHECK(case_uuid(a) == "a719feae");
    CHECK(case_uuid(c) == "a71a0061");
    CHECK(case_uuid(a) != case_uuid(c));
}

TEST_CASE("canonical form sorts keys and renders typed values") {
    ParamMap p{{"igr", val(true)}, {"alf_factor", val(10)}};
    CHECK(canonical_form(p) == "alf_factor=10\nigr=T");
    CHECK(case_uuid(p) == "8d202427");
}

TEST_CASE("value rendering is type-stable") {
    CHECK(render_value(val(10)) == "10");
    CHECK(render_value(val(false)) == "F");
    CHECK(render_value(val("T")) == "T");
    CHECK(render_value(val(0.5)) == "0.5");
    CHECK(render_value(val(0.1)) == "0.1");
    // shortest round-trip form, no trailing zeros
    CHECK(render_value(val(10.0)) == "10");
    CHECK(render_value(val(1e300)) == "1e+300");
}

TEST_CASE("uuid ignores insertion order") {
    ParamMap a;
    a["x"] = val(1);
    a["y"] = val(2.5);
    a["z"] = val("s");
    ParamMap b;
    b["z"] = val("s");
    b["x"] = val(1);
    b["y"] = val(2.5);
    CHECK(case_uuid(a) == case_uuid(b));
}

TEST_CASE("push then pop restores the stack bytewise") {
    CaseStack stack;
    CaseStack initial = stack;
    stack.push("A", {{"a", val(1)}});
    stack.pop();
    CHECK(stack == initial);

    stack.push("A", {{"a", val(1)}});
    stack.push("B", {{"b", val(2)}});
    stack.pop();
    CHECK(stack.depth() == 1);
    CHECK(stack.flatten() == ParamMap{{"a", val(1)}});
}

TEST_CASE("pop on an empty stack is a usage error") {
    CaseStack stack;
    CHECK_THROWS_AS(stack.pop(), UsageError);
}

TEST_CASE("push with an empty map extends the trace only") {
    CaseStack stack;
    stack.push("marker", {});
    CHECK(stack.flatten().empty());
    CHECK(stack.joined_trace() == "marker");
}

TEST_CASE("later frames and extras override earlier values") {
    CaseStack stack;
    stack.push("a", {{"k", val(1)}});
    stack.push("b", {{"k", val(2)}});
    CHECK(stack.flatten() == ParamMap{{"k", val(2)}});
    auto def = define_case(stack, "c", {{"k", val(3)}});
    CHECK(def.params == ParamMap{{"k", val(3)}});
}

TEST_CASE("the documented igr-style flow yields three cases") {
    CaseStack stack;
    std::vector<CaseDefinition> out;
    stack.push("IGR", {{"igr", val(true)}, {"alf_factor", val(10)}, {"num_igr_iters", val(10)},
                       {"num_igr_warm_start_iters", val(10)}});
    for (int order : {3, 5}) {
        stack.push("igr_order=" + std::to_string(order), {{"igr_order", val(order)}});
        out.push_back(define_case(stack, "Jacobi", {{"igr_iter_solver", val(1)}}));
        if (order == 5)
            out.push_back(define_case(stack, "Gauss Seidel", {{"igr_iter_solver", val(2)}}));
        stack.pop();
    }
    stack.pop();

    REQUIRE(out.size() == 3);
    CHECK(stack.depth() == 0);
    CHECK(out[2].trace == "IGR -> igr_order=5 -> Gauss Seidel");
    CHECK(out[2].params.at("igr") == val(true));
    CHECK(out[2].params.at("igr_order") == val(5));
    CHECK(out[2].params.at("igr_iter_solver") == val(2));
    std::set<std::string> uuids{out[0].uuid, out[1].uuid, out[2].uuid};
    CHECK(uuids.size() == 3);
}

TEST_CASE("define_case on an empty stack uses the fragment as the trace") {
    CaseStack stack;
    auto def = define_case(stack, "base", {{"m", val(10)}});
    CHECK(def.trace == "base");
    CHECK(def.params == ParamMap{{"m", val(10)}});
    CHECK(def.uuid == case_uuid(def.params));
    CHECK(stack.depth() == 0);
}

TEST_CASE("same stack with different extras gives distinct uuids") {
    CaseStack stack;
    stack.push("base", {{"m", val(16)}});
    auto a = define_case(stack, "one", {{"k", val(1)}});
    auto b = define_case(stack, "two", {{"k", val(2)}});
    CHECK(a.uuid != b.uuid);
    stack.pop();
}

TEST_CASE("empty registry generates an empty suite") {
    CHECK(generate_suite({}).empty());
}

TEST_CASE("the shipped registry spans at least 24 unique cases") {
    auto suite = generate_suite(default_registry());
    CHECK(suite.size() >= 24);
    std::set<std::string> uuids;
    for (const auto& c : suite) uuids.insert(c.uuid);
    CHECK(uuids.size() == suite.size());
    // registration order: the cube sweep comes first
    CHECK(suite.front().trace == "cubes -> edge=8");
}

TEST_CASE("suite generation is reproducible") {
    auto a = generate_suite(default_registry());
    auto b = generate_suite(default_registry());
    CHECK(a == b);
}

TEST_CASE("duplicate uuids across the suite name both traces") {
    Registry reg;
    reg.push_back({"first", [](CaseStack& s, std::vector<CaseDefinition>& out) {
        out.push_back(define_case(s, "alpha", {{"m", val(1)}}));
    }});
    reg.push_back({"second", [](CaseStack& s, std::vector<CaseDefinition>& out) {
        out.push_back(define_case(s, "beta", {{"m", val(1)}}));
    }});
    CHECK_THROWS_WITH_AS(generate_suite(reg), doctest::Contains("alpha"), ConfigError);
    CHECK_THROWS_WITH_AS(generate_suite(reg), doctest::Contains("beta"), ConfigError);
}

TEST_CASE("a generator that leaves frames behind is rejected") {
    Registry reg;
    reg.push_back({"leaky", [](CaseStack& s, std::vector<CaseDefinition>& out) {
        s.push("left-behind", {});
        out.push_back(define_case(s, "x", {}));
    }});
    CHECK_THROWS_WITH_AS(generate_suite(reg), doctest::Contains("leaky"), ConfigError);
}

TEST_CASE("params round-trip through flat JSON") {
    ParamMap p{{"m", val(16)}, {"cfl", val(0.25)}, {"rdma_mpi", val("T")},
               {"case_optimization", val(false)}};
    auto text = params_to_json(p);
    CHECK(params_from_json(text) == p);
}

TEST_CASE("non-scalar JSON values are rejected") {
    CHECK_THROWS_WITH_AS(params_from_json("{\"v\": [1, 2]}"), doctest::Contains("scalar"),
                         ParseError);
    CHECK_THROWS_AS(params_from_json("[1, 2]"), ParseError);
    CHECK_THROWS_AS(params_from_json("{bad json"), ParseError);
}
