#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "harness/errors.hpp"
#include "harness/sysconfig.hpp"
#include "support/modules_serializer.hpp"

using namespace harness;
using namespace harness::sysconfig;

namespace {

const char* kDeltaText =
    "d      NCSA Delta\n"
    "d-all python/3.11.6\n"
    "d-cpu gcc/11.4.0 openmpi\n"
    "d-gpu nvhpc/24.1 cuda/12.3.0 openmpi/4.1.5+cuda cmake\n"
    "d-gpu CC=nvc CXX=nvc++ FC=nvfortran\n"
    "d-gpu MFC_CUDA_CC=80,86\n";

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("delta example parses into one entry with classified items") {
    auto entries = parse_modules_file(kDeltaText);
    REQUIRE(entries.size() == 1);
    const auto& d = entries[0];
    CHECK(d.id == "d");
    CHECK(d.display_name == "NCSA Delta");
    CHECK(d.all_items == std::vector<std::string>{"python/3.11.6"});
    CHECK(d.cpu_items == std::vector<std::string>{"gcc/11.4.0", "openmpi"});
    CHECK(contains(d.gpu_items, "nvhpc/24.1"));
    CHECK(contains(d.gpu_items, "CC=nvc"));
    CHECK(d.gpu_items.size() == 8);
}

TEST_CASE("empty input gives an empty entry list") {
    CHECK(parse_modules_file("").empty());
    CHECK(parse_modules_file("\n# comment only\n\n").empty());
}

TEST_CASE("repeated mode lines append in order") {
    auto entries = parse_modules_file("x Sys\nx-cpu gcc\nx-cpu FC=gfortran\n");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].cpu_items == std::vector<std::string>{"gcc", "FC=gfortran"});
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_modules_file("d Sys\nd-apu rocm\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(parse_modules_file("d Sys\nd-apu rocm\n"),
                         doctest::Contains("unknown suffix"), ParseError);
    CHECK_THROWS_WITH_AS(parse_modules_file("x-cpu gcc\n"),
                         doctest::Contains("undeclared system"), ParseError);
    CHECK_THROWS_WITH_AS(parse_modules_file("d One\nd Two\n"),
                         doctest::Contains("duplicate system id"), ParseError);
    CHECK_THROWS_WITH_AS(parse_modules_file("d Sys\nd-cpu =nocc\n"),
                         doctest::Contains("empty key"), ParseError);
}

TEST_CASE("missing trailing newline is accepted") {
    auto entries = parse_modules_file("x Sys\nx-cpu gcc");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].cpu_items == std::vector<std::string>{"gcc"});
}

TEST_CASE("delta gpu environment resolves in file order") {
    auto entries = parse_modules_file(kDeltaText);
    auto spec = resolve_environment(entries, "d", Mode::gpu);
    CHECK(spec.modules == std::vector<std::string>{"python/3.11.6", "nvhpc/24.1", "cuda/12.3.0",
                                                   "openmpi/4.1.5+cuda", "cmake"});
    using Pair = std::pair<std::string, std::string>;
    CHECK(spec.env == std::vector<Pair>{{"CC", "nvc"},
                                        {"CXX", "nvc++"},
                                        {"FC", "nvfortran"},
                                        {"MFC_CUDA_CC", "80,86"}});
}

TEST_CASE("delta cpu environment has no env assignments") {
    auto entries = parse_modules_file(kDeltaText);
    auto spec = resolve_environment(entries, "d", Mode::cpu);
    CHECK(spec.modules == std::vector<std::string>{"python/3.11.6", "gcc/11.4.0", "openmpi"});
    CHECK(spec.env.empty());
}

TEST_CASE("entry without mode items resolves to the -all bucket only") {
    auto entries = parse_modules_file("x Sys\nx-all cmake\n");
    auto spec = resolve_environment(entries, "x", Mode::cpu);
    CHECK(spec.modules == std::vector<std::string>{"cmake"});
}

TEST_CASE("unknown system id lists the available ids") {
    auto entries = parse_modules_file(kDeltaText);
    CHECK_THROWS_WITH_AS(resolve_environment(entries, "nope", Mode::cpu),
                         doctest::Contains("available: d"), ConfigError);
}

TEST_CASE("mode tokens follow the cpu/gpu shorthand") {
    CHECK(parse_mode("c") == Mode::cpu);
    CHECK(parse_mode("cpu") == Mode::cpu);
    CHECK(parse_mode("g") == Mode::gpu);
    CHECK(parse_mode("gpu") == Mode::gpu);
    CHECK_THROWS_AS(parse_mode("apu"), UsageError);
}

TEST_CASE("later env assignment overrides an earlier one") {
    auto entries = parse_modules_file("x Sys\nx-all CC=gcc\nx-gpu CC=nvc\n");
    auto spec = resolve_environment(entries, "x", Mode::gpu);
    REQUIRE(spec.env.size() == 1);
    CHECK(spec.env[0] == std::pair<std::string, std::string>{"CC", "nvc"});
}

TEST_CASE("env values may contain '='") {
    auto entries = parse_modules_file("x Sys\nx-cpu FLAGS=-Da=b\n");
    auto spec = resolve_environment(entries, "x", Mode::cpu);
    REQUIRE(spec.env.size() == 1);
    CHECK(spec.env[0].first == "FLAGS");
    CHECK(spec.env[0].second == "-Da=b");
}

TEST_CASE("resolve_environment is pure") {
    auto entries = parse_modules_file(kDeltaText);
    CHECK(resolve_environment(entries, "d", Mode::gpu) ==
          resolve_environment(entries, "d", Mode::gpu));
}

TEST_CASE("load script has a purge line, load lines, then exports") {
    EnvironmentSpec spec;
    spec.modules = {"cmake"};
    spec.env = {{"CC", "nvc"}};
    auto text = emit_load_script(spec);
    CHECK(text == "module purge\nmodule load cmake\nexport CC=nvc\n");
}

TEST_CASE("empty spec emits the purge line only") {
    CHECK(emit_load_script(EnvironmentSpec{}) == "module purge\n");
}

TEST_CASE("delta gpu script has five loads and four exports in file order") {
    auto entries = parse_modules_file(kDeltaText);
    auto text = emit_load_script(resolve_environment(entries, "d", Mode::gpu));
    std::vector<std::string> lines = split_lines(text);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "module purge");
    CHECK(lines[1] == "module load python/3.11.6");
    CHECK(lines[5] == "module load cmake");
    CHECK(lines[6] == "export CC=nvc");
    CHECK(lines[9] == "export MFC_CUDA_CC=80,86");
}

TEST_CASE("load script emission is byte deterministic") {
    auto entries = parse_modules_file(kDeltaText);
    auto spec = resolve_environment(entries, "d", Mode::gpu);
    CHECK(emit_load_script(spec) == emit_load_script(spec));
}

TEST_CASE("parse(serialize(entries)) round-trips random entry lists") {
    std::mt19937_64 rng(20240811);
    auto token = [&rng](bool allow_assign) {
        static const char* mods[] = {"cmake", "gcc/12.1", "cuda/12.3.0", "openmpi", "rocm/6.0",
                                     "python/3.11.6", "hdf5+mpi"};
        static const char* keys[] = {"CC", "CXX", "FC", "FLAGS", "PATHLIKE"};
        static const char* vals[] = {"nvc", "gcc-12", "a=b", "x,y,z", "1"};
        if (allow_assign && rng() % 3 == 0)
            return std::string(keys[rng() % 5]) + "=" + vals[rng() % 5];
        return std::string(mods[rng() % 7]);
    };
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<SystemEntry> entries;
        int n = 1 + static_cast<int>(rng() % 4);
        for (int s = 0; s < n; ++s) {
            SystemEntry e;
            e.id = "sys" + std::to_string(s);
            e.display_name = rng() % 4 == 0 ? "" : "System " + std::to_string(s) + " name";
            auto fill = [&](std::vector<std::string>& bucket) {
                int k = static_cast<int>(rng() % 4);
                for (int i = 0; i < k; ++i) bucket.push_back(token(true));
            };
            fill(e.all_items);
            fill(e.cpu_items);
            fill(e.gpu_items);
            entries.push_back(e);
        }
        auto text = testkit::serialize_modules_file(entries);
        CHECK(parse_modules_file(text) == entries);
    }
}

TEST_CASE("token order within a bucket survives into the environment") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::string> mods;
        int k = 2 + static_cast<int>(rng() % 5);
        for (int i = 0; i < k; ++i) mods.push_back("mod" + std::to_string(i));
        SystemEntry e;
        e.id = "x";
        e.display_name = "X";
        std::size_t cut = rng() % (mods.size() + 1);
        e.all_items.assign(mods.begin(), mods.begin() + cut);
        e.gpu_items.assign(mods.begin() + cut, mods.end());
        auto spec = resolve_environment({e}, "x", Mode::gpu);
        CHECK(spec.modules == mods);
    }
}
