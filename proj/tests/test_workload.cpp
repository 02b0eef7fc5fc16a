#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "harness/errors.hpp"
#include "harness/goldens.hpp"
#include "harness/workload.hpp"

using namespace harness;
using namespace harness::cases;
using namespace harness::workload;

namespace {

WorkloadCase small_case(int edge = 16, int equations = 4, int steps = 5) {
    WorkloadCase c;
    c.m = c.n = c.p = edge;
    c.num_equations = equations;
    c.t_steps = steps;
    c.cfl = 0.25;
    return c;
}

WorkloadCase with_decomposition(WorkloadCase c, int px, int py, int pz) {
    c.decomposition = {px, py, pz};
    return c;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST_CASE("case_from_params fills defaults and coerces T/F-style bools") {
    auto c = case_from_params({{"m", val(8)}, {"n", val(8)}, {"p", val(8)},
                               {"rdma_mpi", val("T")}, {"case_optimization", val("F")}});
    CHECK(c.num_equations == 8);
    CHECK(c.rdma_mpi);
    CHECK_FALSE(c.case_optimization);
    CHECK(c.decomposition == Decomposition{1, 1, 1});
}

TEST_CASE("case_from_params rejects unknown keys and bad types") {
    CHECK_THROWS_WITH_AS(case_from_params({{"mm", val(8)}}), doctest::Contains("mm"),
                         ConfigError);
    CHECK_THROWS_AS(case_from_params({{"m", val(1.5)}}), ConfigError);
    CHECK_THROWS_AS(case_from_params({{"rdma_mpi", val("yes")}}), ConfigError);
}

TEST_CASE("decomposition must divide the grid") {
    auto c = with_decomposition(small_case(10), 3, 1, 1);
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("does not divide"), ConfigError);
    CHECK_THROWS_AS(init_state(c), ConfigError);
}

TEST_CASE("cfl outside (0,1) is rejected") {
    auto c = small_case();
    c.cfl = 1.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.cfl = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("each rank holds the expected interior block") {
    auto states = init_state(with_decomposition(small_case(16), 2, 2, 2));
    REQUIRE(states.size() == 8);
    for (const auto& s : states) {
        CHECK(s.mx == 8);
        CHECK(s.my == 8);
        CHECK(s.mz == 8);
    }
}

TEST_CASE("single-equation case carries exactly one field") {
    auto states = init_state(small_case(8, 1, 1));
    REQUIRE(states.size() == 1);
    CHECK(states[0].field.size() == 10u * 10u * 10u);
}

TEST_CASE("initialization is identical across decompositions") {
    auto c1 = small_case(16, 3);
    auto c8 = with_decomposition(c1, 2, 2, 2);
    auto s1 = init_state(c1);
    auto s8 = init_state(c8);
    for (int e = 0; e < 3; ++e) {
        auto a = gather_global(s1, e);
        auto b = gather_global(s8, e);
        CHECK(a == b);
    }
}

TEST_CASE("single-rank halos wrap to the opposite faces") {
    auto states = init_state(small_case(8, 1, 0));
    const auto& s = states[0];
    for (int k = 1; k <= s.mz; ++k) {
        for (int j = 1; j <= s.my; ++j) {
            CHECK(s.field[s.idx(0, 0, j, k)] == s.field[s.idx(0, s.mx, j, k)]);
            CHECK(s.field[s.idx(0, s.mx + 1, j, k)] == s.field[s.idx(0, 1, j, k)]);
        }
    }
}

TEST_CASE("multi-rank halos equal the wrapped global field") {
    auto c = with_decomposition(small_case(8, 2, 0), 2, 2, 2);
    auto states = init_state(c);
    auto wrap = [](int v, int n) { return (v % n + n) % n; };
    for (int e = 0; e < c.num_equations; ++e) {
        auto global = gather_global(states, e);
        auto at = [&](int gi, int gj, int gk) {
            return global[(static_cast<std::size_t>(wrap(gk, c.p)) * c.n + wrap(gj, c.n)) * c.m +
                          wrap(gi, c.m)];
        };
        for (const auto& s : states) {
            for (int k = 1; k <= s.mz; ++k) {
                for (int j = 1; j <= s.my; ++j) {
                    int gj = s.cy * s.my + (j - 1), gk = s.cz * s.mz + (k - 1);
                    CHECK(s.field[s.idx(e, 0, j, k)] == at(s.cx * s.mx - 1, gj, gk));
                    CHECK(s.field[s.idx(e, s.mx + 1, j, k)] ==
                          at(s.cx * s.mx + s.mx, gj, gk));
                }
            }
        }
    }
}

TEST_CASE("constant fields have constant halos and zero tendency") {
    auto c = with_decomposition(small_case(8, 1, 0), 1, 1, 2);
    auto states = init_state(c);
    for (auto& s : states) std::fill(s.field.begin(), s.field.end(), 2.5);
    halo_exchange(states);
    for (auto& s : states) {
        compute_rhs(s);
        for (int k = 1; k <= s.mz; ++k)
            for (int j = 1; j <= s.my; ++j)
                for (int i = 1; i <= s.mx; ++i) {
                    CHECK(s.field[s.idx(0, 0, j, k)] == 2.5);
                    CHECK(s.tendency[s.idx(0, i, j, k)] == 0.0);
                }
    }
}

TEST_CASE("zero velocity makes the tendency identically zero") {
    auto c = small_case(8, 2, 0);
    c.velocity = {0.0, 0.0, 0.0};
    auto states = init_state(c);
    for (auto& s : states) {
        compute_rhs(s);
        for (double t : s.tendency) CHECK(t == 0.0);
    }
}

TEST_CASE("the upwind tendency conserves the global sum") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    auto c = small_case(12, 1, 0);
    c.velocity = {1.0, -0.5, 0.25};
    auto states = init_state(c);
    for (auto& s : states)
        for (int k = 1; k <= s.mz; ++k)
            for (int j = 1; j <= s.my; ++j)
                for (int i = 1; i <= s.mx; ++i) s.field[s.idx(0, i, j, k)] = dist(rng);
    halo_exchange(states);
    double field_sum = 0.0, tend_sum = 0.0;
    for (auto& s : states) {
        compute_rhs(s);
        for (int k = 1; k <= s.mz; ++k)
            for (int j = 1; j <= s.my; ++j)
                for (int i = 1; i <= s.mx; ++i) {
                    field_sum += s.field[s.idx(0, i, j, k)];
                    tend_sum += s.tendency[s.idx(0, i, j, k)];
                }
    }
    CHECK(std::abs(tend_sum) <= 1e-12 * std::abs(field_sum));
}

TEST_CASE("zero velocity leaves the field bitwise unchanged") {
    auto c = small_case(8, 2, 5);
    c.velocity = {0.0, 0.0, 0.0};
    auto before = init_state(c);
    auto result = run_case(c, 1, 1);
    auto initial = sample_outputs(before);
    CHECK(goldens::serialize_golden(result.samples) == goldens::serialize_golden(initial));
}

TEST_CASE("rhs evaluations count three per step") {
    auto c = small_case(8, 1, 10);
    auto states = init_state(c);
    double dt = stable_dt(c);
    for (int step = 0; step < c.t_steps; ++step) rk3_step(states, dt);
    CHECK(states[0].rhs_evals == 30);
}

TEST_CASE("scalar rk3 converges at third order on u' = -u") {
    const double lambda = -1.0;
    auto rhs = [lambda](double u) { return lambda * u; };
    const double t_end = 1.0;
    std::vector<double> errors;
    for (int halvings = 0; halvings < 4; ++halvings) {
        int steps = 10 << halvings;
        double dt = t_end / steps;
        double u = 1.0;
        for (int s = 0; s < steps; ++s) u = rk3_scalar_step(u, dt, rhs);
        errors.push_back(std::abs(u - std::exp(lambda * t_end)));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        double order = std::log2(errors[i] / errors[i + 1]);
        CHECK(order == doctest::Approx(3.0).epsilon(0.04));
    }
}

TEST_CASE("samples are invariant across decompositions") {
    auto base = small_case(16, 2, 5);
    auto r1 = run_case(base, 1, 1);
    auto r8 = run_case(with_decomposition(base, 2, 2, 2), 8, 1);
    REQUIRE(r1.samples.variables.size() == r8.samples.variables.size());
    for (std::size_t v = 0; v < r1.samples.variables.size(); ++v) {
        CHECK(r1.samples.variables[v].first == r8.samples.variables[v].first);
        CHECK(max_abs_diff(r1.samples.variables[v].second, r8.samples.variables[v].second) <=
              1e-12);
    }
}

TEST_CASE("probe samples are bitwise invariant across decompositions") {
    auto base = small_case(16, 2, 5);
    auto r1 = run_case(base, 1, 1);
    auto r2 = run_case(with_decomposition(base, 1, 1, 2), 2, 1);
    CHECK(goldens::serialize_golden(r1.samples) == goldens::serialize_golden(r2.samples));
}

TEST_CASE("worker count does not change the results") {
    auto c = with_decomposition(small_case(16, 4, 5), 2, 2, 2);
    auto serial = run_case(c, 8, 1);
    auto threaded = run_case(c, 8, 4);
    CHECK(goldens::serialize_golden(serial.samples) ==
          goldens::serialize_golden(threaded.samples));
}

TEST_CASE("two identical runs are bitwise identical") {
    auto c = small_case(12, 3, 5);
    auto a = run_case(c, 1, 0);
    auto b = run_case(c, 1, 0);
    CHECK(goldens::serialize_golden(a.samples) == goldens::serialize_golden(b.samples));
}

TEST_CASE("a zero-step run samples the initial condition") {
    auto c = small_case(8, 2, 0);
    auto result = run_case(c, 1, 1);
    auto initial = sample_outputs(init_state(c));
    CHECK(result.samples == initial);
    CHECK(result.wall_ns >= 0);
    CHECK(result.total_rhs_evals == 0);
}

TEST_CASE("cell count follows the global grid regardless of decomposition") {
    auto base = small_case(16, 1, 0);
    CHECK(run_case(base, 1, 1).cells == 16 * 16 * 16);
    CHECK(run_case(with_decomposition(base, 2, 2, 2), 8, 1).cells == 16 * 16 * 16);
}

TEST_CASE("nranks must match the decomposition") {
    CHECK_THROWS_AS(run_case(small_case(), 2, 1), ConfigError);
}

TEST_CASE("an 8-cube grid probes every cell") {
    auto c = small_case(8, 1, 0);
    auto states = init_state(c);
    auto samples = sample_outputs(states);
    const auto* q0 = samples.find("q0");
    REQUIRE(q0 != nullptr);
    CHECK(*q0 == gather_global(states, 0));
    const auto* conserved = samples.find("conserved");
    REQUIRE(conserved != nullptr);
    CHECK(conserved->size() == 1);
}

TEST_CASE("conserved has one entry per equation") {
    auto samples = sample_outputs(init_state(small_case(8, 5, 0)));
    CHECK(samples.find("conserved")->size() == 5);
}

TEST_CASE("global sums drift below 1e-12 relative over 100 steps") {
    auto c = small_case(16, 2, 100);
    auto initial = sample_outputs(init_state(c));
    auto result = run_case(c, 1, 0);
    const auto& before = *initial.find("conserved");
    const auto& after = result.conserved_totals;
    for (std::size_t e = 0; e < after.size(); ++e)
        CHECK(std::abs(after[e] - before[e]) <= 1e-12 * std::abs(before[e]));
}

TEST_CASE("upwind advection does not create new extrema") {
    auto c = small_case(16, 2, 20);
    auto states = init_state(c);
    double lo = 1e300, hi = -1e300;
    for (int e = 0; e < c.num_equations; ++e) {
        for (double v : gather_global(states, e)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    auto result = run_case(c, 1, 0);
    for (int e = 0; e < c.num_equations; ++e) {
        const auto* q = result.samples.find("q" + std::to_string(e));
        REQUIRE(q != nullptr);
        for (double v : *q) {
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
    }
}

TEST_CASE("the specialized eq8 kernel is bit-identical to the generic one") {
    auto generic = small_case(12, 8, 5);
    auto special = generic;
    special.case_optimization = true;
    auto a = run_case(generic, 1, 1);
    auto b = run_case(special, 1, 1);
    CHECK(goldens::serialize_golden(a.samples) == goldens::serialize_golden(b.samples));
    CHECK(b.case_optimization);
}

TEST_CASE("wall time bounds the compute time") {
    auto result = run_case(small_case(16, 4, 10), 1, 0);
    CHECK(result.wall_ns >= result.compute_ns);
    CHECK(result.compute_ns > 0);
    CHECK(result.rhs_evals_per_step == 3);
    CHECK(result.total_rhs_evals == 30);
}

TEST_CASE("stable_dt guards against zero velocity") {
    auto c = small_case();
    c.velocity = {0.0, 0.0, 0.0};
    CHECK(std::isfinite(stable_dt(c)));
    CHECK(stable_dt(c) > 0.0);
}
