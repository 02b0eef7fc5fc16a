#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace harness::scaling {

/// Factor triple (px, py, pz) with px <= py <= pz and px*py*pz == nranks,
/// chosen to minimize pz/px; ties broken by smaller pz-px, then larger px.
std::array<int, 3> balanced_decomposition(std::int64_t nranks);

enum class PlanKind { weak, strong };

struct PlanRow {
    std::int64_t nranks = 0;
    std::array<int, 3> decomposition{1, 1, 1};
    std::array<std::int64_t, 3> discretization{0, 0, 0};
    std::int64_t total_cells = 0;
    double cells_per_rank = 0.0;
    bool exact_per_rank = true;  // strong plans: nranks divides total_cells
};

struct ScalingPlan {
    PlanKind kind = PlanKind::weak;
    std::int64_t edge = 0;  // per-rank cube edge (weak) or base edge (strong)
    std::vector<PlanRow> rows;
};

/// Weak scaling: every rank holds an edge^3 block; the global grid is the
/// decomposition scaled by the edge.
ScalingPlan weak_scaling_plan(const std::vector<std::int64_t>& rank_counts,
                              std::int64_t edge = 200);

/// Strong scaling: fixed base_edge^3 grid split over growing rank counts.
/// Non-divisible cells-per-rank is reported, not an error.
ScalingPlan strong_scaling_plan(std::int64_t base_edge = 634,
                                const std::vector<std::int64_t>& rank_counts = {8, 16, 32, 64,
                                                                                128, 256});

struct RankGrind {
    std::int64_t ranks = 0;
    double grind_ns = 0.0;
};

struct EfficiencyRecord {
    RankGrind base;
    RankGrind limit;
    double efficiency = 0.0;
};

/// Ideal weak scaling keeps grindtime * ranks constant, so
/// efficiency = (grind_base * ranks_base) / (grind_limit * ranks_limit).
double weak_efficiency(const RankGrind& base, const RankGrind& limit);

/// grind_base / grind_n; equals the rank ratio under ideal strong scaling.
double speedup(double grind_base, double grind_n);

/// Cell totals in billions at 3 significant figures (1.02, 24.6, 197, ...).
std::string format_billions_3sig(double cells);

std::string render_plan_table(const ScalingPlan& plan);
std::string plan_to_yaml(const ScalingPlan& plan);

}  // namespace harness::scaling
