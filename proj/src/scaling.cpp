#include "harness/scaling.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "harness/errors.hpp"
#include "harness/strings.hpp"

namespace harness::scaling {

namespace {

/// true when (px,py,pz) beats (qx,qy,qz) under the tie-break chain.
bool better(const std::array<int, 3>& p, const std::array<int, 3>& q) {
    // pz/px compared by cross multiplication to stay in exact integers
    std::int64_t lhs = static_cast<std::int64_t>(p[2]) * q[0];
    std::int64_t rhs = static_cast<std::int64_t>(q[2]) * p[0];
    if (lhs != rhs) return lhs < rhs;
    if (p[2] - p[0] != q[2] - q[0]) return p[2] - p[0] < q[2] - q[0];
    return p[0] > q[0];
}

std::string dims_text(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::to_string(a) + " x " + std::to_string(b) + " x " + std::to_string(c);
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::array<int, 3> balanced_decomposition(std::int64_t nranks) {
    if (nranks < 1) throw ConfigError("rank count must be >= 1");
    if (nranks > std::numeric_limits<int>::max())
        throw ConfigError("rank count " + std::to_string(nranks) + " is out of range");
    std::array<int, 3> best{1, 1, static_cast<int>(nranks)};
    for (std::int64_t px = 1; px * px * px <= nranks; ++px) {
        if (nranks % px != 0) continue;
        std::int64_t rest = nranks / px;
        for (std::int64_t py = px; py * py <= rest; ++py) {
            if (rest % py != 0) continue;
            std::int64_t pz = rest / py;
            std::array<int, 3> candidate{static_cast<int>(px), static_cast<int>(py),
                                         static_cast<int>(pz)};
            if (better(candidate, best)) best = candidate;
        }
    }
    return best;
}

ScalingPlan weak_scaling_plan(const std::vector<std::int64_t>& rank_counts, std::int64_t edge) {
    if (edge < 1) throw ConfigError("per-rank cube edge must be >= 1");
    if (edge > 1000000) throw ConfigError("per-rank cube edge is out of range");
    ScalingPlan plan;
    plan.kind = PlanKind::weak;
    plan.edge = edge;
    for (std::int64_t r : rank_counts) {
        PlanRow row;
        row.nranks = r;
        row.decomposition = balanced_decomposition(r);
        for (int a = 0; a < 3; ++a) row.discretization[a] = row.decomposition[a] * edge;
        if (static_cast<double>(r) * edge * edge * edge > 9e18)
            throw ConfigError("weak plan at " + std::to_string(r) +
                              " ranks overflows the cell counter");
        row.total_cells = r * edge * edge * edge;
        row.cells_per_rank = static_cast<double>(edge) * edge * edge;
        row.exact_per_rank = true;
        plan.rows.push_back(row);
    }
    return plan;
}

ScalingPlan strong_scaling_plan(std::int64_t base_edge,
                                const std::vector<std::int64_t>& rank_counts) {
    if (base_edge < 1) throw ConfigError("base edge must be >= 1");
    if (base_edge > 1000000) throw ConfigError("base edge is out of range");
    if (rank_counts.empty()) throw ConfigError("strong scaling needs at least one rank count");
    if (!std::is_sorted(rank_counts.begin(), rank_counts.end()))
        throw ConfigError("strong scaling rank counts must be nondecreasing");
    ScalingPlan plan;
    plan.kind = PlanKind::strong;
    plan.edge = base_edge;
    std::int64_t total = base_edge * base_edge * base_edge;
    for (std::int64_t r : rank_counts) {
        if (r < 1) throw ConfigError("rank count must be >= 1");
        PlanRow row;
        row.nranks = r;
        row.decomposition = balanced_decomposition(r);
        row.discretization = {base_edge, base_edge, base_edge};
        row.total_cells = total;
        row.cells_per_rank = static_cast<double>(total) / static_cast<double>(r);
        row.exact_per_rank = total % r == 0;
        plan.rows.push_back(row);
    }
    return plan;
}

double weak_efficiency(const RankGrind& base, const RankGrind& limit) {
    if (base.ranks <= 0 || limit.ranks <= 0 || base.grind_ns <= 0.0 || limit.grind_ns <= 0.0)
        throw ConfigError("weak efficiency needs positive rank counts and grindtimes");
    return (base.grind_ns * static_cast<double>(base.ranks)) /
           (limit.grind_ns * static_cast<double>(limit.ranks));
}

double speedup(double grind_base, double grind_n) {
    if (grind_base <= 0.0 || grind_n <= 0.0)
        throw ConfigError("speedup needs positive grindtimes");
    return grind_base / grind_n;
}

std::string format_billions_3sig(double cells) {
    double billions = cells / 1e9;
    char buf[32];
    if (billions >= 100.0) std::snprintf(buf, sizeof(buf), "%.0f", billions);
    else if (billions >= 10.0) std::snprintf(buf, sizeof(buf), "%.1f", billions);
    else std::snprintf(buf, sizeof(buf), "%.2f", billions);
    return buf;
}

std::string render_plan_table(const ScalingPlan& plan) {
    const bool weak = plan.kind == PlanKind::weak;
    std::vector<std::array<std::string, 4>> cells;
    cells.push_back({"ranks", "decomposition", "discretization",
                     weak ? "cells_B" : "cells_per_rank"});
    for (const auto& row : plan.rows) {
        std::array<std::string, 4> line;
        line[0] = std::to_string(row.nranks);
        line[1] = dims_text(row.decomposition[0], row.decomposition[1], row.decomposition[2]);
        line[2] = dims_text(row.discretization[0], row.discretization[1], row.discretization[2]);
        if (weak) {
            line[3] = format_billions_3sig(static_cast<double>(row.total_cells));
        } else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.1fM", row.cells_per_rank / 1e6);
            line[3] = std::string(row.exact_per_rank ? "" : "~") + buf;
        }
        cells.push_back(line);
    }

    std::array<std::size_t, 4> width{0, 0, 0, 0};
    for (const auto& line : cells)
        for (int c = 0; c < 4; ++c) width[c] = std::max(width[c], line[c].size());

    std::string out;
    for (const auto& line : cells) {
        out += "  " + pad_left(line[0], width[0]);
        out += "  " + pad_right(line[1], width[1]);
        out += "  " + pad_right(line[2], width[2]);
        out += "  " + pad_left(line[3], width[3]);
        out += '\n';
    }
    return out;
}

std::string plan_to_yaml(const ScalingPlan& plan) {
    std::string out;
    out += std::string("kind: ") + (plan.kind == PlanKind::weak ? "weak" : "strong") + "\n";
    out += (plan.kind == PlanKind::weak ? "edge: " : "base_edge: ") + std::to_string(plan.edge) +
           "\n";
    out += "rows:\n";
    for (const auto& row : plan.rows) {
        out += "  - nranks: " + std::to_string(row.nranks) + "\n";
        out += "    px: " + std::to_string(row.decomposition[0]) + "\n";
        out += "    py: " + std::to_string(row.decomposition[1]) + "\n";
        out += "    pz: " + std::to_string(row.decomposition[2]) + "\n";
        out += "    m: " + std::to_string(row.discretization[0]) + "\n";
        out += "    n: " + std::to_string(row.discretization[1]) + "\n";
        out += "    p: " + std::to_string(row.discretization[2]) + "\n";
        out += "    total_cells: " + std::to_string(row.total_cells) + "\n";
        out += "    cells_per_rank: " + format_double(row.cells_per_rank) + "\n";
        out += std::string("    exact_per_rank: ") + (row.exact_per_rank ? "true" : "false") +
               "\n";
    }
    if (plan.rows.empty()) out += "  []\n";
    return out;
}

}  // namespace harness::scaling
