#pragma once

#include <array>
#include <barrier>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "harness/caseengine.hpp"
#include "harness/goldens.hpp"

namespace harness::workload {

struct Decomposition {
    int px = 1, py = 1, pz = 1;
    int ranks() const { return px * py * pz; }
    bool operator==(const Decomposition&) const = default;
};

/// Multi-field advection on the periodic unit cube: first-order upwind
/// finite-volume fluxes advanced with SSP-RK3 over a block-decomposed grid.
struct WorkloadCase {
    int m = 16, n = 16, p = 16;  // global cells per axis
    int num_equations = 8;
    int t_steps = 10;
    double cfl = 0.25;
    std::array<double, 3> velocity{1.0, 0.5, 0.25};
    Decomposition decomposition;
    bool rdma_mpi = false;           // recorded only
    bool case_optimization = false;  // fixed-equation-count kernel
    bool operator==(const WorkloadCase&) const = default;
};

void validate(const WorkloadCase& c);

/// Flat case keys: m n p num_equations t_steps cfl vel_x vel_y vel_z
/// px py pz rdma_mpi case_optimization. Bools also accept "T"/"F" strings.
WorkloadCase case_from_params(const cases::ParamMap& params);

/// One simulated MPI rank: an interior block plus a one-cell halo.
struct RankState {
    int cx = 0, cy = 0, cz = 0;  // coords in the decomposition
    int mx = 0, my = 0, mz = 0;  // interior cells per axis
    int gm = 0, gn = 0, gp = 0;  // global cells per axis
    Decomposition decomp;
    int num_equations = 0;
    std::array<double, 3> velocity{};
    bool specialized = false;
    std::int64_t rhs_evals = 0;

    std::vector<double> field;     // eq x (mx+2)(my+2)(mz+2), x fastest
    std::vector<double> start;     // step-start snapshot
    std::vector<double> tendency;

    std::size_t idx(int e, int i, int j, int k) const {
        return ((static_cast<std::size_t>(e) * (mz + 2) + k) * (my + 2) + j) * (mx + 2) + i;
    }
};

/// SSP-RK3 stage weights: u <- u_start + beta*((u + dt*L(u)) - u_start).
/// The increment form keeps a zero tendency an exact no-op.
inline constexpr std::array<double, 3> kRk3Beta{1.0, 0.25, 2.0 / 3.0};
inline constexpr int kRhsEvalsPerStep = 3;

/// Persistent worker threads with barrier-synchronized phases. Results are
/// bitwise independent of the worker count.
class WorkerPool {
public:
    explicit WorkerPool(unsigned workers);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned size() const { return workers_; }
    void run(const std::function<void(unsigned)>& fn);

private:
    unsigned workers_;
    std::barrier<> start_;
    std::barrier<> done_;
    const std::function<void(unsigned)>* job_ = nullptr;
    bool stop_ = false;
    std::vector<std::thread> threads_;
};

struct StepTiming {
    std::int64_t compute_ns = 0;
    std::int64_t comm_ns = 0;
};

struct RunResult {
    std::int64_t wall_ns = 0;  // time-step loop only; init and output excluded
    std::int64_t compute_ns = 0;
    std::int64_t comm_ns = 0;
    std::int64_t cells = 0;
    int equations = 0;
    int steps = 0;
    int rhs_evals_per_step = kRhsEvalsPerStep;
    std::int64_t total_rhs_evals = 0;
    goldens::GoldenFile samples;
    std::vector<double> conserved_totals;
    int ranks = 1;
    bool rdma_mpi = false;
    bool case_optimization = false;
};

/// Deterministic initial condition: equation e is a Gaussian bump
/// exp(-100*|x - c_e|^2) with c_e = ((0.3 + 0.05e) mod 1, 0.5, 0.5),
/// evaluated at cell centers of the global grid.
std::vector<RankState> init_state(const WorkloadCase& c);

/// Fills all six halo faces from the periodic neighbors.
void halo_exchange(std::vector<RankState>& states);

/// Upwind flux-divergence tendency for every equation of one rank.
void compute_rhs(RankState& state);

/// One SSP-RK3 step: three (halo exchange, rhs, stage update) rounds.
void rk3_step(std::vector<RankState>& states, double dt, WorkerPool* pool = nullptr,
              StepTiming* timing = nullptr);

/// Same stage arithmetic applied to a scalar ODE u' = rhs(u); used for
/// time-integration order studies.
double rk3_scalar_step(double u, double dt, const std::function<double(double)>& rhs);

double stable_dt(const WorkloadCase& c);

/// Global field of one equation in x-fastest order, assembled rank by rank.
std::vector<double> gather_global(const std::vector<RankState>& states, int equation);

/// Per equation, the field on the fixed 8x8x8 probe lattice (indices
/// floor(a*dim/8), x fastest) named q<e>, plus `conserved` holding the
/// per-equation global sums in a fixed order.
goldens::GoldenFile sample_outputs(const std::vector<RankState>& states);

/// workers == 0 picks min(nranks, hardware threads); workers == 1 runs the
/// ranks strictly serially.
RunResult run_case(const WorkloadCase& c, int nranks, unsigned workers = 0);

}  // namespace harness::workload
