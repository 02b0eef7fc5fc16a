#include "harness/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "harness/errors.hpp"

namespace harness::workload {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

int rank_index(const Decomposition& d, int cx, int cy, int cz) {
    return (cz * d.py + cy) * d.px + cx;
}

int wrap(int v, int n) { return (v % n + n) % n; }

/// Upwind face fluxes; every cell evaluates both of its faces per axis from
/// the same inputs, so shared faces get bitwise-equal values on both sides.
template <int kEq>
void rhs_kernel(RankState& s) {
    const int ne = kEq > 0 ? kEq : s.num_equations;
    const double vx = s.velocity[0], vy = s.velocity[1], vz = s.velocity[2];
    const double inv_dx = static_cast<double>(s.gm);
    const double inv_dy = static_cast<double>(s.gn);
    const double inv_dz = static_cast<double>(s.gp);
    const double* f = s.field.data();
    double* t = s.tendency.data();
    for (int e = 0; e < ne; ++e) {
        for (int k = 1; k <= s.mz; ++k) {
            for (int j = 1; j <= s.my; ++j) {
                for (int i = 1; i <= s.mx; ++i) {
                    const std::size_t c = s.idx(e, i, j, k);
                    const double q = f[c];
                    const double qxm = f[s.idx(e, i - 1, j, k)];
                    const double qxp = f[s.idx(e, i + 1, j, k)];
                    const double qym = f[s.idx(e, i, j - 1, k)];
                    const double qyp = f[s.idx(e, i, j + 1, k)];
                    const double qzm = f[s.idx(e, i, j, k - 1)];
                    const double qzp = f[s.idx(e, i, j, k + 1)];
                    const double fxr = vx > 0.0 ? vx * q : vx * qxp;
                    const double fxl = vx > 0.0 ? vx * qxm : vx * q;
                    const double fyr = vy > 0.0 ? vy * q : vy * qyp;
                    const double fyl = vy > 0.0 ? vy * qym : vy * q;
                    const double fzr = vz > 0.0 ? vz * q : vz * qzp;
                    const double fzl = vz > 0.0 ? vz * qzm : vz * q;
                    t[c] = -((fxr - fxl) * inv_dx) - ((fyr - fyl) * inv_dy) -
                           ((fzr - fzl) * inv_dz);
                }
            }
        }
    }
    s.rhs_evals += 1;
}

void apply_stage(RankState& s, double beta, double dt) {
    double* u = s.field.data();
    const double* u0 = s.start.data();
    const double* t = s.tendency.data();
    const int ne = s.num_equations;
    for (int e = 0; e < ne; ++e) {
        for (int k = 1; k <= s.mz; ++k) {
            for (int j = 1; j <= s.my; ++j) {
                for (int i = 1; i <= s.mx; ++i) {
                    const std::size_t c = s.idx(e, i, j, k);
                    u[c] = u0[c] + beta * ((u[c] + dt * t[c]) - u0[c]);
                }
            }
        }
    }
}

void run_over_ranks(std::vector<RankState>& states, WorkerPool* pool,
                    const std::function<void(RankState&)>& fn) {
    if (pool != nullptr && pool->size() > 1) {
        const unsigned workers = pool->size();
        pool->run([&](unsigned w) {
            for (std::size_t r = w; r < states.size(); r += workers) fn(states[r]);
        });
    } else {
        for (auto& s : states) fn(s);
    }
}

}  // namespace

void validate(const WorkloadCase& c) {
    if (c.m <= 0 || c.n <= 0 || c.p <= 0)
        throw ConfigError("case: grid dimensions m, n, p must be positive");
    if (c.num_equations <= 0) throw ConfigError("case: num_equations must be positive");
    if (c.t_steps < 0) throw ConfigError("case: t_steps must be >= 0");
    if (!(c.cfl > 0.0 && c.cfl < 1.0)) throw ConfigError("case: cfl must be in (0, 1)");
    const auto& d = c.decomposition;
    if (d.px <= 0 || d.py <= 0 || d.pz <= 0)
        throw ConfigError("case: decomposition factors must be positive");
    if (c.m % d.px != 0 || c.n % d.py != 0 || c.p % d.pz != 0)
        throw ConfigError("case: decomposition " + std::to_string(d.px) + "x" +
                          std::to_string(d.py) + "x" + std::to_string(d.pz) +
                          " does not divide grid " + std::to_string(c.m) + "x" +
                          std::to_string(c.n) + "x" + std::to_string(c.p));
}

WorkloadCase case_from_params(const cases::ParamMap& params) {
    WorkloadCase c;
    auto as_int = [](const std::string& key, const cases::ParamValue& v) -> int {
        if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<int>(*i);
        throw ConfigError("case key '" + key + "': expected an integer");
    };
    auto as_double = [](const std::string& key, const cases::ParamValue& v) -> double {
        if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        throw ConfigError("case key '" + key + "': expected a number");
    };
    auto as_bool = [](const std::string& key, const cases::ParamValue& v) -> bool {
        if (const auto* b = std::get_if<bool>(&v)) return *b;
        if (const auto* s = std::get_if<std::string>(&v)) {
            if (*s == "T" || *s == "true") return true;
            if (*s == "F" || *s == "false") return false;
        }
        throw ConfigError("case key '" + key + "': expected true/false or \"T\"/\"F\"");
    };

    for (const auto& [key, value] : params) {
        if (key == "m") c.m = as_int(key, value);
        else if (key == "n") c.n = as_int(key, value);
        else if (key == "p") c.p = as_int(key, value);
        else if (key == "num_equations") c.num_equations = as_int(key, value);
        else if (key == "t_steps") c.t_steps = as_int(key, value);
        else if (key == "cfl") c.cfl = as_double(key, value);
        else if (key == "vel_x") c.velocity[0] = as_double(key, value);
        else if (key == "vel_y") c.velocity[1] = as_double(key, value);
        else if (key == "vel_z") c.velocity[2] = as_double(key, value);
        else if (key == "px") c.decomposition.px = as_int(key, value);
        else if (key == "py") c.decomposition.py = as_int(key, value);
        else if (key == "pz") c.decomposition.pz = as_int(key, value);
        else if (key == "rdma_mpi") c.rdma_mpi = as_bool(key, value);
        else if (key == "case_optimization") c.case_optimization = as_bool(key, value);
        else throw ConfigError("unknown case key '" + key + "'");
    }
    validate(c);
    return c;
}

WorkerPool::WorkerPool(unsigned workers)
    : workers_(workers), start_(workers + 1), done_(workers + 1) {
    threads_.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads_.emplace_back([this, w] {
            for (;;) {
                start_.arrive_and_wait();
                if (stop_) return;
                (*job_)(w);
                done_.arrive_and_wait();
            }
        });
    }
}

WorkerPool::~WorkerPool() {
    stop_ = true;
    start_.arrive_and_wait();
    for (auto& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(unsigned)>& fn) {
    job_ = &fn;
    start_.arrive_and_wait();
    done_.arrive_and_wait();
    job_ = nullptr;
}

std::vector<RankState> init_state(const WorkloadCase& c) {
    validate(c);
    const auto& d = c.decomposition;
    const int mx = c.m / d.px, my = c.n / d.py, mz = c.p / d.pz;

    std::vector<RankState> states(static_cast<std::size_t>(d.ranks()));
    for (int cz = 0; cz < d.pz; ++cz) {
        for (int cy = 0; cy < d.py; ++cy) {
            for (int cx = 0; cx < d.px; ++cx) {
                RankState& s = states[static_cast<std::size_t>(rank_index(d, cx, cy, cz))];
                s.cx = cx; s.cy = cy; s.cz = cz;
                s.mx = mx; s.my = my; s.mz = mz;
                s.gm = c.m; s.gn = c.n; s.gp = c.p;
                s.decomp = d;
                s.num_equations = c.num_equations;
                s.velocity = c.velocity;
                s.specialized = c.case_optimization && c.num_equations == 8;
                const std::size_t size = static_cast<std::size_t>(c.num_equations) *
                                         (mx + 2) * (my + 2) * (mz + 2);
                s.field.assign(size, 0.0);
                s.start.assign(size, 0.0);
                s.tendency.assign(size, 0.0);

                for (int e = 0; e < c.num_equations; ++e) {
                    const double ce_x = std::fmod(0.3 + 0.05 * e, 1.0);
                    const double ce_y = 0.5, ce_z = 0.5;
                    for (int k = 1; k <= mz; ++k) {
                        const double z = (cz * mz + (k - 1) + 0.5) / c.p;
                        for (int j = 1; j <= my; ++j) {
                            const double y = (cy * my + (j - 1) + 0.5) / c.n;
                            for (int i = 1; i <= mx; ++i) {
                                const double x = (cx * mx + (i - 1) + 0.5) / c.m;
                                const double dx = x - ce_x, dy = y - ce_y, dz = z - ce_z;
                                s.field[s.idx(e, i, j, k)] =
                                    std::exp(-100.0 * (dx * dx + dy * dy + dz * dz));
                            }
                        }
                    }
                }
            }
        }
    }
    halo_exchange(states);
    return states;
}

void halo_exchange(std::vector<RankState>& states) {
    for (RankState& s : states) {
        const Decomposition& d = s.decomp;
        const RankState& xm = states[rank_index(d, wrap(s.cx - 1, d.px), s.cy, s.cz)];
        const RankState& xp = states[rank_index(d, wrap(s.cx + 1, d.px), s.cy, s.cz)];
        const RankState& ym = states[rank_index(d, s.cx, wrap(s.cy - 1, d.py), s.cz)];
        const RankState& yp = states[rank_index(d, s.cx, wrap(s.cy + 1, d.py), s.cz)];
        const RankState& zm = states[rank_index(d, s.cx, s.cy, wrap(s.cz - 1, d.pz))];
        const RankState& zp = states[rank_index(d, s.cx, s.cy, wrap(s.cz + 1, d.pz))];
        for (int e = 0; e < s.num_equations; ++e) {
            for (int k = 1; k <= s.mz; ++k) {
                for (int j = 1; j <= s.my; ++j) {
                    s.field[s.idx(e, 0, j, k)] = xm.field[xm.idx(e, xm.mx, j, k)];
                    s.field[s.idx(e, s.mx + 1, j, k)] = xp.field[xp.idx(e, 1, j, k)];
                }
            }
            for (int k = 1; k <= s.mz; ++k) {
                for (int i = 1; i <= s.mx; ++i) {
                    s.field[s.idx(e, i, 0, k)] = ym.field[ym.idx(e, i, ym.my, k)];
                    s.field[s.idx(e, i, s.my + 1, k)] = yp.field[yp.idx(e, i, 1, k)];
                }
            }
            for (int j = 1; j <= s.my; ++j) {
                for (int i = 1; i <= s.mx; ++i) {
                    s.field[s.idx(e, i, j, 0)] = zm.field[zm.idx(e, i, j, zm.mz)];
                    s.field[s.idx(e, i, j, s.mz + 1)] = zp.field[zp.idx(e, i, j, 1)];
                }
            }
        }
    }
}

void compute_rhs(RankState& state) {
    if (state.specialized) rhs_kernel<8>(state);
    else rhs_kernel<0>(state);
}

void rk3_step(std::vector<RankState>& states, double dt, WorkerPool* pool,
              StepTiming* timing) {
    for (RankState& s : states) s.start = s.field;
    for (double beta : kRk3Beta) {
        auto t0 = Clock::now();
        halo_exchange(states);
        auto t1 = Clock::now();
        run_over_ranks(states, pool, [beta, dt](RankState& s) {
            compute_rhs(s);
            apply_stage(s, beta, dt);
        });
        auto t2 = Clock::now();
        if (timing != nullptr) {
            timing->comm_ns += ns_between(t0, t1);
            timing->compute_ns += ns_between(t1, t2);
        }
    }
}

double rk3_scalar_step(double u, double dt, const std::function<double(double)>& rhs) {
    const double u0 = u;
    for (double beta : kRk3Beta) u = u0 + beta * ((u + dt * rhs(u)) - u0);
    return u;
}

double stable_dt(const WorkloadCase& c) {
    const double dx = 1.0 / c.m, dy = 1.0 / c.n, dz = 1.0 / c.p;
    const double vmax = std::max({std::abs(c.velocity[0]), std::abs(c.velocity[1]),
                                  std::abs(c.velocity[2]), 1e-30});
    return c.cfl * std::min({dx, dy, dz}) / vmax;
}

std::vector<double> gather_global(const std::vector<RankState>& states, int equation) {
    const RankState& first = states.front();
    const std::int64_t gm = first.gm, gn = first.gn, gp = first.gp;
    std::vector<double> out(static_cast<std::size_t>(gm * gn * gp));
    for (const RankState& s : states) {
        for (int k = 1; k <= s.mz; ++k) {
            const std::int64_t gk = static_cast<std::int64_t>(s.cz) * s.mz + (k - 1);
            for (int j = 1; j <= s.my; ++j) {
                const std::int64_t gj = static_cast<std::int64_t>(s.cy) * s.my + (j - 1);
                const std::int64_t base = (gk * gn + gj) * gm +
                                          static_cast<std::int64_t>(s.cx) * s.mx;
                for (int i = 1; i <= s.mx; ++i)
                    out[static_cast<std::size_t>(base + (i - 1))] =
                        s.field[s.idx(equation, i, j, k)];
            }
        }
    }
    return out;
}

goldens::GoldenFile sample_outputs(const std::vector<RankState>& states) {
    const RankState& first = states.front();
    const std::int64_t gm = first.gm, gn = first.gn, gp = first.gp;
    goldens::GoldenFile g;
    std::vector<double> conserved;
    conserved.reserve(static_cast<std::size_t>(first.num_equations));
    for (int e = 0; e < first.num_equations; ++e) {
        std::vector<double> global = gather_global(states, e);
        std::vector<double> probes;
        probes.reserve(512);
        for (int ka = 0; ka < 8; ++ka) {
            const std::int64_t k = ka * gp / 8;
            for (int ja = 0; ja < 8; ++ja) {
                const std::int64_t j = ja * gn / 8;
                for (int ia = 0; ia < 8; ++ia) {
                    const std::int64_t i = ia * gm / 8;
                    probes.push_back(global[static_cast<std::size_t>((k * gn + j) * gm + i)]);
                }
            }
        }
        g.variables.emplace_back("q" + std::to_string(e), std::move(probes));

        // fixed global summation order keeps the total decomposition-invariant
        double sum = 0.0;
        for (double v : global) sum += v;
        conserved.push_back(sum);
    }
    g.variables.emplace_back("conserved", std::move(conserved));
    return g;
}

RunResult run_case(const WorkloadCase& c, int nranks, unsigned workers) {
    validate(c);
    if (nranks != c.decomposition.ranks())
        throw ConfigError("nranks (" + std::to_string(nranks) +
                          ") does not match the case decomposition (" +
                          std::to_string(c.decomposition.ranks()) + " ranks)");

    std::vector<RankState> states = init_state(c);
    const double dt = stable_dt(c);

    unsigned effective = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : workers;
    effective = std::min<unsigned>(effective, static_cast<unsigned>(nranks));
    std::unique_ptr<WorkerPool> pool;
    if (effective > 1) pool = std::make_unique<WorkerPool>(effective);

    StepTiming timing;
    const auto t0 = Clock::now();
    for (int step = 0; step < c.t_steps; ++step)
        rk3_step(states, dt, pool.get(), &timing);
    const auto t1 = Clock::now();

    RunResult r;
    r.wall_ns = ns_between(t0, t1);
    r.compute_ns = timing.compute_ns;
    r.comm_ns = timing.comm_ns;
    r.cells = static_cast<std::int64_t>(c.m) * c.n * c.p;
    r.equations = c.num_equations;
    r.steps = c.t_steps;
    r.rhs_evals_per_step = kRhsEvalsPerStep;
    r.total_rhs_evals = static_cast<std::int64_t>(kRhsEvalsPerStep) * c.t_steps;
    for (const RankState& s : states) {
        if (s.rhs_evals != r.total_rhs_evals)
            throw std::runtime_error("rhs evaluation counter out of step with the run");
    }
    r.samples = sample_outputs(states);
    r.conserved_totals = *r.samples.find("conserved");
    r.ranks = nranks;
    r.rdma_mpi = c.rdma_mpi;
    r.case_optimization = c.case_optimization;
    return r;
}

}  // namespace harness::workload
