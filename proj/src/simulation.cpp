#include "nlch/simulation.hpp"
#include "nlch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace nlch {

namespace {

long step_count(double T, double dt) {
    if (!(T > 0.0)) throw ConfigError("run: final time T must be positive");
    const double ratio = T / dt;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-8 * std::max(1.0, ratio))
        throw ConfigError("run: T must be a positive integer multiple of dt");
    return n;
}

} // namespace

SimResult run_simulation(const RunSpec& spec, const SimCallbacks& cb) {
    validate(spec.params);
    const long nsteps = step_count(spec.T, spec.params.dt);
    if (spec.scheme == Scheme::sav2 && nsteps < 2)
        throw ConfigError("run: the second-order scheme needs at least two steps (T >= 2 dt)");
    if (!(spec.phi0.grid == spec.grid))
        throw ConfigError("run: initial data does not match the grid");

    const KernelTable table = sample_kernel(spec.grid, spec.kernel);
    const int pad = spec.fft_friendly_padding ? fft_friendly_size(2 * spec.grid.M + 1) : 0;
    ConvolutionPlan plan(spec.grid, table, pad);

    std::unique_ptr<StiffnessSolver> solver;
    if (spec.solver == SolverKind::fast_cg) {
        CgConfig cfg;
        cfg.tol = spec.cg_tol;
        cfg.max_iter = spec.cg_max_iter;
        solver = std::make_unique<FastCgSolver>(plan, cfg);
    } else {
        solver = std::make_unique<DirectDenseSolver>(plan);
    }

    SavIntegrator integrator(plan, spec.params, spec.scheme, *solver);

    SimResult result;
    result.state = integrator.initial_state(spec.phi0);

    std::set<long> snapshot_steps{0, nsteps};
    if (spec.snapshot_every > 0)
        for (long s = spec.snapshot_every; s < nsteps; s += spec.snapshot_every) snapshot_steps.insert(s);
    for (double ts : spec.snapshot_times) {
        const long s = std::lround(ts / spec.params.dt);
        if (s >= 0 && s <= nsteps) snapshot_steps.insert(s);
    }

    EnergySample first = compute_energies(result.state, spec.params, plan, spec.scheme);
    result.series.push_back(first);
    if (cb.on_sample) cb.on_sample(first);
    if (cb.on_snapshot) cb.on_snapshot(0, 0.0, result.state.phi);

    for (long n = 1; n <= nsteps; ++n) {
        EnergySample s = integrator.step(result.state);
        result.series.push_back(s);
        if (cb.on_sample) cb.on_sample(s);

        bool stop = false;
        if (cb.stop_when && cb.stop_when(n, result.state.t, result.state.phi)) {
            result.stopped_early = true;
            stop = true;
        }
        if (cb.on_snapshot && (snapshot_steps.count(n) || stop))
            cb.on_snapshot(n, result.state.t, result.state.phi);
        if (stop) break;
    }
    return result;
}

RunSpec make_example_run(Preset preset, bool paper_scale, std::uint64_t seed) {
    RunSpec spec;
    switch (preset) {
    case Preset::example1: {
        spec.grid = make_grid(1.0, paper_scale ? 200 : 32);
        const double eps = std::sqrt(0.1);
        spec.params.epsilon = eps;
        spec.params.mobility = 1.0;
        spec.params.C0 = 1.0;
        spec.kernel = GaussianKernel{eps};
        spec.T = 0.05;
        spec.params.dt = spec.T / 256.0;
        spec.phi0 = init_smooth_sine(spec.grid);
        break;
    }
    case Preset::example2: {
        spec.grid = make_grid(1.0, paper_scale ? 200 : 128);
        spec.params.epsilon = 0.02;
        spec.params.mobility = 1.0;
        spec.params.C0 = 1.0;
        spec.kernel = GaussianKernel{0.02};
        spec.params.dt = 1e-3;
        spec.T = paper_scale ? 10.0 : 15.0;
        spec.snapshot_times = {0.05, 0.1, 1.0, 5.0, 10.0};
        spec.phi0 = init_two_bubbles(spec.grid, 0.36, 0.4, spec.params.epsilon);
        break;
    }
    case Preset::example3: {
        spec.grid = make_grid(1.0, paper_scale ? 200 : 64);
        spec.params.epsilon = 0.02;
        spec.params.mobility = 1.0;
        spec.params.C0 = 1.0;
        spec.kernel = GaussianKernel{0.05};
        spec.params.dt = 1e-3;
        spec.T = 10.0;
        spec.snapshot_times = {0.1, 0.5, 1.0, 2.0, 10.0};
        spec.phi0 = init_random_uniform(spec.grid, 0.1, seed);
        break;
    }
    }
    return spec;
}

int count_positive_components(const Field& phi, double threshold) {
    const int n = phi.grid.M + 1;
    std::vector<char> visited(static_cast<std::size_t>(n) * n, 0);
    std::vector<int> stack;
    int components = 0;
    for (int start = 0; start < n * n; ++start) {
        if (visited[start] || !(phi.values[start] > threshold)) continue;
        ++components;
        stack.push_back(start);
        visited[start] = 1;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            const int i = k % n, j = k / n;
            const int neighbors[4] = {i > 0 ? k - 1 : -1, i < n - 1 ? k + 1 : -1,
                                      j > 0 ? k - n : -1, j < n - 1 ? k + n : -1};
            for (int nb : neighbors) {
                if (nb >= 0 && !visited[nb] && phi.values[nb] > threshold) {
                    visited[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }
    }
    return components;
}

} // namespace nlch
