#pragma once

#include "nlch/sav.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nlch {

enum class Preset { example1, example2, example3 };
enum class SolverKind { fast_cg, direct };

/// Everything a single time-integration run needs.
struct RunSpec {
    GridSpec grid;
    KernelSpec kernel = GaussianKernel{0.1};
    SavParams params;
    Scheme scheme = Scheme::sav2;
    SolverKind solver = SolverKind::fast_cg;
    double T = 0.0;                   ///< final time; must be an integer multiple of dt
    double cg_tol = 1e-10;
    int cg_max_iter = 5000;
    bool fft_friendly_padding = true; ///< round the convolution pad up to a cheap FFT size
    Field phi0;
    long snapshot_every = 0;          ///< 0: only the initial and final states
    std::vector<double> snapshot_times; ///< extra snapshot instants (rounded to steps)
};

struct SimCallbacks {
    /// Called at step 0, at scheduled steps, and after the final step.
    std::function<void(long step, double t, const Field& phi)> on_snapshot;
    /// Called for the initial state and after every step (mirrors `series`).
    std::function<void(const EnergySample&)> on_sample;
    /// Checked after every step; returning true ends the run early.
    std::function<bool(long step, double t, const Field& phi)> stop_when;
};

struct SimResult {
    SavState state;
    std::vector<EnergySample> series; ///< sample 0 is the initial state
    bool stopped_early = false;
};

/// Integrates the spec from t=0 to t=T (or an early stop). The second-order
/// scheme needs at least two steps. Throws ConfigError for inconsistent
/// specs, SolverError/InvariantError from the run itself.
SimResult run_simulation(const RunSpec& spec, const SimCallbacks& cb = {});

/// Ready-made run setups. Scaled defaults keep runtimes moderate;
/// paper_scale restores the original mesh and horizons. The seed only
/// affects the random preset.
RunSpec make_example_run(Preset preset, bool paper_scale = false, std::uint64_t seed = 1);

/// Number of 4-connected components of the set {phi > threshold}.
int count_positive_components(const Field& phi, double threshold = 0.0);

} // namespace nlch
