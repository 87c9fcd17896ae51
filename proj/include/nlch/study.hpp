#pragma once

#include "nlch/simulation.hpp"

#include <optional>
#include <string>

namespace nlch {

/// One resolution of a convergence ladder.
struct LadderRow {
    double param = 0.0;               ///< dt or h
    double error = 0.0;               ///< weighted L2 distance to the reference
    std::optional<double> rate;       ///< log2(e_prev / e_this); empty for the first row or degenerate data
    bool degenerate = false;          ///< error at the roundoff floor; rate meaningless
    double seconds = 0.0;
    long cg_iterations = 0;
    Field final_phi;                  ///< solution at T (used for cross-solver checks)
};

struct RateTable {
    std::string param_name;           ///< "dt" or "h"
    Scheme scheme = Scheme::sav1;
    std::vector<LadderRow> rows;

    std::string to_csv() const;       ///< columns: <param_name>,error,rate,seconds
    /// Mean of the last `pairs` defined rates; throws if fewer exist.
    double mean_rate_last(int pairs) const;
};

/// Fixed grid, halving time steps, self-convergence against a small-dt
/// reference computed with the same scheme and grid.
struct TemporalStudy {
    Preset preset = Preset::example1;
    Scheme scheme = Scheme::sav1;
    SolverKind solver = SolverKind::fast_cg;
    int M = 32;
    double T = 0.05;
    std::vector<double> dts;          ///< descending
    double dt_ref = 0.0;
    double cg_tol = 1e-12;
    std::uint64_t seed = 1;
    std::optional<Field> phi0_override; ///< test hook; must match the grid

    /// The standard ladder: dt = T*2^-4 .. T*2^-8, reference T*2^-12 on the
    /// scaled grid; paper_scale restores the original mesh and the 2^-14
    /// reference.
    static TemporalStudy standard(Scheme scheme, bool paper_scale = false);
};

RateTable run_temporal_study(const TemporalStudy& spec);

/// Fixed dt, nested halved meshes, errors against a fine-grid reference
/// restricted by exact node sampling. Grids must nest: every ladder M divides
/// the reference M with a power-of-two quotient.
struct SpatialStudy {
    Preset preset = Preset::example1;
    Scheme scheme = Scheme::sav1;
    SolverKind solver = SolverKind::fast_cg;
    std::vector<int> Ms;              ///< ascending (coarse to fine)
    int M_ref = 256;
    double dt = 5e-5;
    long steps = 20;
    double cg_tol = 1e-12;
    std::uint64_t seed = 1;

    static SpatialStudy standard(Scheme scheme, bool paper_scale = false);
};

RateTable run_spatial_study(const SpatialStudy& spec);

/// Exact sampling of a fine-grid field at the nodes of a nested coarse grid.
Field restrict_to_grid(const Field& fine, const GridSpec& coarse);

/// Matvec scaling and direct-vs-fast timings.
struct BenchReport {
    struct MatvecRow {
        int M = 0;
        int padded = 0;
        double seconds_per_apply = 0.0;
    };
    struct SolveRow {
        int M = 0;
        double seconds = 0.0;
    };
    std::vector<MatvecRow> matvec;
    std::vector<SolveRow> dense_scaling; ///< one-shot dense solves at roughly doubling N
    double fast_solve_seconds = 0.0;   ///< matrix-free CG at the comparison size
    double direct_solve_seconds = 0.0; ///< one-shot assemble+factor+solve
    int compare_M = 64;
    bool direct_refused_large = false; ///< dense route rejected past its node guard
    std::string to_csv() const;
};

/// Times stiffness applications at the given sizes plus one solver
/// comparison. Deterministic inputs; wall-clock timings.
BenchReport run_benchmark(const std::vector<int>& matvec_Ms = {128, 256},
                          int compare_M = 64, int repeats = 5);

/// Long coarsening run fitting a power law to the original energy.
struct DecayStudy {
    int M = 128;
    double dt = 1e-3;
    double T = 10.0;
    double fit_t_min = 0.5, fit_t_max = 10.0;
    double epsilon = 0.02, delta = 0.05, mobility = 1.0, C0 = 1.0;
    double amplitude = 0.1;
    Scheme scheme = Scheme::sav2;
    std::uint64_t seed = 1;
    double cg_tol = 1e-10;
};

struct DecayResult {
    std::vector<EnergySample> series;
    double slope = 0.0;               ///< log-log least-squares slope over the fit window
    bool modified_monotone = true;
    std::string series_csv() const;   ///< t,original_energy,modified_energy
};

DecayResult run_energy_decay(const DecayStudy& spec);

} // namespace nlch
