#pragma once

#include "nlch/cg.hpp"
#include "nlch/convolution.hpp"

#include <optional>

namespace nlch {

enum class Scheme { sav1, sav2 };
enum class Predictor { extrapolate, solve };

/// Physical and algorithmic parameters of a scalar-auxiliary-variable run.
/// The auxiliary scalar is r(t) = sqrt(E1(phi) + C0) with E1 the bulk energy
/// integral, so C0 must keep the radicand positive.
struct SavParams {
    double epsilon = 0.0;   ///< interface parameter (epsilon^2 scales the nonlocal term)
    double mobility = 1.0;
    double dt = 0.0;
    double C0 = 1.0;
    Potential potential = Potential::double_well();
    Predictor predictor = Predictor::extrapolate;
    bool reproject_r = false;       ///< reset r to sqrt(E1+C0) after each step
    bool enforce_energy_decay = true;
    double energy_slack = 1e-9;     ///< relative slack for the decay guard
    double theta_floor = -1e-10;    ///< lower bound accepted for <eta, A^-1 L eta>_w
};

void validate(const SavParams& p);

/// Two time levels of the discrete solution plus the auxiliary scalar.
/// Before the first step phi_prev == phi and r_prev == r.
struct SavState {
    Field phi;
    Field phi_prev;
    double r = 0.0;
    double r_prev = 0.0;
    long step = 0;
    double t = 0.0;
};

/// Per-step telemetry.
struct EnergySample {
    long step = 0;
    double t = 0.0;
    double mass = 0.0;            ///< h^2 sum_w phi
    double r = 0.0;
    double sqrtE1C0 = 0.0;        ///< sqrt(E1(phi) + C0); |r - sqrtE1C0| tracks aux-variable drift
    double modified_energy = 0.0; ///< the scheme's dissipated Lyapunov functional
    double original_energy = 0.0; ///< E1(phi) + (eps^2/2) <L phi, phi>_w
    long cg_iterations = 0;
};

/// Verification extras, computed only when requested (costs extra operator
/// applications).
struct StepDiagnostics {
    double theta = 0.0;         ///< <eta, A^-1 L eta>_w, nonnegative in exact arithmetic
    double phi_residual = 0.0;  ///< update-equation closure, relative to ||phi_new||_w
    double r_residual = 0.0;    ///< closure of the scalar update
};

/// State at t=0: both levels hold phi0 and r = r_prev = sqrt(E1(phi0) + C0).
SavState init_state(const Field& phi0, const SavParams& params);

/// eta = dF(phi_tilde) / sqrt(E1(phi_tilde) + C0); also returns the root.
std::pair<Field, double> compute_eta(const Field& phi_tilde, const SavParams& params);

/// Second-order predictor 2 phi^n - phi^{n-1}.
Field predictor_extrapolate(const SavState& state);

/// First-order predictor: one backward-Euler-type linear solve
/// (I + M dt eps^2 L^2) phi_tilde = phi^n - M dt L dF(phi^n).
Field predictor_solve(const SavState& state, const SavParams& params,
                      const ConvolutionPlan& plan, StiffnessSolver& solver,
                      long* iterations = nullptr);

/// Energies of a state. The modified energy depends on the scheme: for the
/// first-order scheme it is (eps^2/2)<L phi, phi>_w + r^2; the second-order
/// scheme adds the history terms (eps^2/2)<L(2phi - phi_prev), 2phi - phi_prev>_w
/// and (2r - r_prev)^2. cg_iterations is left at zero.
EnergySample compute_energies(const SavState& state, const SavParams& params,
                              const ConvolutionPlan& plan, Scheme scheme);

/// Drives a run of either scheme. Owns warm-start caches and the energy-decay
/// guard; one instance per run.
///
/// Step layout: the first-order scheme steps from level n alone. The
/// second-order scheme needs two levels, so its first step is a bootstrap
/// (one first-order step whose predictor is the linear solve); subsequent
/// steps use the three-level update. The decay guard compares the dissipated
/// functional across comparable steps only (the bootstrap transition checks
/// the first-order functional).
class SavIntegrator {
public:
    SavIntegrator(const ConvolutionPlan& plan, const SavParams& params,
                  Scheme scheme, StiffnessSolver& solver);

    SavState initial_state(const Field& phi0) const;

    /// Advances one step in place and returns the step's telemetry.
    EnergySample step(SavState& state);

    Scheme scheme() const { return scheme_; }
    const SavParams& params() const { return params_; }

    /// Enables residual/theta diagnostics for subsequent steps.
    void collect_diagnostics(bool on) { collect_diagnostics_ = on; }
    const StepDiagnostics& last_diagnostics() const { return diag_; }

private:
    EnergySample step_first_order(SavState& state, bool force_solve_predictor);
    EnergySample step_second_order(SavState& state);
    void guard_energy(double before, double after, const char* label) const;

    const ConvolutionPlan* plan_;
    SavParams params_;
    Scheme scheme_;
    StiffnessSolver* solver_;
    // Previous linear-solve solutions; their extrapolations seed the CG
    // warm starts (assumes states are stepped sequentially).
    std::optional<Field> p_warm1_, p_warm2_;
    std::optional<Field> q_warm1_, q_warm2_;
    std::optional<double> prev_modified_;
    bool collect_diagnostics_ = false;
    StepDiagnostics diag_;
};

} // namespace nlch
