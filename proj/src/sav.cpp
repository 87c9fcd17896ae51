#include "nlch/sav.hpp"
#include "nlch/errors.hpp"

#include <cmath>
#include <sstream>

namespace nlch {

namespace {

double bulk_energy(const Field& phi, const Potential& pot) {
    Field f(phi.grid);
    for (std::size_t k = 0; k < phi.values.size(); ++k) f.values[k] = pot.F(phi.values[k]);
    return quadrature(f);
}

double checked_root(double e1, double C0) {
    const double radicand = e1 + C0;
    if (!(radicand > 0.0))
        throw InvariantError("sav: E1 + C0 is not positive; raise C0 for this potential");
    return std::sqrt(radicand);
}

} // namespace

void validate(const SavParams& p) {
    if (!(p.epsilon > 0.0)) throw ConfigError("sav: epsilon must be positive");
    if (!(p.mobility > 0.0)) throw ConfigError("sav: mobility must be positive");
    if (!(p.dt > 0.0)) throw ConfigError("sav: dt must be positive");
    if (!(p.C0 > 0.0)) throw ConfigError("sav: C0 must be positive");
    if (!(p.energy_slack >= 0.0)) throw ConfigError("sav: energy slack must be nonnegative");
    if (!p.potential.F || !p.potential.dF) throw ConfigError("sav: potential is incomplete");
}

SavState init_state(const Field& phi0, const SavParams& params) {
    validate(params);
    phi0.require_finite("initial data");
    SavState st;
    st.phi = phi0;
    st.phi_prev = phi0;
    st.r = checked_root(bulk_energy(phi0, params.potential), params.C0);
    st.r_prev = st.r;
    st.step = 0;
    st.t = 0.0;
    return st;
}

std::pair<Field, double> compute_eta(const Field& phi_tilde, const SavParams& params) {
    const double root = checked_root(bulk_energy(phi_tilde, params.potential), params.C0);
    Field eta(phi_tilde.grid);
    for (std::size_t k = 0; k < eta.values.size(); ++k)
        eta.values[k] = params.potential.dF(phi_tilde.values[k]) / root;
    return {std::move(eta), root};
}

Field predictor_extrapolate(const SavState& state) {
    Field out(state.phi.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = 2.0 * state.phi.values[k] - state.phi_prev.values[k];
    return out;
}

Field predictor_solve(const SavState& state, const SavParams& params,
                      const ConvolutionPlan& plan, StiffnessSolver& solver, long* iterations) {
    const double a = params.mobility * params.dt;
    Field dF(state.phi.grid);
    for (std::size_t k = 0; k < dF.values.size(); ++k)
        dF.values[k] = params.potential.dF(state.phi.values[k]);
    Field LdF = plan.apply_nonlocal(dF);
    Field rhs(state.phi.grid);
    for (std::size_t k = 0; k < rhs.values.size(); ++k)
        rhs.values[k] = state.phi.values[k] - a * LdF.values[k];
    return solver.solve(a * params.epsilon * params.epsilon, rhs, state.phi, iterations);
}

EnergySample compute_energies(const SavState& state, const SavParams& params,
                              const ConvolutionPlan& plan, Scheme scheme) {
    EnergySample s;
    s.step = state.step;
    s.t = state.t;
    s.r = state.r;
    s.mass = quadrature(state.phi);

    const double eps2 = params.epsilon * params.epsilon;
    Field Lphi = plan.apply_nonlocal(state.phi);
    const double nonlocal = 0.5 * eps2 * weighted_inner(Lphi, state.phi);
    const double e1 = bulk_energy(state.phi, params.potential);

    s.original_energy = e1 + nonlocal;
    s.sqrtE1C0 = checked_root(e1, params.C0);

    if (scheme == Scheme::sav1) {
        s.modified_energy = nonlocal + state.r * state.r;
    } else {
        Field ext = predictor_extrapolate(state); // 2 phi - phi_prev
        Field Lext = plan.apply_nonlocal(ext);
        const double dr = 2.0 * state.r - state.r_prev;
        s.modified_energy = nonlocal + 0.5 * eps2 * weighted_inner(Lext, ext) +
                            state.r * state.r + dr * dr;
    }
    return s;
}

SavIntegrator::SavIntegrator(const ConvolutionPlan& plan, const SavParams& params,
                             Scheme scheme, StiffnessSolver& solver)
    : plan_(&plan), params_(params), scheme_(scheme), solver_(&solver) {
    validate(params_);
}

SavState SavIntegrator::initial_state(const Field& phi0) const {
    if (!(phi0.grid == plan_->grid())) throw ConfigError("sav: initial data does not match the plan's grid");
    return init_state(phi0, params_);
}

void SavIntegrator::guard_energy(double before, double after, const char* label) const {
    if (!params_.enforce_energy_decay || params_.reproject_r) return;
    const double slack = params_.energy_slack * std::max(std::abs(before), std::abs(after));
    if (after > before + slack) {
        std::ostringstream msg;
        msg << "modified energy increased over a " << label << ": " << before << " -> " << after;
        throw InvariantError(msg.str());
    }
}

EnergySample SavIntegrator::step(SavState& st) {
    if (!(st.phi.grid == plan_->grid())) throw ConfigError("sav: state does not match the plan's grid");
    if (scheme_ == Scheme::sav1) return step_first_order(st, false);
    if (st.step == 0) return step_first_order(st, true); // bootstrap
    return step_second_order(st);
}

namespace {

// Initial CG guess from the last two solutions of the same linear system
// family: linear extrapolation once two are known.
Field warm_start(const std::optional<Field>& w1, const std::optional<Field>& w2, Field fallback) {
    if (!w1) return fallback;
    if (!w2) return *w1;
    Field x = *w1;
    for (std::size_t k = 0; k < x.values.size(); ++k)
        x.values[k] = 2.0 * w1->values[k] - w2->values[k];
    return x;
}

} // namespace

EnergySample SavIntegrator::step_first_order(SavState& st, bool bootstrap) {
    const double a = params_.mobility * params_.dt;
    const double eps2 = params_.epsilon * params_.epsilon;
    const double c1 = a * eps2;
    long iters = 0;

    // The decay guard for a first-order step compares the first-order
    // functional; fetch the pre-step value before touching the state.
    double guard_before;
    if (scheme_ == Scheme::sav1 && prev_modified_ && st.step > 0) {
        guard_before = *prev_modified_;
    } else {
        guard_before = compute_energies(st, params_, *plan_, Scheme::sav1).modified_energy;
    }

    const bool use_solve =
        bootstrap || params_.predictor == Predictor::solve || st.step == 0;
    Field phi_t = use_solve ? predictor_solve(st, params_, *plan_, *solver_, &iters)
                            : predictor_extrapolate(st);
    auto [eta, root] = compute_eta(phi_t, params_);
    (void)root;
    Field Leta = plan_->apply_nonlocal(eta);

    const double eta_phi = weighted_inner(eta, st.phi);
    Field rhs(st.phi.grid);
    {
        const double coef = a * (st.r - 0.5 * eta_phi);
        for (std::size_t k = 0; k < rhs.values.size(); ++k)
            rhs.values[k] = st.phi.values[k] - coef * Leta.values[k];
    }

    Field pf = solver_->solve(c1, rhs, warm_start(p_warm1_, p_warm2_, st.phi), &iters);
    Field qf = solver_->solve(c1, Leta, warm_start(q_warm1_, q_warm2_, Field(st.phi.grid)), &iters);

    const double ep = weighted_inner(eta, pf);
    const double eq = weighted_inner(eta, qf); // theta, >= 0 in exact arithmetic
    if (eq < params_.theta_floor)
        throw InvariantError("sav: solvability quantity <eta, A^-1 L eta>_w fell below its floor");
    const double denom = 1.0 + 0.5 * a * eq;
    if (!(denom > 0.0)) throw InvariantError("sav: scalar-update denominator is not positive");
    const double c = ep / denom;

    Field phi_new = pf;
    {
        const double coef = 0.5 * a * c;
        for (std::size_t k = 0; k < phi_new.values.size(); ++k)
            phi_new.values[k] -= coef * qf.values[k];
    }
    phi_new.require_finite("first-order step");

    double r_new;
    {
        Field diff = phi_new;
        for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= st.phi.values[k];
        r_new = st.r + 0.5 * weighted_inner(eta, diff);
    }

    if (collect_diagnostics_) {
        diag_.theta = eq;
        Field mu = plan_->apply_nonlocal(phi_new);
        for (std::size_t k = 0; k < mu.values.size(); ++k)
            mu.values[k] = eps2 * mu.values[k] + r_new * eta.values[k];
        Field Lmu = plan_->apply_nonlocal(mu);
        Field res(st.phi.grid);
        for (std::size_t k = 0; k < res.values.size(); ++k)
            res.values[k] = (phi_new.values[k] - st.phi.values[k]) + a * Lmu.values[k];
        diag_.phi_residual = weighted_norm(res) / std::max(weighted_norm(phi_new), 1e-300);
        Field diff = phi_new;
        for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= st.phi.values[k];
        diag_.r_residual = std::abs(r_new - st.r - 0.5 * weighted_inner(eta, diff)) /
                           std::max(1.0, std::abs(r_new));
    }

    st.phi_prev = std::move(st.phi);
    st.phi = std::move(phi_new);
    st.r_prev = st.r;
    st.r = r_new;
    st.step += 1;
    st.t = static_cast<double>(st.step) * params_.dt;

    if (params_.reproject_r)
        st.r = checked_root(bulk_energy(st.phi, params_.potential), params_.C0);

    EnergySample sample = compute_energies(st, params_, *plan_, scheme_);
    sample.cg_iterations = iters;

    const double guard_after =
        scheme_ == Scheme::sav1 ? sample.modified_energy
                                : compute_energies(st, params_, *plan_, Scheme::sav1).modified_energy;
    guard_energy(guard_before, guard_after, bootstrap ? "bootstrap step" : "first-order step");
    prev_modified_ = sample.modified_energy;

    p_warm2_ = std::move(p_warm1_);
    p_warm1_ = std::move(pf);
    q_warm2_ = std::move(q_warm1_);
    q_warm1_ = std::move(qf);
    return sample;
}

EnergySample SavIntegrator::step_second_order(SavState& st) {
    const double a = params_.mobility * params_.dt;
    const double eps2 = params_.epsilon * params_.epsilon;
    const double c2 = (2.0 / 3.0) * a * eps2;
    long iters = 0;

    double guard_before;
    if (prev_modified_) {
        guard_before = *prev_modified_;
    } else {
        guard_before = compute_energies(st, params_, *plan_, Scheme::sav2).modified_energy;
    }

    Field phi_t = params_.predictor == Predictor::solve
                      ? predictor_solve(st, params_, *plan_, *solver_, &iters)
                      : predictor_extrapolate(st);
    auto [eta, root] = compute_eta(phi_t, params_);
    (void)root;
    Field Leta = plan_->apply_nonlocal(eta);

    const double eta_phi = weighted_inner(eta, st.phi);
    const double eta_phi_prev = weighted_inner(eta, st.phi_prev);

    Field g(st.phi.grid);
    {
        const double rbar = (4.0 * st.r - st.r_prev) / 3.0;
        const double coef = (2.0 / 3.0) * a *
                            (rbar - (2.0 / 3.0) * eta_phi + (1.0 / 6.0) * eta_phi_prev);
        for (std::size_t k = 0; k < g.values.size(); ++k)
            g.values[k] = (4.0 * st.phi.values[k] - st.phi_prev.values[k]) / 3.0 -
                          coef * Leta.values[k];
    }

    Field pf = solver_->solve(c2, g, warm_start(p_warm1_, p_warm2_, st.phi), &iters);
    Field qf = solver_->solve(c2, Leta, warm_start(q_warm1_, q_warm2_, Field(st.phi.grid)), &iters);

    const double ep = weighted_inner(eta, pf);
    const double eq = weighted_inner(eta, qf);
    if (eq < params_.theta_floor)
        throw InvariantError("sav: solvability quantity <eta, A^-1 L eta>_w fell below its floor");
    const double denom = 1.0 + (a / 3.0) * eq;
    if (!(denom > 0.0)) throw InvariantError("sav: scalar-update denominator is not positive");
    const double c = ep / denom;

    Field phi_new = pf;
    {
        const double coef = (a / 3.0) * c;
        for (std::size_t k = 0; k < phi_new.values.size(); ++k)
            phi_new.values[k] -= coef * qf.values[k];
    }
    phi_new.require_finite("second-order step");

    double r_new;
    {
        Field comb(st.phi.grid);
        for (std::size_t k = 0; k < comb.values.size(); ++k)
            comb.values[k] = 3.0 * phi_new.values[k] - 4.0 * st.phi.values[k] + st.phi_prev.values[k];
        r_new = (4.0 * st.r - st.r_prev) / 3.0 + (1.0 / 6.0) * weighted_inner(eta, comb);
    }

    if (collect_diagnostics_) {
        diag_.theta = eq;
        Field mu = plan_->apply_nonlocal(phi_new);
        for (std::size_t k = 0; k < mu.values.size(); ++k)
            mu.values[k] = eps2 * mu.values[k] + r_new * eta.values[k];
        Field Lmu = plan_->apply_nonlocal(mu);
        Field res(st.phi.grid);
        for (std::size_t k = 0; k < res.values.size(); ++k)
            res.values[k] = (3.0 * phi_new.values[k] - 4.0 * st.phi.values[k] +
                             st.phi_prev.values[k]) / 3.0 +
                            (2.0 / 3.0) * a * Lmu.values[k];
        diag_.phi_residual = weighted_norm(res) / std::max(weighted_norm(phi_new), 1e-300);
        Field comb(st.phi.grid);
        for (std::size_t k = 0; k < comb.values.size(); ++k)
            comb.values[k] = 3.0 * phi_new.values[k] - 4.0 * st.phi.values[k] + st.phi_prev.values[k];
        diag_.r_residual = std::abs(r_new - (4.0 * st.r - st.r_prev) / 3.0 -
                                    (1.0 / 6.0) * weighted_inner(eta, comb)) /
                           std::max(1.0, std::abs(r_new));
    }

    st.phi_prev = std::move(st.phi);
    st.phi = std::move(phi_new);
    st.r_prev = st.r;
    st.r = r_new;
    st.step += 1;
    st.t = static_cast<double>(st.step) * params_.dt;

    if (params_.reproject_r)
        st.r = checked_root(bulk_energy(st.phi, params_.potential), params_.C0);

    EnergySample sample = compute_energies(st, params_, *plan_, Scheme::sav2);
    sample.cg_iterations = iters;

    guard_energy(guard_before, sample.modified_energy, "second-order step");
    prev_modified_ = sample.modified_energy;

    p_warm2_ = std::move(p_warm1_);
    p_warm1_ = std::move(pf);
    q_warm2_ = std::move(q_warm1_);
    q_warm1_ = std::move(qf);
    return sample;
}

} // namespace nlch
