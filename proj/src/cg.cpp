#include "nlch/cg.hpp"
#include "nlch/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <sstream>

namespace nlch {

std::pair<Field, CgReport> cg_solve(const LinearOperator& apply, const Field& b,
                                    const Field& x0, const CgConfig& cfg) {
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw ConfigError("cg: tol must lie in (0,1)");
    if (cfg.max_iter < 1) throw ConfigError("cg: max_iter must be at least 1");
    if (!(x0.grid == b.grid) || x0.size() != b.size()) throw ConfigError("cg: x0 does not match b");

    const auto inner = [&](const Field& u, const Field& v) {
        return cfg.plain_dot ? plain_dot(u, v) : weighted_inner(u, v);
    };

    CgReport rep;
    const double bnorm = std::sqrt(inner(b, b));
    if (bnorm == 0.0) {
        rep.rel_residual = 0.0;
        if (cfg.record_history) rep.history.push_back(0.0);
        return {Field(b.grid), rep};
    }

    Field x = x0;
    Field Ax = apply(x);
    Field r = b;
    for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] -= Ax.values[k];

    double rho = inner(r, r);
    double rel = std::sqrt(rho) / bnorm;
    if (cfg.record_history) rep.history.push_back(rel);
    if (rel <= cfg.tol) {
        rep.rel_residual = rel;
        return {x, rep};
    }

    Field d = r;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        Field z = apply(d);
        const double dAd = inner(d, z);
        if (!(dAd > 0.0)) {
            rep.status = CgStatus::breakdown;
            rep.iterations = k - 1;
            rep.rel_residual = rel;
            return {x, rep};
        }
        const double alpha = rho / dAd;
        for (std::size_t m = 0; m < x.values.size(); ++m) {
            x.values[m] += alpha * d.values[m];
            r.values[m] -= alpha * z.values[m];
        }
        const double rho_next = inner(r, r);
        rel = std::sqrt(rho_next) / bnorm;
        if (cfg.record_history) rep.history.push_back(rel);
        if (rel <= cfg.tol) {
            rep.iterations = k;
            rep.rel_residual = rel;
            return {x, rep};
        }
        const double beta = rho_next / rho;
        rho = rho_next;
        for (std::size_t m = 0; m < d.values.size(); ++m) d.values[m] = r.values[m] + beta * d.values[m];
    }

    rep.status = CgStatus::max_iterations;
    rep.iterations = cfg.max_iter;
    rep.rel_residual = rel;
    return {x, rep};
}

FastCgSolver::FastCgSolver(const ConvolutionPlan& plan, CgConfig cfg)
    : plan_(&plan), cfg_(cfg), ws_(plan.make_workspace()) {}

Field FastCgSolver::solve(double c, const Field& b, const Field& x0, long* iterations) {
    auto apply = [&](const Field& v) { return plan_->apply_stiffness(v, c, ws_); };
    auto [x, rep] = cg_solve(apply, b, x0, cfg_);
    last_ = rep;
    if (iterations) *iterations += rep.iterations;
    if (rep.status == CgStatus::breakdown)
        throw SolverError("cg: breakdown (nonpositive curvature direction)");
    if (rep.status == CgStatus::max_iterations) {
        std::ostringstream msg;
        msg << "cg: no convergence in " << cfg_.max_iter
            << " iterations (relative residual " << rep.rel_residual << ")";
        throw SolverError(msg.str());
    }
    return x;
}

std::vector<double> assemble_stiffness_matrix(const ConvolutionPlan& plan, double c) {
    const std::int64_t N = plan.grid().node_count();
    std::vector<double> A(static_cast<std::size_t>(N) * N);
    Field e(plan.grid());
    ConvWorkspace ws = plan.make_workspace();
    for (std::int64_t k = 0; k < N; ++k) {
        e.values.assign(e.values.size(), 0.0);
        e.values[static_cast<std::size_t>(k)] = 1.0;
        Field col = plan.apply_stiffness(e, c, ws);
        std::copy(col.values.begin(), col.values.end(), A.begin() + static_cast<std::size_t>(k) * N);
    }
    return A;
}

namespace {

void check_dense_guard(const ConvolutionPlan& plan, int node_guard) {
    const std::int64_t N = plan.grid().node_count();
    if (N > node_guard) {
        std::ostringstream msg;
        msg << "dense solve refused: " << N << " nodes exceeds the guard of " << node_guard
            << " (use the matrix-free solver)";
        throw ConfigError(msg.str());
    }
}

// Solve through an existing factorization and verify the residual; partial
// pivoting does not diagnose singularity on its own.
Field lu_solve_checked(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                       const Eigen::Map<const Eigen::MatrixXd>& A,
                       const ConvolutionPlan& plan, const Field& b) {
    const std::int64_t N = plan.grid().node_count();
    Eigen::Map<const Eigen::VectorXd> bv(b.values.data(), N);
    Eigen::VectorXd xv = lu.solve(bv);
    const double bn = bv.norm();
    if (bn > 0.0) {
        const double resid = (A * xv - bv).norm() / bn;
        if (!(resid <= 1e-8))
            throw SolverError("dense solve: factorization unusable (matrix singular or badly conditioned)");
    }
    Field x(plan.grid());
    std::copy(xv.data(), xv.data() + N, x.values.begin());
    return x;
}

} // namespace

struct DirectDenseSolver::Impl {
    const ConvolutionPlan* plan;
    int node_guard;
    struct Factorization {
        std::vector<double> A;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    };
    std::map<double, std::unique_ptr<Factorization>> cache;
};

DirectDenseSolver::DirectDenseSolver(const ConvolutionPlan& plan, int node_guard)
    : impl_(std::make_unique<Impl>()) {
    impl_->plan = &plan;
    impl_->node_guard = node_guard;
    check_dense_guard(plan, node_guard);
}

DirectDenseSolver::DirectDenseSolver(DirectDenseSolver&&) noexcept = default;
DirectDenseSolver& DirectDenseSolver::operator=(DirectDenseSolver&&) noexcept = default;
DirectDenseSolver::~DirectDenseSolver() = default;

Field DirectDenseSolver::solve(double c, const Field& b, const Field& /*x0*/, long* iterations) {
    if (c < 0.0) throw ConfigError("dense solve: coefficient must be nonnegative");
    const ConvolutionPlan& plan = *impl_->plan;
    const std::int64_t N = plan.grid().node_count();

    auto it = impl_->cache.find(c);
    if (it == impl_->cache.end()) {
        auto fac = std::make_unique<Impl::Factorization>();
        fac->A = assemble_stiffness_matrix(plan, c);
        Eigen::Map<const Eigen::MatrixXd> A(fac->A.data(), N, N);
        fac->lu.compute(A);
        it = impl_->cache.emplace(c, std::move(fac)).first;
    }
    if (iterations) *iterations += 0;
    Eigen::Map<const Eigen::MatrixXd> A(it->second->A.data(), N, N);
    return lu_solve_checked(it->second->lu, A, plan, b);
}

Field dense_solve(const ConvolutionPlan& plan, double c, const Field& b, int node_guard) {
    check_dense_guard(plan, node_guard);
    if (c < 0.0) throw ConfigError("dense solve: coefficient must be nonnegative");
    if (!(b.grid == plan.grid())) throw ConfigError("dense solve: field does not match grid");
    const std::int64_t N = plan.grid().node_count();
    std::vector<double> Araw = assemble_stiffness_matrix(plan, c);
    Eigen::Map<const Eigen::MatrixXd> A(Araw.data(), N, N);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    return lu_solve_checked(lu, A, plan, b);
}

} // namespace nlch
