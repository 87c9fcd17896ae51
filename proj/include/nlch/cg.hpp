#pragma once

#include "nlch/convolution.hpp"

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace nlch {

struct CgConfig {
    double tol = 1e-10;          ///< relative residual target, 0 < tol < 1
    int max_iter = 2000;
    bool record_history = false; ///< keep per-iteration relative residuals
    bool plain_dot = false;      ///< Euclidean dots instead of the weighted product
};

enum class CgStatus { converged, max_iterations, breakdown };

struct CgReport {
    CgStatus status = CgStatus::converged;
    int iterations = 0;
    double rel_residual = 0.0;
    std::vector<double> history; ///< starts with the initial residual

    bool converged() const { return status == CgStatus::converged; }
};

using LinearOperator = std::function<Field(const Field&)>;

/// Conjugate gradients for operators that are self-adjoint positive definite
/// in the chosen inner product. Stops when ||b - A x|| <= tol * ||b||; a zero
/// right-hand side returns the zero field immediately. Non-convergence and
/// breakdown (a search direction with nonpositive curvature) are reported,
/// not thrown; callers decide how hard to fail.
std::pair<Field, CgReport> cg_solve(const LinearOperator& apply, const Field& b,
                                    const Field& x0, const CgConfig& cfg);

/// Shared interface of the two routes that solve (I + c L(L .)) x = b.
class StiffnessSolver {
public:
    virtual ~StiffnessSolver() = default;
    /// Solves for the given coefficient; x0 is a warm start. Adds the
    /// iteration count (0 for direct solves) to *iterations when non-null.
    virtual Field solve(double c, const Field& b, const Field& x0, long* iterations) = 0;
    virtual const char* name() const = 0;
};

/// Matrix-free route: CG with the plan's stiffness application.
/// Throws SolverError if CG fails to converge or breaks down.
class FastCgSolver : public StiffnessSolver {
public:
    FastCgSolver(const ConvolutionPlan& plan, CgConfig cfg);
    Field solve(double c, const Field& b, const Field& x0, long* iterations) override;
    const char* name() const override { return "fast_cg"; }
    const CgReport& last_report() const { return last_; }

private:
    const ConvolutionPlan* plan_;
    CgConfig cfg_;
    ConvWorkspace ws_;
    CgReport last_;
};

/// Dense baseline: assembles the operator once per distinct coefficient,
/// factors it by LU with partial pivoting, then back-substitutes. Refuses
/// grids with more than `node_guard` nodes.
class DirectDenseSolver : public StiffnessSolver {
public:
    explicit DirectDenseSolver(const ConvolutionPlan& plan, int node_guard = 20000);
    DirectDenseSolver(DirectDenseSolver&&) noexcept;
    DirectDenseSolver& operator=(DirectDenseSolver&&) noexcept;
    ~DirectDenseSolver();

    Field solve(double c, const Field& b, const Field& x0, long* iterations) override;
    const char* name() const override { return "direct"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Dense matrix of v -> v + c L(L v), assembled column by column through the
/// plan's operator application. Column-major, N x N with N = (M+1)^2.
std::vector<double> assemble_stiffness_matrix(const ConvolutionPlan& plan, double c);

/// One-shot dense solve (assemble, factor, back-substitute). Oracle and
/// baseline for the matrix-free route; cost grows like N^3, hence the guard.
Field dense_solve(const ConvolutionPlan& plan, double c, const Field& b, int node_guard = 20000);

} // namespace nlch
