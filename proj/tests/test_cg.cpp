#include "doctest.h"

#include "nlch/cg.hpp"
#include "nlch/convolution.hpp"
#include "nlch/errors.hpp"
#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"

#include <cmath>
#include <cstddef>

using namespace nlch;

namespace {

double weighted_rel_diff(const Field& a, const Field& b) {
    Field d = a;
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b.values[k];
    const double den = weighted_norm(b);
    return weighted_norm(d) / (den > 0.0 ? den : 1.0);
}

} // namespace

TEST_CASE("cg solves the identity in one iteration") {
    GridSpec g = make_grid(1.0, 6);
    Field b = init_random_uniform(g, 1.0, 3);
    Field x0(g);
    auto identity = [](const Field& v) { return v; };
    auto [x, rep] = cg_solve(identity, b, x0, CgConfig{});
    CHECK(rep.converged());
    CHECK(rep.iterations == 1);
    CHECK(weighted_rel_diff(x, b) <= 1e-14);
}

TEST_CASE("cg returns immediately on a zero right-hand side") {
    GridSpec g = make_grid(1.0, 6);
    Field b(g);
    Field x0 = init_random_uniform(g, 1.0, 4); // deliberately nonzero start
    auto identity = [](const Field& v) { return v; };
    auto [x, rep] = cg_solve(identity, b, x0, CgConfig{});
    CHECK(rep.converged());
    CHECK(rep.iterations == 0);
    for (double v : x.values) CHECK(v == 0.0);
}

TEST_CASE("cg agrees with the dense factorization on the implicit operator") {
    GridSpec g = make_grid(1.0, 6);
    KernelTable t = sample_kernel(g, GaussianKernel{0.5});
    ConvolutionPlan plan(g, t);
    const double c = 1e-3;
    Field b = init_random_uniform(g, 1.0, 9);

    CgConfig cfg;
    cfg.tol = 1e-12;
    auto apply = [&](const Field& v) { return plan.apply_stiffness(v, c); };
    auto [x, rep] = cg_solve(apply, b, Field(g), cfg);
    REQUIRE(rep.converged());

    Field ref = dense_solve(plan, c, b);
    CHECK(weighted_rel_diff(x, ref) <= 1e-10);
}

TEST_CASE("residual history starts at one and ends below tolerance") {
    GridSpec g = make_grid(1.0, 8);
    KernelTable t = sample_kernel(g, GaussianKernel{0.5});
    ConvolutionPlan plan(g, t);
    Field b = init_random_uniform(g, 1.0, 13);

    CgConfig cfg;
    cfg.tol = 1e-11;
    cfg.record_history = true;
    auto apply = [&](const Field& v) { return plan.apply_stiffness(v, 2e-3); };
    auto [x, rep] = cg_solve(apply, b, Field(g), cfg);
    REQUIRE(rep.converged());
    REQUIRE(!rep.history.empty());
    CHECK(rep.history.front() == doctest::Approx(1.0));
    CHECK(rep.history.back() <= 1e-11);
    CHECK(rep.rel_residual <= 1e-11);
    CHECK(static_cast<int>(rep.history.size()) == rep.iterations + 1);
}

TEST_CASE("the solution does not depend on the warm start") {
    GridSpec g = make_grid(1.0, 8);
    KernelTable t = sample_kernel(g, GaussianKernel{0.5});
    ConvolutionPlan plan(g, t);
    Field b = init_random_uniform(g, 1.0, 17);

    CgConfig cfg;
    cfg.tol = 1e-12;
    auto apply = [&](const Field& v) { return plan.apply_stiffness(v, 1e-3); };
    auto [x_cold, r1] = cg_solve(apply, b, Field(g), cfg);
    Field warm = init_random_uniform(g, 0.5, 18);
    auto [x_warm, r2] = cg_solve(apply, b, warm, cfg);
    REQUIRE(r1.converged());
    REQUIRE(r2.converged());
    CHECK(weighted_rel_diff(x_cold, x_warm) <= 1e-9);
}

TEST_CASE("assembled stiffness matrix is weighted-symmetric") {
    GridSpec g = make_grid(1.0, 4);
    KernelTable t = sample_kernel(g, GaussianKernel{0.6});
    ConvolutionPlan plan(g, t);
    const double c = 0.01;
    std::vector<double> A = assemble_stiffness_matrix(plan, c);
    const int N = g.node_count();
    REQUIRE(static_cast<int>(A.size()) == N * N);

    // W A must be symmetric, where W is the diagonal of quadrature weights.
    std::vector<double> w(static_cast<std::size_t>(N));
    for (int j = 0; j <= g.M; ++j)
        for (int i = 0; i <= g.M; ++i)
            w[static_cast<std::size_t>(i) + (g.M + 1) * j] = node_weight(i, j, g.M);

    double max_asym = 0.0, max_entry = 0.0;
    for (int col = 0; col < N; ++col)
        for (int row = 0; row < N; ++row) {
            const double wa = w[row] * A[static_cast<std::size_t>(row) + N * col];
            const double aw = w[col] * A[static_cast<std::size_t>(col) + N * row];
            max_asym = std::max(max_asym, std::abs(wa - aw));
            max_entry = std::max(max_entry, std::abs(wa));
        }
    CHECK(max_asym <= 1e-12 * max_entry);
}

TEST_CASE("dense solve with a zero coefficient returns the right-hand side") {
    GridSpec g = make_grid(1.0, 5);
    KernelTable t = sample_kernel(g, GaussianKernel{0.5});
    ConvolutionPlan plan(g, t);
    Field b = init_random_uniform(g, 1.0, 23);
    Field x = dense_solve(plan, 0.0, b);
    CHECK(weighted_rel_diff(x, b) <= 1e-12);
}

TEST_CASE("dense route refuses grids beyond the node guard") {
    GridSpec g = make_grid(1.0, 150); // 151^2 = 22801 nodes > 20000
    KernelTable t = sample_kernel(g, GaussianKernel{0.1});
    ConvolutionPlan plan(g, t);
    Field b(g);
    CHECK_THROWS_AS(dense_solve(plan, 1e-3, b), ConfigError);
    CHECK_THROWS_AS((DirectDenseSolver(plan)), ConfigError);
    // A larger guard admits the same grid.
    CHECK_NOTHROW((DirectDenseSolver(plan, 30000)));
}

TEST_CASE("nonpositive curvature is reported as breakdown, not thrown") {
    GridSpec g = make_grid(1.0, 4);
    Field b = init_random_uniform(g, 1.0, 29);
    auto negate = [](const Field& v) {
        Field out = v;
        for (double& x : out.values) x = -x;
        return out;
    };
    auto [x, rep] = cg_solve(negate, b, Field(g), CgConfig{});
    CHECK(rep.status == CgStatus::breakdown);
    CHECK(!rep.converged());
}

TEST_CASE("iteration cap is reported, not thrown") {
    GridSpec g = make_grid(1.0, 8);
    KernelTable t = sample_kernel(g, GaussianKernel{0.1});
    ConvolutionPlan plan(g, t);
    Field b = init_random_uniform(g, 1.0, 31);
    CgConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = 1;
    auto apply = [&](const Field& v) { return plan.apply_stiffness(v, 10.0); };
    auto [x, rep] = cg_solve(apply, b, Field(g), cfg);
    CHECK(rep.status == CgStatus::max_iterations);
    CHECK(rep.iterations == 1);
}

TEST_CASE("solver configuration is validated") {
    GridSpec g = make_grid(1.0, 4);
    Field b(g);
    auto identity = [](const Field& v) { return v; };
    CgConfig bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(cg_solve(identity, b, b, bad), ConfigError);
    bad.tol = 1.5;
    CHECK_THROWS_AS(cg_solve(identity, b, b, bad), ConfigError);
    bad.tol = 1e-10;
    bad.max_iter = 0;
    CHECK_THROWS_AS(cg_solve(identity, b, b, bad), ConfigError);
}

TEST_CASE("euclidean and weighted inner products find the same solution") {
    GridSpec g = make_grid(1.0, 8);
    KernelTable t = sample_kernel(g, GaussianKernel{0.5});
    ConvolutionPlan plan(g, t);
    Field b = init_random_uniform(g, 1.0, 37);
    auto apply = [&](const Field& v) { return plan.apply_stiffness(v, 1e-3); };

    CgConfig weighted;
    weighted.tol = 1e-12;
    CgConfig euclidean = weighted;
    euclidean.plain_dot = true;

    auto [xw, rw] = cg_solve(apply, b, Field(g), weighted);
    auto [xe, re] = cg_solve(apply, b, Field(g), euclidean);
    REQUIRE(rw.converged());
    REQUIRE(re.converged());
    CHECK(weighted_rel_diff(xw, xe) <= 1e-9);
}

TEST_CASE("fast and direct stiffness solvers agree through the shared interface") {
    GridSpec g = make_grid(1.0, 8);
    KernelTable t = sample_kernel(g, GaussianKernel{0.5});
    ConvolutionPlan plan(g, t);
    const double c = 5e-4;
    Field b = init_random_uniform(g, 1.0, 41);

    CgConfig cfg;
    cfg.tol = 1e-12;
    FastCgSolver fast(plan, cfg);
    DirectDenseSolver direct(plan);

    long fast_iters = 0, direct_iters = 0;
    Field xf = fast.solve(c, b, Field(g), &fast_iters);
    Field xd = direct.solve(c, b, Field(g), &direct_iters);
    CHECK(fast_iters > 0);
    CHECK(direct_iters == 0);
    CHECK(weighted_rel_diff(xf, xd) <= 1e-10);
    CHECK(fast.last_report().converged());

    // Direct solves reuse the factorization across right-hand sides.
    Field b2 = init_random_uniform(g, 1.0, 43);
    Field xd2 = direct.solve(c, b2, Field(g), &direct_iters);
    Field ref2 = dense_solve(plan, c, b2);
    CHECK(weighted_rel_diff(xd2, ref2) <= 1e-12);
}

TEST_CASE("fast solver throws when the iteration budget is too small") {
    GridSpec g = make_grid(1.0, 8);
    KernelTable t = sample_kernel(g, GaussianKernel{0.1});
    ConvolutionPlan plan(g, t);
    Field b = init_random_uniform(g, 1.0, 47);
    CgConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = 1;
    FastCgSolver fast(plan, cfg);
    long iters = 0;
    CHECK_THROWS_AS(fast.solve(10.0, b, Field(g), &iters), SolverError);
}
