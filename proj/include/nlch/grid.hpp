#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace nlch {

/// Uniform node-centered grid on the square [-L, L]^2.
///
/// M is the number of cells per direction, so there are (M+1)^2 nodes at
/// x_i = -L + i*h, i = 0..M, with h = 2L/M. Node (i,j) of a field lives at
/// linear index i + (M+1)*j (x fastest).
struct GridSpec {
    double L = 1.0;
    int M = 0;
    double h = 0.0;

    int points() const { return M + 1; }
    std::int64_t node_count() const {
        return static_cast<std::int64_t>(M + 1) * (M + 1);
    }
    double node(int i) const { return -L + i * h; }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.L == b.L && a.M == b.M;
    }
};

/// Validates L > 0, M >= 2 and returns the grid with h = 2L/M.
GridSpec make_grid(double L, int M);

/// Nodal scalar field tied to a grid. Plain value type: copy freely.
struct Field {
    GridSpec grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.node_count()), fill) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) + static_cast<std::size_t>(grid.M + 1) * j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) + static_cast<std::size_t>(grid.M + 1) * j]; }
    std::size_t size() const { return values.size(); }

    /// Throws InvariantError if any entry is NaN or infinite.
    void require_finite(const char* context) const;
};

/// Trapezoid weight of node index i on a line of M cells: 1/2 at the two
/// endpoints, 1 inside.
inline double line_weight(int i, int M) { return (i == 0 || i == M) ? 0.5 : 1.0; }

/// Tensor trapezoid weight of node (i,j): 1 interior, 1/2 edge, 1/4 corner.
inline double node_weight(int i, int j, int M) { return line_weight(i, M) * line_weight(j, M); }

/// Trapezoid quadrature of a nodal field: h^2 * sum_ij w_ij f_ij.
double quadrature(const Field& f);

/// Weighted inner product <u,v>_w = h^2 * sum_ij w_ij u_ij v_ij.
/// Both fields must live on the same grid. Fixed row-major summation order.
double weighted_inner(const Field& u, const Field& v);

/// Norm induced by weighted_inner.
double weighted_norm(const Field& u);

/// Plain Euclidean dot product, kept for compatibility experiments.
double plain_dot(const Field& u, const Field& v);

/// Nonlinear bulk potential. Defaults to the double well
/// F(y) = (1/4)(y^2-1)^2, dF(y) = y^3 - y.
struct Potential {
    std::function<double(double)> F;
    std::function<double(double)> dF;

    static Potential double_well();
};

/// phi0(x,y) = 0.5 sin(pi x) sin(pi y) + 0.1
Field init_smooth_sine(const GridSpec& grid);

/// Two tanh-profile bubbles of radius r0 centered at (+-cx, 0), interface
/// width eps: phi0 = sum_k -tanh((dist_k - r0)/(sqrt(2) eps)) + 1.
Field init_two_bubbles(const GridSpec& grid, double r0, double cx, double eps);

/// Uniform random values in [-amplitude, amplitude] from a seeded generator,
/// shifted by their arithmetic mean so the field sums to zero exactly (to
/// roundoff). Bitwise reproducible for a fixed seed on any platform.
Field init_random_uniform(const GridSpec& grid, double amplitude, std::uint64_t seed);

} // namespace nlch
