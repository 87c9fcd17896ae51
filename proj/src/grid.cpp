#include "nlch/grid.hpp"
#include "nlch/errors.hpp"

#include <cmath>
#include <random>

namespace nlch {

GridSpec make_grid(double L, int M) {
    if (!(L > 0.0)) throw ConfigError("grid: domain half-width L must be positive");
    if (M < 2) throw ConfigError("grid: cell count M must be at least 2");
    GridSpec g;
    g.L = L;
    g.M = M;
    g.h = 2.0 * L / M;
    return g;
}

void Field::require_finite(const char* context) const {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvariantError(std::string("non-finite field value in ") + context);
        }
    }
}

double quadrature(const Field& f) {
    const int M = f.grid.M;
    const int n = M + 1;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double wy = line_weight(j, M);
        for (int i = 0; i < n; ++i) {
            acc += line_weight(i, M) * wy * f.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j];
        }
    }
    return f.grid.h * f.grid.h * acc;
}

double weighted_inner(const Field& u, const Field& v) {
    if (!(u.grid == v.grid)) throw ConfigError("weighted_inner: grid mismatch");
    const int M = u.grid.M;
    const int n = M + 1;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double wy = line_weight(j, M);
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j;
            acc += line_weight(i, M) * wy * u.values[k] * v.values[k];
        }
    }
    return u.grid.h * u.grid.h * acc;
}

double weighted_norm(const Field& u) { return std::sqrt(weighted_inner(u, u)); }

double plain_dot(const Field& u, const Field& v) {
    if (!(u.grid == v.grid)) throw ConfigError("plain_dot: grid mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) acc += u.values[k] * v.values[k];
    return acc;
}

Potential Potential::double_well() {
    Potential p;
    p.F = [](double y) {
        const double s = y * y - 1.0;
        return 0.25 * s * s;
    };
    p.dF = [](double y) { return y * y * y - y; };
    return p;
}

Field init_smooth_sine(const GridSpec& grid) {
    Field f(grid);
    const double pi = 3.14159265358979323846;
    for (int j = 0; j <= grid.M; ++j) {
        const double y = grid.node(j);
        for (int i = 0; i <= grid.M; ++i) {
            const double x = grid.node(i);
            f.at(i, j) = 0.5 * std::sin(pi * x) * std::sin(pi * y) + 0.1;
        }
    }
    return f;
}

Field init_two_bubbles(const GridSpec& grid, double r0, double cx, double eps) {
    if (!(r0 > 0.0) || !(eps > 0.0)) throw ConfigError("two-bubble init: r0 and eps must be positive");
    Field f(grid);
    const double s = std::sqrt(2.0) * eps;
    for (int j = 0; j <= grid.M; ++j) {
        const double y = grid.node(j);
        for (int i = 0; i <= grid.M; ++i) {
            const double x = grid.node(i);
            const double d1 = std::hypot(x - cx, y);
            const double d2 = std::hypot(x + cx, y);
            f.at(i, j) = -std::tanh((d1 - r0) / s) - std::tanh((d2 - r0) / s) + 1.0;
        }
    }
    return f;
}

Field init_random_uniform(const GridSpec& grid, double amplitude, std::uint64_t seed) {
    if (!(amplitude > 0.0)) throw ConfigError("random init: amplitude must be positive");
    Field f(grid);
    // Map raw 64-bit draws to [0,1) by hand; std::uniform_real_distribution is
    // not bitwise reproducible across standard libraries.
    std::mt19937_64 rng(seed);
    for (double& v : f.values) {
        const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = amplitude * (2.0 * u01 - 1.0);
    }
    double mean = 0.0;
    for (double v : f.values) mean += v;
    mean /= static_cast<double>(f.values.size());
    for (double& v : f.values) v -= mean;
    return f;
}

} // namespace nlch
