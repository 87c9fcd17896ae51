#pragma once

#include "nlch/grid.hpp"

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace nlch {

/// Gaussian interaction kernel in two dimensions,
/// J(dx,dy) = 4/(pi delta^4) * exp(-(dx^2+dy^2)/delta^2).
struct GaussianKernel {
    double delta = 0.0;
};

/// Kernel given by samples at nonnegative grid offsets: samples[i + (M+1)*j]
/// holds J(i*h, j*h). The kernel is assumed even in each offset component, so
/// nonnegative offsets determine it everywhere.
struct TabulatedKernel {
    int M = 0;
    std::vector<double> samples;
};

using KernelSpec = std::variant<GaussianKernel, TabulatedKernel>;

/// Point evaluation. Only analytic kernels support this; a TabulatedKernel
/// throws (its values exist only at sampled offsets).
double eval_kernel(const KernelSpec& spec, double dx, double dy);

/// Kernel samples at offsets (i*h, j*h), 0 <= i,j <= M, ready for the
/// convolution plan. Values must be finite and nonnegative.
struct KernelTable {
    int M = 0;
    std::vector<double> values;

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) + static_cast<std::size_t>(M + 1) * j];
    }
};

/// Samples the kernel on the grid's offset lattice. A TabulatedKernel must
/// match the grid's M exactly.
KernelTable sample_kernel(const GridSpec& grid, const KernelSpec& spec);

/// Reads a kernel table from a plain-text stream: first line M, then (M+1)
/// rows of (M+1) nonnegative reals (row j = offsets (0..M)*h at j*h).
TabulatedKernel load_kernel_table(std::istream& in);
TabulatedKernel load_kernel_table_file(const std::string& path);

} // namespace nlch
