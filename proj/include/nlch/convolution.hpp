#pragma once

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace nlch {

class ConvolutionPlan;

/// Per-call scratch for plan application. A plan's internal scratch makes the
/// plain overloads non-reentrant; concurrent callers hand each thread its own
/// workspace instead. Created by ConvolutionPlan::make_workspace().
class ConvWorkspace {
public:
    ConvWorkspace();
    ConvWorkspace(ConvWorkspace&&) noexcept;
    ConvWorkspace& operator=(ConvWorkspace&&) noexcept;
    ~ConvWorkspace();

private:
    friend class ConvolutionPlan;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Fast discrete-convolution operator for an even interaction kernel on the
/// node grid.
///
/// The weighted convolution
///     (J*v)_ij = h^2 * sum_{m,n} w_mn * J(|m-i|h, |n-j|h) * v_mn
/// is a block-Toeplitz matrix with Toeplitz blocks acting on the weighted
/// field. Each symmetric Toeplitz level embeds in a circulant of size
/// P >= 2M+1, giving a block-circulant matrix with circulant blocks that the
/// 2D DFT diagonalizes. One application is: weight, zero-pad to P x P,
/// forward FFT, multiply by the kernel symbol, inverse FFT, read the leading
/// (M+1) x (M+1) block. O(P^2 log P) time, O(P^2) memory.
///
/// The symbol is the 2D DFT of the wrapped kernel image
///     c[p][q] = J(iota(p) h, iota(q) h),  iota(p) = p (p <= M),
///               P - p (p >= P - M),  else the entry is zero,
/// and is real up to roundoff because the image is even along each axis.
class ConvolutionPlan {
public:
    /// padded_size = 0 picks the default P = 2M+2. Any P >= 2M+1 is exact;
    /// see fft_friendly_size() for cheap-transform choices.
    ConvolutionPlan(const GridSpec& grid, const KernelTable& table, int padded_size = 0);
    ConvolutionPlan(ConvolutionPlan&&) noexcept;
    ConvolutionPlan& operator=(ConvolutionPlan&&) noexcept;
    ~ConvolutionPlan();

    const GridSpec& grid() const;
    int padded_size() const;

    /// Pointwise diagonal (J*1)_ij, computed at build time by convolving the
    /// all-ones field.
    const Field& jstar1() const;

    ConvWorkspace make_workspace() const;

    /// (J*v) through the padded FFT route.
    Field convolve(const Field& v) const;
    Field convolve(const Field& v, ConvWorkspace& ws) const;

    /// L v = (J*1) v - (J*v). Annihilates constants; self-adjoint and
    /// positive semidefinite in the weighted inner product.
    Field apply_nonlocal(const Field& v) const;
    Field apply_nonlocal(const Field& v, ConvWorkspace& ws) const;

    /// v + c * L(L v), the operator behind every implicit solve. Requires
    /// c >= 0 (the schemes never produce a negative coefficient).
    Field apply_stiffness(const Field& v, double c) const;
    Field apply_stiffness(const Field& v, double c, ConvWorkspace& ws) const;

    /// Copies for verification: the P x P wrapped kernel image and its DFT.
    std::vector<double> wrapped_image() const;
    std::vector<std::complex<double>> symbol() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Reference convolution by direct summation, O(N^2). Oracle for the FFT
/// route; no transforms involved.
Field dense_convolve(const GridSpec& grid, const KernelTable& table, const Field& v);

/// Smallest integer >= n with no prime factor beyond 5. FFTs of such sizes
/// stay on fast code paths.
int fft_friendly_size(int n);

} // namespace nlch
