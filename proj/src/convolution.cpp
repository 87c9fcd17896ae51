#include "nlch/convolution.hpp"
#include "nlch/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace nlch {

namespace {

struct FftwBuffer {
    fftw_complex* p = nullptr;
    std::size_t n = 0;

    explicit FftwBuffer(std::size_t count) : n(count) {
        p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
        if (!p) throw std::bad_alloc();
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    ~FftwBuffer() { fftw_free(p); }

    void zero() { std::memset(p, 0, sizeof(fftw_complex) * n); }
};

// Offset recovered from a circulant index: p for the leading band, P-p for
// the trailing band, -1 in the zero gap between them.
inline int wrap_offset(int p, int M, int P) {
    if (p <= M) return p;
    if (p >= P - M) return P - p;
    return -1;
}

} // namespace

struct ConvWorkspace::Impl {
    FftwBuffer a;
    FftwBuffer b;
    explicit Impl(std::size_t count) : a(count), b(count) {}
};

struct ConvolutionPlan::Impl {
    GridSpec grid;
    int P = 0;
    std::vector<double> image;                 // wrapped kernel, P*P
    std::vector<std::complex<double>> symbol;  // DFT of image, P*P
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::unique_ptr<ConvWorkspace::Impl> scratch;
    Field ones_image;                          // (J*1)

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }

    // Weight, zero-pad, transform, multiply by the symbol, transform back,
    // extract the leading block scaled by h^2 / P^2.
    void run(const Field& v, ConvWorkspace::Impl& ws, Field& out) const {
        const int M = grid.M;
        const int n = M + 1;
        fftw_complex* a = ws.a.p;
        fftw_complex* b = ws.b.p;

        ws.a.zero();
        for (int j = 0; j < n; ++j) {
            const double wy = line_weight(j, M);
            for (int i = 0; i < n; ++i) {
                a[static_cast<std::size_t>(i) + static_cast<std::size_t>(P) * j][0] =
                    line_weight(i, M) * wy * v.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j];
            }
        }

        fftw_execute_dft(fwd, a, b);
        for (std::size_t k = 0; k < symbol.size(); ++k) {
            const double re = b[k][0], im = b[k][1];
            const double sr = symbol[k].real(), si = symbol[k].imag();
            b[k][0] = re * sr - im * si;
            b[k][1] = re * si + im * sr;
        }
        fftw_execute_dft(bwd, b, a);

        const double scale = grid.h * grid.h / (static_cast<double>(P) * P);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                out.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j] =
                    scale * a[static_cast<std::size_t>(i) + static_cast<std::size_t>(P) * j][0];
            }
        }
    }
};

ConvWorkspace::ConvWorkspace() = default;
ConvWorkspace::ConvWorkspace(ConvWorkspace&&) noexcept = default;
ConvWorkspace& ConvWorkspace::operator=(ConvWorkspace&&) noexcept = default;
ConvWorkspace::~ConvWorkspace() = default;

ConvolutionPlan::ConvolutionPlan(const GridSpec& grid, const KernelTable& table, int padded_size)
    : impl_(std::make_unique<Impl>()) {
    if (table.M != grid.M) throw ConfigError("convolution: kernel table does not match grid");
    const int M = grid.M;
    const int P = padded_size == 0 ? 2 * M + 2 : padded_size;
    if (P < 2 * M + 1) throw ConfigError("convolution: padded size must be at least 2M+1");

    impl_->grid = grid;
    impl_->P = P;

    const std::size_t PP = static_cast<std::size_t>(P) * P;
    impl_->image.assign(PP, 0.0);
    for (int q = 0; q < P; ++q) {
        const int oq = wrap_offset(q, M, P);
        if (oq < 0) continue;
        for (int p = 0; p < P; ++p) {
            const int op = wrap_offset(p, M, P);
            if (op < 0) continue;
            impl_->image[static_cast<std::size_t>(p) + static_cast<std::size_t>(P) * q] = table.at(op, oq);
        }
    }

    impl_->scratch = std::make_unique<ConvWorkspace::Impl>(PP);
    fftw_complex* a = impl_->scratch->a.p;
    fftw_complex* b = impl_->scratch->b.p;
    // FFTW_ESTIMATE keeps planning deterministic (FFTW_MEASURE picks
    // algorithms by timing, which would make reruns differ in the last bits).
    impl_->fwd = fftw_plan_dft_2d(P, P, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_2d(P, P, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!impl_->fwd || !impl_->bwd) throw SolverError("convolution: FFT planning failed");

    impl_->scratch->a.zero();
    for (std::size_t k = 0; k < PP; ++k) a[k][0] = impl_->image[k];
    fftw_execute_dft(impl_->fwd, a, b);

    impl_->symbol.resize(PP);
    double max_re = 0.0, max_im = 0.0;
    for (std::size_t k = 0; k < PP; ++k) {
        impl_->symbol[k] = {b[k][0], b[k][1]};
        max_re = std::max(max_re, std::abs(b[k][0]));
        max_im = std::max(max_im, std::abs(b[k][1]));
    }
    // The image is even along each axis, so its DFT is real; anything beyond
    // roundoff means the embedding is wrong.
    if (max_im > 1e-12 * std::max(max_re, 1e-300))
        throw InvariantError("convolution: kernel symbol has a non-trivial imaginary part");

    Field ones(grid, 1.0);
    impl_->ones_image = Field(grid);
    impl_->run(ones, *impl_->scratch, impl_->ones_image);
}

ConvolutionPlan::ConvolutionPlan(ConvolutionPlan&&) noexcept = default;
ConvolutionPlan& ConvolutionPlan::operator=(ConvolutionPlan&&) noexcept = default;
ConvolutionPlan::~ConvolutionPlan() = default;

const GridSpec& ConvolutionPlan::grid() const { return impl_->grid; }
int ConvolutionPlan::padded_size() const { return impl_->P; }
const Field& ConvolutionPlan::jstar1() const { return impl_->ones_image; }

ConvWorkspace ConvolutionPlan::make_workspace() const {
    ConvWorkspace ws;
    ws.impl_ = std::make_unique<ConvWorkspace::Impl>(static_cast<std::size_t>(impl_->P) * impl_->P);
    return ws;
}

Field ConvolutionPlan::convolve(const Field& v) const {
    if (!(v.grid == impl_->grid)) throw ConfigError("convolution: field does not match grid");
    Field out(impl_->grid);
    impl_->run(v, *impl_->scratch, out);
    return out;
}

Field ConvolutionPlan::convolve(const Field& v, ConvWorkspace& ws) const {
    if (!(v.grid == impl_->grid)) throw ConfigError("convolution: field does not match grid");
    if (!ws.impl_ || ws.impl_->a.n != static_cast<std::size_t>(impl_->P) * impl_->P)
        throw ConfigError("convolution: workspace does not belong to this plan");
    Field out(impl_->grid);
    impl_->run(v, *ws.impl_, out);
    return out;
}

Field ConvolutionPlan::apply_nonlocal(const Field& v) const {
    Field jv = convolve(v);
    const Field& d = impl_->ones_image;
    for (std::size_t k = 0; k < jv.values.size(); ++k)
        jv.values[k] = d.values[k] * v.values[k] - jv.values[k];
    return jv;
}

Field ConvolutionPlan::apply_nonlocal(const Field& v, ConvWorkspace& ws) const {
    Field jv = convolve(v, ws);
    const Field& d = impl_->ones_image;
    for (std::size_t k = 0; k < jv.values.size(); ++k)
        jv.values[k] = d.values[k] * v.values[k] - jv.values[k];
    return jv;
}

Field ConvolutionPlan::apply_stiffness(const Field& v, double c) const {
    if (c < 0.0) throw ConfigError("convolution: stiffness coefficient must be nonnegative");
    if (c == 0.0) return v;
    Field w = apply_nonlocal(apply_nonlocal(v));
    for (std::size_t k = 0; k < w.values.size(); ++k)
        w.values[k] = v.values[k] + c * w.values[k];
    return w;
}

Field ConvolutionPlan::apply_stiffness(const Field& v, double c, ConvWorkspace& ws) const {
    if (c < 0.0) throw ConfigError("convolution: stiffness coefficient must be nonnegative");
    if (c == 0.0) return v;
    Field w = apply_nonlocal(apply_nonlocal(v, ws), ws);
    for (std::size_t k = 0; k < w.values.size(); ++k)
        w.values[k] = v.values[k] + c * w.values[k];
    return w;
}

std::vector<double> ConvolutionPlan::wrapped_image() const { return impl_->image; }
std::vector<std::complex<double>> ConvolutionPlan::symbol() const { return impl_->symbol; }

Field dense_convolve(const GridSpec& grid, const KernelTable& table, const Field& v) {
    if (table.M != grid.M) throw ConfigError("convolution: kernel table does not match grid");
    if (!(v.grid == grid)) throw ConfigError("convolution: field does not match grid");
    const int M = grid.M;
    const double h2 = grid.h * grid.h;
    Field out(grid);
    for (int j = 0; j <= M; ++j) {
        for (int i = 0; i <= M; ++i) {
            double acc = 0.0;
            for (int n = 0; n <= M; ++n) {
                const double wy = line_weight(n, M);
                for (int m = 0; m <= M; ++m) {
                    acc += line_weight(m, M) * wy * table.at(std::abs(m - i), std::abs(n - j)) * v.at(m, n);
                }
            }
            out.at(i, j) = h2 * acc;
        }
    }
    return out;
}

int fft_friendly_size(int n) {
    if (n < 1) throw ConfigError("fft_friendly_size: n must be positive");
    for (int c = n;; ++c) {
        int r = c;
        for (int f : {2, 3, 5})
            while (r % f == 0) r /= f;
        if (r == 1) return c;
    }
}

} // namespace nlch
