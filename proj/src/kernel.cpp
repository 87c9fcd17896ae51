#include "nlch/kernel.hpp"
#include "nlch/errors.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace nlch {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_gaussian(const GaussianKernel& g) {
    if (!(g.delta > 0.0)) throw ConfigError("kernel: Gaussian width delta must be positive");
}

} // namespace

double eval_kernel(const KernelSpec& spec, double dx, double dy) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, GaussianKernel>) {
                validate_gaussian(k);
                const double d2 = k.delta * k.delta;
                return 4.0 / (kPi * d2 * d2) * std::exp(-(dx * dx + dy * dy) / d2);
            } else {
                throw ConfigError("kernel: tabulated kernels are sampled, not point-evaluated");
            }
        },
        spec);
}

KernelTable sample_kernel(const GridSpec& grid, const KernelSpec& spec) {
    KernelTable table;
    table.M = grid.M;
    const int n = grid.M + 1;
    table.values.resize(static_cast<std::size_t>(n) * n);

    if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
        validate_gaussian(*g);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                table.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j] =
                    eval_kernel(spec, i * grid.h, j * grid.h);
            }
        }
    } else {
        const auto& t = std::get<TabulatedKernel>(spec);
        if (t.M != grid.M) throw ConfigError("kernel: tabulated sample count does not match grid");
        if (t.samples.size() != static_cast<std::size_t>(n) * n)
            throw ConfigError("kernel: tabulated sample vector has wrong length");
        table.values = t.samples;
    }

    for (double v : table.values) {
        if (!std::isfinite(v)) throw ConfigError("kernel: table contains a non-finite value");
        if (v < 0.0) throw ConfigError("kernel: table contains a negative value");
    }
    return table;
}

TabulatedKernel load_kernel_table(std::istream& in) {
    TabulatedKernel t;
    if (!(in >> t.M)) throw ConfigError("kernel table: missing sample count on first line");
    if (t.M < 0) throw ConfigError("kernel table: negative sample count");
    const std::size_t n = static_cast<std::size_t>(t.M) + 1;
    t.samples.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double v;
            if (!(in >> v)) {
                std::ostringstream msg;
                msg << "kernel table: expected " << n * n << " values, stream ended at entry " << (j * n + i);
                throw ConfigError(msg.str());
            }
            if (!std::isfinite(v) || v < 0.0)
                throw ConfigError("kernel table: entries must be finite and nonnegative");
            t.samples[i + n * j] = v;
        }
    }
    return t;
}

TabulatedKernel load_kernel_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("kernel table: cannot open '" + path + "'");
    return load_kernel_table(in);
}

} // namespace nlch
