#pragma once

#include "nlch/grid.hpp"
#include "nlch/sav.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nlch {

/// Plain-text grid-function snapshot.
/// Line 1: "# nlch-snapshot v1 t=<t> M=<M> L=<L>"; then M+1 data lines, line
/// j holding the row values phi(0,j) .. phi(M,j) space-separated. Numbers are
/// printed with 17 significant digits, so a write/read round trip is
/// bit-exact.
void write_snapshot(std::ostream& out, double t, const Field& phi);
void write_snapshot(const std::string& path, double t, const Field& phi);

struct Snapshot {
    double t = 0.0;
    Field phi;
};

Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot_file(const std::string& path);

/// Per-step telemetry as CSV with header
/// "step,t,mass,r,sqrtE1C0,modified_energy,original_energy,cg_iters".
void write_telemetry(std::ostream& out, const std::vector<EnergySample>& samples);
void write_telemetry(const std::string& path, const std::vector<EnergySample>& samples);

} // namespace nlch
