#include "nlch/snapshot.hpp"
#include "nlch/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nlch {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    return out;
}

} // namespace

void write_snapshot(std::ostream& out, double t, const Field& phi) {
    const int M = phi.grid.M;
    out << "# nlch-snapshot v1 t=" << num(t) << " M=" << M << " L=" << num(phi.grid.L) << '\n';
    for (int j = 0; j <= M; ++j) {
        for (int i = 0; i <= M; ++i) {
            if (i) out << ' ';
            out << num(phi.at(i, j));
        }
        out << '\n';
    }
    if (!out) throw ConfigError("snapshot write failed");
}

void write_snapshot(const std::string& path, double t, const Field& phi) {
    auto out = open_out(path);
    write_snapshot(out, t, phi);
    out.close();
    if (!out) throw ConfigError("snapshot write failed: " + path);
}

Snapshot read_snapshot(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("snapshot: missing header");
    double t = 0.0, L = 0.0;
    int M = 0;
    if (std::sscanf(header.c_str(), "# nlch-snapshot v1 t=%lf M=%d L=%lf", &t, &M, &L) != 3)
        throw ConfigError("snapshot: malformed header: " + header);
    Snapshot snap;
    snap.t = t;
    snap.phi = Field(make_grid(L, M));
    for (int j = 0; j <= M; ++j)
        for (int i = 0; i <= M; ++i)
            if (!(in >> snap.phi.at(i, j)))
                throw ConfigError("snapshot: truncated data at row " + std::to_string(j));
    snap.phi.require_finite("snapshot");
    return snap;
}

Snapshot read_snapshot_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot: " + path);
    return read_snapshot(in);
}

void write_telemetry(std::ostream& out, const std::vector<EnergySample>& samples) {
    out << "step,t,mass,r,sqrtE1C0,modified_energy,original_energy,cg_iters\n";
    for (const auto& s : samples)
        out << s.step << ',' << num(s.t) << ',' << num(s.mass) << ',' << num(s.r) << ','
            << num(s.sqrtE1C0) << ',' << num(s.modified_energy) << ','
            << num(s.original_energy) << ',' << s.cg_iterations << '\n';
    if (!out) throw ConfigError("telemetry write failed");
}

void write_telemetry(const std::string& path, const std::vector<EnergySample>& samples) {
    auto out = open_out(path);
    write_telemetry(out, samples);
    out.close();
    if (!out) throw ConfigError("telemetry write failed: " + path);
}

} // namespace nlch
