#pragma once

#include "nlch/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlch {

/// Flat key=value description of a run; the canonical serialized form.
/// Keys: domain.L, grid.M, time.dt, time.T, model.epsilon, model.mobility,
/// model.delta, model.C0, scheme, predictor, solver, cg.tol, cg.max_iter,
/// init, init.seed, output.dir, output.snapshot_every.
struct RunConfig {
    int version = 1;

    double L = 1.0;
    int M = 64;
    double dt = 1e-3;
    double T = 1.0;
    double epsilon = 0.02;
    double mobility = 1.0;
    double delta = 0.05;
    double C0 = 1.0;
    Scheme scheme = Scheme::sav2;
    Predictor predictor = Predictor::extrapolate;
    SolverKind solver = SolverKind::fast_cg;
    double cg_tol = 1e-10;
    long cg_max_iter = 5000;
    std::string init = "random"; ///< smooth-sine | two-bubbles | random
    std::uint64_t seed = 1;
    std::string output_dir;
    long snapshot_every = 0;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses the flat config grammar ('#' comments, one "key = value" per line).
/// Unknown or duplicate keys, missing '=', and bad values are ConfigErrors
/// carrying the line number or key name. Keys absent from the text keep their
/// defaults; if `defaulted` is given, their names are appended to it.
RunConfig parse_config(std::istream& in, std::vector<std::string>* defaulted = nullptr);
RunConfig parse_config(const std::string& text, std::vector<std::string>* defaulted = nullptr);
RunConfig parse_config_file(const std::string& path, std::vector<std::string>* defaulted = nullptr);

/// Parses a file on top of an existing config: keys present in the file
/// override `base`, absent keys keep the base values.
RunConfig parse_config_file_over(const std::string& path, const RunConfig& base);

/// Canonical text form: fixed key order, 17-significant-digit numbers.
/// parse_config(render_config(c)) == c for every valid config.
std::string render_config(const RunConfig& c);

/// The named example setups as configs (see make_example_run).
RunConfig preset_config(Preset preset, bool paper_scale = false);

/// Expands a config into a runnable spec, building the initial field named
/// by `init`.
RunSpec to_run_spec(const RunConfig& c);

const char* scheme_name(Scheme s);
const char* predictor_name(Predictor p);
const char* solver_name(SolverKind s);

} // namespace nlch
