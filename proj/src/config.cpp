#include "nlch/config.hpp"
#include "nlch/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace nlch {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const char* want, const std::string& got) {
    throw ConfigError("key '" + key + "': expected " + want + ", got '" + got + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
        bad_value(key, "a number", v);
    return x;
}

long parse_long(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
        bad_value(key, "an integer", v);
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    if (!v.empty() && v[0] == '-') bad_value(key, "a non-negative integer", v);
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
        bad_value(key, "a non-negative integer", v);
    return static_cast<std::uint64_t>(x);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

const char* scheme_name(Scheme s) { return s == Scheme::sav1 ? "sav1" : "sav2"; }
const char* predictor_name(Predictor p) {
    return p == Predictor::extrapolate ? "extrapolate" : "solve";
}
const char* solver_name(SolverKind s) { return s == SolverKind::fast_cg ? "fast" : "direct"; }

RunConfig parse_config(std::istream& in, std::vector<std::string>* defaulted) {
    RunConfig c;
    std::set<std::string> seen;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");

        if (key == "domain.L") c.L = parse_double(key, value);
        else if (key == "grid.M") {
            const long m = parse_long(key, value);
            if (m < 2 || m > 1'000'000) bad_value(key, "an integer in [2, 1000000]", value);
            c.M = static_cast<int>(m);
        } else if (key == "time.dt") c.dt = parse_double(key, value);
        else if (key == "time.T") c.T = parse_double(key, value);
        else if (key == "model.epsilon") c.epsilon = parse_double(key, value);
        else if (key == "model.mobility") c.mobility = parse_double(key, value);
        else if (key == "model.delta") c.delta = parse_double(key, value);
        else if (key == "model.C0") c.C0 = parse_double(key, value);
        else if (key == "scheme") {
            if (value == "sav1") c.scheme = Scheme::sav1;
            else if (value == "sav2") c.scheme = Scheme::sav2;
            else bad_value(key, "one of sav1|sav2", value);
        } else if (key == "predictor") {
            if (value == "extrapolate") c.predictor = Predictor::extrapolate;
            else if (value == "solve") c.predictor = Predictor::solve;
            else bad_value(key, "one of extrapolate|solve", value);
        } else if (key == "solver") {
            if (value == "fast") c.solver = SolverKind::fast_cg;
            else if (value == "direct") c.solver = SolverKind::direct;
            else bad_value(key, "one of fast|direct", value);
        } else if (key == "cg.tol") c.cg_tol = parse_double(key, value);
        else if (key == "cg.max_iter") {
            c.cg_max_iter = parse_long(key, value);
            if (c.cg_max_iter < 1) bad_value(key, "a positive integer", value);
        } else if (key == "init") {
            if (value != "smooth-sine" && value != "two-bubbles" && value != "random")
                bad_value(key, "one of smooth-sine|two-bubbles|random", value);
            c.init = value;
        } else if (key == "init.seed") c.seed = parse_u64(key, value);
        else if (key == "output.dir") c.output_dir = value;
        else if (key == "output.snapshot_every") {
            c.snapshot_every = parse_long(key, value);
            if (c.snapshot_every < 0) bad_value(key, "a non-negative integer", value);
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (defaulted) {
        static const char* keys[] = {
            "domain.L", "grid.M", "time.dt", "time.T", "model.epsilon", "model.mobility",
            "model.delta", "model.C0", "scheme", "predictor", "solver", "cg.tol",
            "cg.max_iter", "init", "init.seed", "output.dir", "output.snapshot_every"};
        for (const char* k : keys)
            if (!seen.count(k)) defaulted->push_back(k);
    }
    return c;
}

RunConfig parse_config(const std::string& text, std::vector<std::string>* defaulted) {
    std::istringstream in(text);
    return parse_config(in, defaulted);
}

RunConfig parse_config_file(const std::string& path, std::vector<std::string>* defaulted) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in, defaulted);
}

RunConfig parse_config_file_over(const std::string& path, const RunConfig& base) {
    std::vector<std::string> defaulted;
    RunConfig c = parse_config_file(path, &defaulted);
    for (const std::string& key : defaulted) {
        if (key == "domain.L") c.L = base.L;
        else if (key == "grid.M") c.M = base.M;
        else if (key == "time.dt") c.dt = base.dt;
        else if (key == "time.T") c.T = base.T;
        else if (key == "model.epsilon") c.epsilon = base.epsilon;
        else if (key == "model.mobility") c.mobility = base.mobility;
        else if (key == "model.delta") c.delta = base.delta;
        else if (key == "model.C0") c.C0 = base.C0;
        else if (key == "scheme") c.scheme = base.scheme;
        else if (key == "predictor") c.predictor = base.predictor;
        else if (key == "solver") c.solver = base.solver;
        else if (key == "cg.tol") c.cg_tol = base.cg_tol;
        else if (key == "cg.max_iter") c.cg_max_iter = base.cg_max_iter;
        else if (key == "init") c.init = base.init;
        else if (key == "init.seed") c.seed = base.seed;
        else if (key == "output.dir") c.output_dir = base.output_dir;
        else if (key == "output.snapshot_every") c.snapshot_every = base.snapshot_every;
    }
    return c;
}

std::string render_config(const RunConfig& c) {
    std::ostringstream out;
    out << "# nlch-config v" << c.version << '\n'
        << "domain.L = " << num(c.L) << '\n'
        << "grid.M = " << c.M << '\n'
        << "time.dt = " << num(c.dt) << '\n'
        << "time.T = " << num(c.T) << '\n'
        << "model.epsilon = " << num(c.epsilon) << '\n'
        << "model.mobility = " << num(c.mobility) << '\n'
        << "model.delta = " << num(c.delta) << '\n'
        << "model.C0 = " << num(c.C0) << '\n'
        << "scheme = " << scheme_name(c.scheme) << '\n'
        << "predictor = " << predictor_name(c.predictor) << '\n'
        << "solver = " << solver_name(c.solver) << '\n'
        << "cg.tol = " << num(c.cg_tol) << '\n'
        << "cg.max_iter = " << c.cg_max_iter << '\n'
        << "init = " << c.init << '\n'
        << "init.seed = " << c.seed << '\n';
    if (!c.output_dir.empty()) out << "output.dir = " << c.output_dir << '\n';
    out << "output.snapshot_every = " << c.snapshot_every << '\n';
    return out.str();
}

RunConfig preset_config(Preset preset, bool paper_scale) {
    const RunSpec rs = make_example_run(preset, paper_scale);
    RunConfig c;
    c.L = rs.grid.L;
    c.M = rs.grid.M;
    c.dt = rs.params.dt;
    c.T = rs.T;
    c.epsilon = rs.params.epsilon;
    c.mobility = rs.params.mobility;
    c.delta = std::get<GaussianKernel>(rs.kernel).delta;
    c.C0 = rs.params.C0;
    c.scheme = rs.scheme;
    c.predictor = rs.params.predictor;
    c.solver = rs.solver;
    c.cg_tol = rs.cg_tol;
    c.cg_max_iter = rs.cg_max_iter;
    switch (preset) {
    case Preset::example1: c.init = "smooth-sine"; break;
    case Preset::example2: c.init = "two-bubbles"; break;
    case Preset::example3: c.init = "random"; break;
    }
    c.snapshot_every = rs.snapshot_every;
    return c;
}

RunSpec to_run_spec(const RunConfig& c) {
    RunSpec rs;
    rs.grid = make_grid(c.L, c.M);
    rs.kernel = GaussianKernel{c.delta};
    rs.params.epsilon = c.epsilon;
    rs.params.mobility = c.mobility;
    rs.params.dt = c.dt;
    rs.params.C0 = c.C0;
    rs.params.predictor = c.predictor;
    rs.scheme = c.scheme;
    rs.solver = c.solver;
    rs.T = c.T;
    rs.cg_tol = c.cg_tol;
    rs.cg_max_iter = c.cg_max_iter;
    rs.snapshot_every = c.snapshot_every;
    if (c.init == "smooth-sine") rs.phi0 = init_smooth_sine(rs.grid);
    else if (c.init == "two-bubbles") rs.phi0 = init_two_bubbles(rs.grid, 0.36, 0.4, c.epsilon);
    else if (c.init == "random") rs.phi0 = init_random_uniform(rs.grid, 0.1, c.seed);
    else throw ConfigError("key 'init': expected one of smooth-sine|two-bubbles|random, got '" +
                           c.init + "'");
    return rs;
}

} // namespace nlch
