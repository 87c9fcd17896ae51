// Black-box checks of the command-line tool: exit codes, output files, and
// determinism. Invoked with the binary path as argv[1]; returns the number
// of failed checks.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
    std::printf("%s %s\n", ok ? "[ok]  " : "[FAIL]", what.c_str());
    if (!ok) ++g_failures;
}

int run_command(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli-binary>\n", argv[0]);
        return 1;
    }
    const std::string bin = std::string("\"") + argv[1] + "\"";
    const std::string quiet = " > /dev/null 2>&1";

    fs::path scratch = fs::current_path() / "cli_exit_scratch";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    // --- argument handling ---------------------------------------------
    expect(run_command(bin + " --help" + quiet) == 0, "--help exits 0");
    expect(run_command(bin + quiet) == 1, "missing subcommand exits 1");
    expect(run_command(bin + " --no-such-flag" + quiet) == 1, "unknown flag exits 1");
    expect(run_command(bin + " run --preset nonsense" + quiet) == 1,
           "unknown preset name exits 1");

    // --- configuration errors ------------------------------------------
    expect(run_command(bin + " run --config " + (scratch / "missing.cfg").string() + quiet) == 1,
           "nonexistent config file exits 1");

    write_file(scratch / "unknown_key.cfg", "grid.M = 8\nnot.a.key = 1\n");
    expect(run_command(bin + " run --config " + (scratch / "unknown_key.cfg").string() + quiet) ==
               1,
           "unknown config key exits 1");

    write_file(scratch / "bad_scheme.cfg", "scheme = sav3\n");
    expect(run_command(bin + " run --config " + (scratch / "bad_scheme.cfg").string() + quiet) ==
               1,
           "unknown scheme value exits 1");

    // --- solver failure ------------------------------------------------
    // One step with a starved iteration budget on a stiff setup: the
    // matrix-free solver cannot converge and must report a solver error.
    write_file(scratch / "starved.cfg",
               "grid.M = 16\n"
               "time.dt = 1\n"
               "time.T = 1\n"
               "model.epsilon = 0.1\n"
               "model.delta = 0.05\n"
               "scheme = sav1\n"
               "cg.tol = 1e-12\n"
               "cg.max_iter = 1\n"
               "init = smooth-sine\n");
    expect(run_command(bin + " run --config " + (scratch / "starved.cfg").string() + " --out " +
                       (scratch / "starved_out").string() + quiet) == 2,
           "starved iteration budget exits 2");

    // --- a healthy run -------------------------------------------------
    write_file(scratch / "ok.cfg",
               "grid.M = 8\n"
               "time.dt = 1e-3\n"
               "time.T = 4e-3\n"
               "model.epsilon = 0.1\n"
               "model.delta = 0.5\n"
               "scheme = sav2\n"
               "cg.tol = 1e-11\n"
               "init = smooth-sine\n"
               "output.snapshot_every = 2\n");
    const fs::path out1 = scratch / "run1";
    const fs::path out2 = scratch / "run2";
    const std::string base_cmd = bin + " run --config " + (scratch / "ok.cfg").string();
    expect(run_command(base_cmd + " --out " + out1.string() + quiet) == 0,
           "healthy run exits 0");
    expect(fs::exists(out1 / "config.txt"), "run writes config.txt");
    expect(fs::exists(out1 / "telemetry.csv"), "run writes telemetry.csv");
    expect(fs::exists(out1 / "snapshot_000000.txt") && fs::exists(out1 / "snapshot_000002.txt") &&
               fs::exists(out1 / "snapshot_000004.txt"),
           "run writes the scheduled snapshots");

    {
        std::ifstream in(out1 / "telemetry.csv");
        std::string header;
        std::getline(in, header);
        expect(header == "step,t,mass,r,sqrtE1C0,modified_energy,original_energy,cg_iters",
               "telemetry header is canonical");
        int rows = 0;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++rows;
        expect(rows == 5, "telemetry has one row per step plus the initial state");
    }

    expect(run_command(base_cmd + " --out " + out2.string() + quiet) == 0,
           "identical rerun exits 0");
    expect(read_file(out1 / "telemetry.csv") == read_file(out2 / "telemetry.csv"),
           "telemetry is byte-identical across reruns");
    expect(read_file(out1 / "snapshot_000004.txt") == read_file(out2 / "snapshot_000004.txt"),
           "final snapshot is byte-identical across reruns");

    // The recorded config reparses to an equivalent run (spot check).
    expect(read_file(out1 / "config.txt").find("scheme = sav2") != std::string::npos,
           "recorded config keeps the requested scheme");

    // --- preset path ----------------------------------------------------
    expect(run_command(bin + " run --preset example1 --out " + (scratch / "preset_out").string() +
                       quiet) == 0,
           "preset run exits 0");

    if (g_failures == 0) fs::remove_all(scratch);
    std::printf("%d failure(s)\n", g_failures);
    return g_failures;
}
