#include "doctest.h"

#include "nlch/config.hpp"
#include "nlch/errors.hpp"
#include "nlch/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using namespace nlch;

namespace {

bool mentions(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("parsing reads keys, keeps defaults, and reports what defaulted") {
    std::vector<std::string> defaulted;
    RunConfig c = parse_config(std::string("grid.M = 32\ntime.dt = 0.01\nscheme = sav1\n"),
                               &defaulted);
    CHECK(c.M == 32);
    CHECK(c.dt == doctest::Approx(0.01));
    CHECK(c.scheme == Scheme::sav1);
    // Untouched keys keep their defaults and are reported.
    CHECK(c.L == doctest::Approx(1.0));
    CHECK(c.solver == SolverKind::fast_cg);
    CHECK(std::find(defaulted.begin(), defaulted.end(), "domain.L") != defaulted.end());
    CHECK(std::find(defaulted.begin(), defaulted.end(), "model.epsilon") != defaulted.end());
    CHECK(std::find(defaulted.begin(), defaulted.end(), "grid.M") == defaulted.end());
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text =
        "# a full-line comment\n"
        "\n"
        "grid.M = 16   # trailing comment\n"
        "   \t  \n"
        "init = smooth-sine\n";
    RunConfig c = parse_config(text);
    CHECK(c.M == 16);
    CHECK(c.init == "smooth-sine");
}

TEST_CASE("parse errors carry the line number") {
    SUBCASE("unknown key") {
        try {
            parse_config(std::string("grid.M = 16\nnot.a.key = 3\n"));
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "line 2"));
            CHECK(mentions(e, "not.a.key"));
        }
    }
    SUBCASE("duplicate key") {
        try {
            parse_config(std::string("grid.M = 16\ngrid.M = 32\n"));
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "line 2"));
            CHECK(mentions(e, "duplicate"));
        }
    }
    SUBCASE("missing separator") {
        try {
            parse_config(std::string("grid.M 16\n"));
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "line 1"));
        }
    }
}

TEST_CASE("bad values name the offending key") {
    SUBCASE("unknown scheme lists the alternatives") {
        try {
            parse_config(std::string("scheme = sav3\n"));
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "scheme"));
            CHECK(mentions(e, "sav1"));
            CHECK(mentions(e, "sav2"));
        }
    }
    SUBCASE("non-numeric count") {
        try {
            parse_config(std::string("grid.M = twelve\n"));
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "grid.M"));
        }
    }
    SUBCASE("out-of-range mesh") {
        CHECK_THROWS_AS(parse_config(std::string("grid.M = 1\n")), ConfigError);
        CHECK_THROWS_AS(parse_config(std::string("grid.M = -8\n")), ConfigError);
    }
    SUBCASE("bad solver and predictor") {
        CHECK_THROWS_AS(parse_config(std::string("solver = magic\n")), ConfigError);
        CHECK_THROWS_AS(parse_config(std::string("predictor = psychic\n")), ConfigError);
        CHECK_THROWS_AS(parse_config(std::string("init = plasma\n")), ConfigError);
    }
    SUBCASE("nonpositive iteration budget") {
        CHECK_THROWS_AS(parse_config(std::string("cg.max_iter = 0\n")), ConfigError);
        CHECK_THROWS_AS(parse_config(std::string("output.snapshot_every = -1\n")), ConfigError);
    }
}

TEST_CASE("render and parse are inverse on a non-default config") {
    RunConfig c;
    c.L = 2.0;
    c.M = 48;
    c.dt = 2.5e-4;
    c.T = 0.125;
    c.epsilon = 0.07;
    c.mobility = 0.5;
    c.delta = 0.033;
    c.C0 = 3.0;
    c.scheme = Scheme::sav1;
    c.predictor = Predictor::solve;
    c.solver = SolverKind::direct;
    c.cg_tol = 1e-9;
    c.cg_max_iter = 777;
    c.init = "two-bubbles";
    c.seed = 123456789012345ull;
    c.output_dir = "out/some-run";
    c.snapshot_every = 25;

    std::string text = render_config(c);
    RunConfig back = parse_config(text);
    CHECK(back == c);
    // Rendering is deterministic.
    CHECK(render_config(back) == text);
}

TEST_CASE("rendered text round-trips fractional doubles bit-exactly") {
    RunConfig c;
    c.dt = 1.0 / 3.0;
    c.epsilon = std::nextafter(0.02, 1.0);
    RunConfig back = parse_config(render_config(c));
    CHECK(back.dt == c.dt);
    CHECK(back.epsilon == c.epsilon);
}

TEST_CASE("preset configs expand to the documented run setups") {
    RunConfig c1 = preset_config(Preset::example1);
    CHECK(c1.M == 32);
    CHECK(c1.init == "smooth-sine");
    CHECK(c1.scheme == Scheme::sav2);
    CHECK(c1.epsilon * c1.epsilon == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(c1.delta == doctest::Approx(c1.epsilon));

    RunConfig c2 = preset_config(Preset::example2);
    CHECK(c2.M == 128);
    CHECK(c2.init == "two-bubbles");
    CHECK(c2.epsilon == doctest::Approx(0.02));
    CHECK(c2.delta == doctest::Approx(0.02));

    RunConfig c3 = preset_config(Preset::example3);
    CHECK(c3.M == 64);
    CHECK(c3.init == "random");
    CHECK(c3.delta == doctest::Approx(0.05));

    RunConfig p1 = preset_config(Preset::example1, true);
    CHECK(p1.M == 200);
}

TEST_CASE("a config expands into a consistent run spec") {
    RunConfig c = preset_config(Preset::example2);
    RunSpec spec = to_run_spec(c);
    CHECK(spec.grid.M == c.M);
    CHECK(spec.params.dt == doctest::Approx(c.dt));
    CHECK(spec.params.epsilon == doctest::Approx(c.epsilon));
    CHECK(spec.scheme == c.scheme);
    const auto* gk = std::get_if<GaussianKernel>(&spec.kernel);
    REQUIRE(gk != nullptr);
    CHECK(gk->delta == doctest::Approx(c.delta));
    CHECK(spec.phi0.size() == static_cast<std::size_t>(spec.grid.node_count()));

    SUBCASE("each named initial profile is honored") {
        for (const char* name : {"smooth-sine", "two-bubbles", "random"}) {
            RunConfig cc = c;
            cc.init = name;
            RunSpec s = to_run_spec(cc);
            CHECK(s.phi0.size() == static_cast<std::size_t>(s.grid.node_count()));
        }
    }
}

TEST_CASE("snapshots round-trip bit-exactly through text") {
    GridSpec g = make_grid(1.0, 12);
    Field phi = init_random_uniform(g, 0.9, 77);
    std::ostringstream out;
    write_snapshot(out, 0.125, phi);

    std::istringstream in(out.str());
    Snapshot snap = read_snapshot(in);
    CHECK(snap.t == 0.125);
    REQUIRE(snap.phi.grid.M == 12);
    REQUIRE(snap.phi.size() == phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) CHECK(snap.phi.values[k] == phi.values[k]);
}

TEST_CASE("snapshot reader rejects malformed input") {
    SUBCASE("wrong banner") {
        std::istringstream in("not a snapshot\n1 2 3\n");
        CHECK_THROWS_AS(read_snapshot(in), ConfigError);
    }
    SUBCASE("truncated rows") {
        GridSpec g = make_grid(1.0, 4);
        Field phi(g);
        std::ostringstream out;
        write_snapshot(out, 0.0, phi);
        std::string text = out.str();
        text.resize(text.size() / 2);
        std::istringstream in(text);
        CHECK_THROWS_AS(read_snapshot(in), ConfigError);
    }
    SUBCASE("non-finite entry") {
        std::istringstream in("# nlch-snapshot v1 t=0 M=2 L=1\n0 0 0\n0 nan 0\n0 0 0\n");
        CHECK_THROWS_AS(read_snapshot(in), ConfigError);
    }
}

TEST_CASE("telemetry writes the documented CSV header and one row per sample") {
    std::vector<EnergySample> samples(3);
    samples[0].step = 0;
    samples[0].t = 0.0;
    samples[1].step = 1;
    samples[1].t = 0.5;
    samples[1].mass = 1.25;
    samples[1].cg_iterations = 17;
    samples[2].step = 2;
    samples[2].t = 1.0;

    std::ostringstream out;
    write_telemetry(out, samples);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "step,t,mass,r,sqrtE1C0,modified_energy,original_energy,cg_iters");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
    CHECK(out.str().find("1.25") != std::string::npos);
    CHECK(out.str().find(",17") != std::string::npos);
}

TEST_CASE("named enum helpers match the config grammar") {
    CHECK(std::string(scheme_name(Scheme::sav1)) == "sav1");
    CHECK(std::string(scheme_name(Scheme::sav2)) == "sav2");
    CHECK(std::string(predictor_name(Predictor::extrapolate)) == "extrapolate");
    CHECK(std::string(predictor_name(Predictor::solve)) == "solve");
    CHECK(std::string(solver_name(SolverKind::fast_cg)) == "fast");
    CHECK(std::string(solver_name(SolverKind::direct)) == "direct");
}
