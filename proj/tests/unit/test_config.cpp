#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ecrom/config.hpp"
#include "ecrom/io.hpp"
#include "ecrom/pipeline.hpp"

using namespace ecrom;

TEST_CASE("config parsing with defaults") {
    CaseConfig c = parse_config(R"({"case": "lid_driven_cavity", "fom": {"dt": 0.02, "t_end": 2.0}})");
    CHECK(c.kind == CaseKind::LidDrivenCavity);
    c.apply_defaults();
    CHECK(c.nx == 64);
    CHECK(c.ny == 64);
    CHECK(c.modes == std::vector<int>{5, 10, 15, 20});
    CHECK(c.rom.dt == 0.02);
    CHECK(c.rom.t_end == 2.0);
    CHECK(c.pressure_modes_for(10) == 10);
    CHECK_NOTHROW(c.validate());

    CaseConfig p = parse_config(R"({"case": "actuator", "paper_scale": true})");
    p.apply_defaults();
    CHECK(p.nx == 240);
    CHECK(p.ny == 80);
}

TEST_CASE("config parsing of every key") {
    const CaseConfig c = parse_config(R"({
        "case": "shear_layer",
        "params": {"delta": 0.3, "epsilon": 0.1, "nu": 0.001},
        "grid": {"nx": 32, "ny": 24},
        "fom": {"method": "rk4", "dt": 0.01, "t_end": 1.0, "snapshot_stride": 2},
        "rom": {"method": "imr", "dt": 0.02, "newton_tol": 1e-11, "newton_max_iter": 7},
        "modes": [3, 6],
        "pressure_modes": 4,
        "constrained": true,
        "svd_method": "snapshots",
        "seed": 99,
        "output_dir": "somewhere"
    })");
    CHECK(c.params.delta == 0.3);
    CHECK(c.params.epsilon == 0.1);
    CHECK(c.params.nu == 0.001);
    CHECK(c.nx == 32);
    CHECK(c.ny == 24);
    CHECK(c.fom.snapshot_stride == 2);
    CHECK(c.rom.method == TimeMethod::ImplicitMidpoint);
    CHECK(c.rom.dt == 0.02);
    CHECK(c.rom.newton_max_iter == 7);
    CHECK(c.modes == std::vector<int>{3, 6});
    CHECK(c.pressure_modes_for(6) == 4);
    CHECK(c.constrained);
    CHECK(c.svd_method == SvdMethod::Snapshots);
    CHECK(c.seed == 99);
    CHECK(c.output_dir == "somewhere");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors") {
    CHECK_THROWS(parse_config("{"));
    CHECK_THROWS(parse_config(R"({"grid": {"nx": 8}})"));
    CHECK_THROWS(parse_config(R"({"case": "shear_layer", "colour": 1})"));
    CHECK_THROWS(parse_config(R"({"case": "shear_layer", "params": {"Reynolds": 1}})"));
    CHECK_THROWS(parse_config(R"({"case": "shear_layer", "rom": {"method": "euler"}})"));
    CHECK_THROWS(parse_config(R"({"case": "shear_layer", "pressure_modes": "all"})"));

    CaseConfig c = parse_config(R"({"case": "lid_driven_cavity", "constrained": true})");
    c.apply_defaults();
    CHECK_THROWS(c.validate());
    c = parse_config(R"({"case": "shear_layer", "fom": {"dt": 0.01}, "rom": {"dt": 0.03}})");
    c.apply_defaults();
    CHECK_THROWS(c.validate());
    c = parse_config(R"({"case": "shear_layer", "modes": [0]})");
    c.apply_defaults();
    CHECK_THROWS(c.validate());
    CHECK_THROWS(load_config("/nonexistent/config.json"));
}

TEST_CASE("stage names") {
    CHECK(parse_stage("fom") == Stage::Fom);
    CHECK(parse_stage("all") == Stage::All);
    CHECK_THROWS(parse_stage("plot"));
}

TEST_CASE("pipeline end to end on a small shear layer") {
    const auto dir = std::filesystem::temp_directory_path() / "ecrom_pipeline_test";
    std::filesystem::remove_all(dir);
    CaseConfig c = parse_config(R"({"case": "shear_layer", "grid": {"nx": 12, "ny": 12},
        "fom": {"dt": 0.02, "t_end": 0.4}, "rom": {"method": "imr"}, "modes": [2, 4], "constrained": true})");
    c.output_dir = dir.string();
    std::ostringstream log;
    CHECK_THROWS_WITH(run_stage(Stage::Compare, c, log), doctest::Contains("missing snapshot file"));
    run_stage(Stage::All, c, log);
    const ArtifactPaths paths{dir.string()};
    for (int m : {2, 4}) {
        CHECK(io::file_exists(paths.basis(m)));
        CHECK(io::file_exists(paths.rom_operators(m)));
        CHECK(io::file_exists(paths.coefficients(m)));
        CHECK(io::file_exists(paths.trace(m)));
    }
    std::ifstream t(paths.timings());
    std::stringstream ts;
    ts << t.rdbuf();
    const std::string timings = ts.str();
    CHECK(timings.rfind("stage,seconds\n", 0) == 0);
    for (const char* stage : {"SVD,", "precompute,", "online,", "fom,"}) CHECK(timings.find(stage) != std::string::npos);

    // Rerunning produces identical traces.
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string first = slurp(paths.trace(4));
    run_stage(Stage::All, c, log);
    CHECK(slurp(paths.trace(4)) == first);
    std::filesystem::remove_all(dir);
}
