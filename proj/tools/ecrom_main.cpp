#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecrom/config.hpp"
#include "ecrom/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Energy-conserving reduced-order models for incompressible flow"};
    std::string stage_name;
    std::string config_path;
    std::vector<int> grid;
    std::string modes;
    bool constrained = false;
    std::string method;
    std::string out_dir;

    app.add_option("stage", stage_name, "fom, pod, rom, compare or all")
        ->required()
        ->check(CLI::IsMember({"fom", "pod", "rom", "compare", "all"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--grid", grid, "Grid size NX NY")->expected(2);
    app.add_option("--modes", modes, "Comma-separated mode counts, e.g. 2,4,8");
    app.add_flag("--constrained", constrained, "Use the momentum-constrained basis");
    app.add_option("--method", method, "ROM time integrator")->check(CLI::IsMember({"imr", "rk4"}));
    app.add_option("--out", out_dir, "Output directory");
    CLI11_PARSE(app, argc, argv);

    try {
        ecrom::CaseConfig cfg = ecrom::load_config(config_path);
        if (!grid.empty()) {
            cfg.nx = grid[0];
            cfg.ny = grid[1];
        }
        if (!modes.empty()) {
            cfg.modes.clear();
            std::stringstream ss(modes);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.modes.push_back(std::stoi(tok));
        }
        if (constrained) cfg.constrained = true;
        if (!method.empty()) cfg.rom.method = ecrom::parse_method(method);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        ecrom::run_stage(ecrom::parse_stage(stage_name), cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "ecrom: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
