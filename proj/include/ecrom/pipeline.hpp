#pragma once

#include <ostream>
#include <string>

#include "ecrom/config.hpp"

namespace ecrom {

enum class Stage { Fom, Pod, Rom, Compare, All };

Stage parse_stage(const std::string& name);

/// Output file names inside the configured output directory.
struct ArtifactPaths {
    std::string dir;

    std::string snapshots() const { return dir + "/snapshots.bin"; }
    std::string basis(int M) const { return dir + "/basis_M" + std::to_string(M) + ".bin"; }
    std::string rom_operators(int M) const { return dir + "/romops_M" + std::to_string(M) + ".bin"; }
    std::string coefficients(int M) const { return dir + "/rom_M" + std::to_string(M) + ".bin"; }
    std::string trace(int M) const { return dir + "/trace_M" + std::to_string(M) + ".csv"; }
    std::string timings() const { return dir + "/timings.csv"; }
};

/// Runs one stage (or all of them) for a fully resolved configuration.
/// Throws on failure; progress goes to log.
void run_stage(Stage stage, CaseConfig cfg, std::ostream& log);

}  // namespace ecrom
