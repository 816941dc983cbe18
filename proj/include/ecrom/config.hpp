#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecrom/cases.hpp"
#include "ecrom/fom.hpp"
#include "ecrom/pod.hpp"

namespace ecrom {

/// Run configuration. Loaded from a JSON file; see README for the schema.
struct CaseConfig {
    CaseKind kind = CaseKind::ShearLayer;
    CaseParams params;
    int nx = 0;  // 0 selects the case default
    int ny = 0;
    bool paper_scale = false;
    IntegratorConfig fom;
    IntegratorConfig rom;
    std::vector<int> modes;
    std::optional<int> pressure_modes;  // unset means M_p = M
    bool constrained = false;
    SvdMethod svd_method = SvdMethod::ThinSvd;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    /// Fills grid size, time steps and mode lists left unset with case defaults.
    void apply_defaults();
    void validate() const;
    int pressure_modes_for(int M) const { return pressure_modes.value_or(M); }
};

/// Desk-scale defaults per case (paper-scale grids when paper_scale is set).
CaseConfig default_config(CaseKind kind, bool paper_scale = false);

CaseConfig load_config(const std::string& path);
CaseConfig parse_config(const std::string& json_text);

TimeMethod parse_method(const std::string& name);

}  // namespace ecrom
