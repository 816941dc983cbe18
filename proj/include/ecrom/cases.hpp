#pragma once

#include <memory>
#include <numbers>
#include <optional>
#include <string>

#include "ecrom/fom.hpp"
#include "ecrom/operators.hpp"

namespace ecrom {

enum class CaseKind { ShearLayer, LidDrivenCavity, Actuator };

std::string case_name(CaseKind kind);
CaseKind parse_case_name(const std::string& name);

struct CaseParams {
    double delta = std::numbers::pi / 15.0;  // shear layer thickness
    double epsilon = 1.0 / 20.0;             // shear layer perturbation
    double nu = 0.0;                         // shear layer viscosity
    double Re = 0.0;                         // 0 selects the case default
    double c_t = 0.5;                        // actuator thrust coefficient
};

/// Everything needed to run one test case. Operators live on the heap so
/// solvers holding a pointer to them survive moves of the setup.
struct CaseSetup {
    CaseKind kind;
    std::unique_ptr<FomOperators> ops;
    StateVector init;
    double nu = 0.0;
    double v_ref = 1.0;
    double p_ref = 1.0;
};

/// [0, 2pi]^2 periodic double shear layer; the sampled field is projected once.
CaseSetup case_shear_layer(int nx, int ny, const CaseParams& p = {});
/// Unit square, lid u = 1 on the north wall, zero initial velocity.
CaseSetup case_lid_driven_cavity(int nx, int ny, const CaseParams& p = {});
/// [-4, 8] x [-2, 2], parabolic inflow, outflow elsewhere, pulsed actuator disk at x = 0.
CaseSetup case_actuator(int nx, int ny, const CaseParams& p = {});

CaseSetup make_case(CaseKind kind, int nx, int ny, const CaseParams& p = {});

}  // namespace ecrom
