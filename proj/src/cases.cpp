#include "ecrom/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace ecrom {

std::string case_name(CaseKind kind) {
    switch (kind) {
        case CaseKind::ShearLayer: return "shear_layer";
        case CaseKind::LidDrivenCavity: return "lid_driven_cavity";
        case CaseKind::Actuator: return "actuator";
    }
    return "unknown";
}

CaseKind parse_case_name(const std::string& name) {
    if (name == "shear_layer") return CaseKind::ShearLayer;
    if (name == "lid_driven_cavity") return CaseKind::LidDrivenCavity;
    if (name == "actuator") return CaseKind::Actuator;
    throw std::invalid_argument("unknown case '" + name + "' (expected shear_layer, lid_driven_cavity or actuator)");
}

CaseSetup case_shear_layer(int nx, int ny, const CaseParams& p) {
    if (!(p.delta > 0.0)) throw std::invalid_argument("shear layer: delta must be positive");
    if (p.nu < 0.0) throw std::invalid_argument("shear layer: nu must be non-negative");
    constexpr double pi = std::numbers::pi;
    GridSpec spec;
    spec.nx = nx;
    spec.ny = ny;
    spec.x_range = {0.0, 2.0 * pi};
    spec.y_range = {0.0, 2.0 * pi};
    spec.west = spec.east = spec.south = spec.north = BoundaryCondition::periodic();
    const Grid grid = build_grid(spec);

    CaseSetup cs{CaseKind::ShearLayer, std::make_unique<FomOperators>(assemble_operators(grid)), {}};
    cs.nu = p.nu;
    Vector V(grid.num_velocity());
    for (int j = 0; j < ny; ++j) {
        const double y = grid.y_center(j);
        const double u = y <= pi ? 1.0 + std::tanh((y - pi / 2.0) / p.delta)
                                 : 1.0 + std::tanh((3.0 * pi / 2.0 - y) / p.delta);
        for (int i = grid.u_first(); i <= grid.u_last(); ++i) V[grid.u_index(i, j)] = u;
    }
    for (int j = grid.v_first(); j <= grid.v_last(); ++j)
        for (int i = 0; i < nx; ++i) V[grid.v_index(i, j)] = p.epsilon * std::sin(grid.x_center(i));
    const FomSolver solver(*cs.ops, cs.nu);
    cs.init.V = solver.project(V);
    cs.init.t = 0.0;
    cs.init.p = solver.pressure(cs.init.V, 0.0);
    return cs;
}

CaseSetup case_lid_driven_cavity(int nx, int ny, const CaseParams& p) {
    const double Re = p.Re > 0.0 ? p.Re : 1000.0;
    GridSpec spec;
    spec.nx = nx;
    spec.ny = ny;
    spec.x_range = {0.0, 1.0};
    spec.y_range = {0.0, 1.0};
    spec.west = spec.east = spec.south = BoundaryCondition::no_slip();
    spec.north = BoundaryCondition::dirichlet([](double) { return std::array<double, 2>{1.0, 0.0}; });
    const Grid grid = build_grid(spec);

    CaseSetup cs{CaseKind::LidDrivenCavity, std::make_unique<FomOperators>(assemble_operators(grid)), {}};
    cs.nu = 1.0 / Re;
    cs.init.V = Vector::Zero(grid.num_velocity());
    cs.init.p = Vector::Zero(grid.num_pressure());
    cs.v_ref = 1.0;
    cs.p_ref = 1.0;
    return cs;
}

CaseSetup case_actuator(int nx, int ny, const CaseParams& p) {
    const double Re = p.Re > 0.0 ? p.Re : 500.0;
    auto inflow = [](double y) { return 0.75 - 3.0 / 32.0 * (y - 2.0) * (y + 2.0); };
    GridSpec spec;
    spec.nx = nx;
    spec.ny = ny;
    spec.x_range = {-4.0, 8.0};
    spec.y_range = {-2.0, 2.0};
    spec.west = BoundaryCondition::dirichlet([inflow](double y) { return std::array<double, 2>{inflow(y), 0.0}; });
    spec.east = spec.south = spec.north = BoundaryCondition::outflow(0.0);
    const Grid grid = build_grid(spec);

    Actuator act;
    act.x0 = 0.0;
    act.y_min = -0.5;
    act.y_max = 0.5;
    act.c_t = p.c_t;
    CaseSetup cs{CaseKind::Actuator, std::make_unique<FomOperators>(assemble_operators(grid, act)), {}};
    cs.nu = 1.0 / Re;
    Vector V = Vector::Zero(grid.num_velocity());
    for (int j = 0; j < ny; ++j)
        for (int i = grid.u_first(); i <= grid.u_last(); ++i) V[grid.u_index(i, j)] = inflow(grid.y_center(j));
    cs.init.V = V;
    cs.init.t = 0.0;
    cs.init.p = Vector::Zero(grid.num_pressure());
    cs.v_ref = 1.0;
    cs.p_ref = 0.5 * p.c_t;
    return cs;
}

CaseSetup make_case(CaseKind kind, int nx, int ny, const CaseParams& p) {
    switch (kind) {
        case CaseKind::ShearLayer: return case_shear_layer(nx, ny, p);
        case CaseKind::LidDrivenCavity: return case_lid_driven_cavity(nx, ny, p);
        case CaseKind::Actuator: return case_actuator(nx, ny, p);
    }
    throw std::invalid_argument("unknown case");
}

}  // namespace ecrom
