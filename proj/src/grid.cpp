#include "ecrom/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecrom {

BoundaryCondition BoundaryCondition::periodic() {
    BoundaryCondition bc;
    bc.kind = BcKind::Periodic;
    return bc;
}

BoundaryCondition BoundaryCondition::no_slip() {
    BoundaryCondition bc;
    bc.kind = BcKind::NoSlip;
    return bc;
}

BoundaryCondition BoundaryCondition::dirichlet(VelocityProfile profile) {
    if (!profile) throw std::invalid_argument("Dirichlet boundary needs a velocity profile");
    BoundaryCondition bc;
    bc.kind = BcKind::Dirichlet;
    bc.profile = std::move(profile);
    return bc;
}

BoundaryCondition BoundaryCondition::outflow(double p_inf) {
    BoundaryCondition bc;
    bc.kind = BcKind::Outflow;
    bc.p_inf = p_inf;
    return bc;
}

std::array<double, 2> BoundaryCondition::velocity(double s) const {
    if (kind == BcKind::Dirichlet) return profile(s);
    return {0.0, 0.0};
}

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
    if (spec_.nx < 2 || spec_.ny < 2)
        throw std::invalid_argument("grid needs nx >= 2 and ny >= 2, got " +
                                    std::to_string(spec_.nx) + "x" + std::to_string(spec_.ny));
    const double lx = spec_.x_range.second - spec_.x_range.first;
    const double ly = spec_.y_range.second - spec_.y_range.first;
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw std::invalid_argument("grid domain has zero or negative measure");
    const bool pw = spec_.west.kind == BcKind::Periodic;
    const bool pe = spec_.east.kind == BcKind::Periodic;
    const bool ps = spec_.south.kind == BcKind::Periodic;
    const bool pn = spec_.north.kind == BcKind::Periodic;
    if (pw != pe) throw std::invalid_argument("periodic west/east boundaries must be paired");
    if (ps != pn) throw std::invalid_argument("periodic south/north boundaries must be paired");
    for (const auto* bc : {&spec_.west, &spec_.east, &spec_.south, &spec_.north})
        if (bc->kind == BcKind::Dirichlet && !bc->profile)
            throw std::invalid_argument("Dirichlet boundary without a profile");

    dx_ = lx / spec_.nx;
    dy_ = ly / spec_.ny;

    if (pw) {
        u_first_ = 1;
        u_last_ = spec_.nx;
    } else {
        u_first_ = spec_.west.kind == BcKind::Outflow ? 0 : 1;
        u_last_ = spec_.east.kind == BcKind::Outflow ? spec_.nx : spec_.nx - 1;
    }
    if (ps) {
        v_first_ = 1;
        v_last_ = spec_.ny;
    } else {
        v_first_ = spec_.south.kind == BcKind::Outflow ? 0 : 1;
        v_last_ = spec_.north.kind == BcKind::Outflow ? spec_.ny : spec_.ny - 1;
    }
}

const BoundaryCondition& Grid::bc(Edge e) const {
    switch (e) {
        case Edge::West: return spec_.west;
        case Edge::East: return spec_.east;
        case Edge::South: return spec_.south;
        case Edge::North: return spec_.north;
    }
    throw std::logic_error("unknown edge");
}

bool Grid::has_outflow() const {
    return spec_.west.kind == BcKind::Outflow || spec_.east.kind == BcKind::Outflow ||
           spec_.south.kind == BcKind::Outflow || spec_.north.kind == BcKind::Outflow;
}

namespace {
int wrap_face(int i, int n) { return ((i - 1) % n + n) % n + 1; }
}  // namespace

Index Grid::u_index(int i, int j) const {
    if (j < 0 || j >= ny()) return -1;
    if (periodic_x()) i = wrap_face(i, nx());
    if (i < u_first_ || i > u_last_) return -1;
    return Index(j) * (u_last_ - u_first_ + 1) + (i - u_first_);
}

Index Grid::v_index(int i, int j) const {
    if (i < 0 || i >= nx()) return -1;
    if (periodic_y()) j = wrap_face(j, ny());
    if (j < v_first_ || j > v_last_) return -1;
    return num_u() + Index(j - v_first_) * nx() + i;
}

Grid build_grid(const GridSpec& spec) { return Grid(spec); }

}  // namespace ecrom
