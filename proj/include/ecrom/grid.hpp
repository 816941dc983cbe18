#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <utility>

namespace ecrom {

using Index = std::ptrdiff_t;

enum class BcKind { Periodic, NoSlip, Dirichlet, Outflow };

/// Velocity (u, v) on a boundary edge as a function of the coordinate along
/// that edge (y for west/east, x for south/north).
using VelocityProfile = std::function<std::array<double, 2>(double)>;

struct BoundaryCondition {
    BcKind kind = BcKind::NoSlip;
    VelocityProfile profile;  // Dirichlet only
    double p_inf = 0.0;       // Outflow only

    static BoundaryCondition periodic();
    static BoundaryCondition no_slip();
    static BoundaryCondition dirichlet(VelocityProfile profile);
    static BoundaryCondition outflow(double p_inf = 0.0);

    bool is_wall() const { return kind == BcKind::NoSlip || kind == BcKind::Dirichlet; }
    std::array<double, 2> velocity(double s) const;
};

enum class Edge { West, East, South, North };

struct GridSpec {
    int nx = 0;
    int ny = 0;
    std::pair<double, double> x_range{0.0, 1.0};
    std::pair<double, double> y_range{0.0, 1.0};
    BoundaryCondition west, east, south, north;
};

/// Validated staggered grid with the unknown layout.
///
/// u lives on vertical faces x_i = x_min + i*dx (i = 0..nx), v on horizontal
/// faces y_j (j = 0..ny). A face on a periodic or outflow edge carries an
/// unknown; a face on a wall edge holds a known value and is not stored.
/// On a periodic axis face nx is the image of face 0 and faces 1..nx are
/// stored. Unknowns are ordered row-major with the first index fastest, u
/// block first.
class Grid {
public:
    explicit Grid(GridSpec spec);

    const GridSpec& spec() const { return spec_; }
    int nx() const { return spec_.nx; }
    int ny() const { return spec_.ny; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double x_min() const { return spec_.x_range.first; }
    double y_min() const { return spec_.y_range.first; }
    double x_face(int i) const { return x_min() + i * dx_; }
    double y_face(int j) const { return y_min() + j * dy_; }
    double x_center(int i) const { return x_min() + (i + 0.5) * dx_; }
    double y_center(int j) const { return y_min() + (j + 0.5) * dy_; }

    const BoundaryCondition& bc(Edge e) const;
    bool periodic_x() const { return spec_.west.kind == BcKind::Periodic; }
    bool periodic_y() const { return spec_.south.kind == BcKind::Periodic; }
    bool has_outflow() const;

    /// First and last stored u-face index along x, and v-face index along y.
    int u_first() const { return u_first_; }
    int u_last() const { return u_last_; }
    int v_first() const { return v_first_; }
    int v_last() const { return v_last_; }

    Index num_u() const { return Index(u_last_ - u_first_ + 1) * ny(); }
    Index num_v() const { return Index(v_last_ - v_first_ + 1) * nx(); }
    Index num_velocity() const { return num_u() + num_v(); }
    Index num_pressure() const { return Index(nx()) * ny(); }

    /// Index of u on face i in row j, or -1 when that face is not an unknown.
    /// Periodic indices are wrapped; out-of-range rows return -1.
    Index u_index(int i, int j) const;
    /// Index of v on face j in column i, or -1.
    Index v_index(int i, int j) const;
    Index p_index(int i, int j) const { return Index(j) * nx() + i; }

private:
    GridSpec spec_;
    double dx_ = 0.0;
    double dy_ = 0.0;
    int u_first_ = 0, u_last_ = 0, v_first_ = 0, v_last_ = 0;
};

Grid build_grid(const GridSpec& spec);

}  // namespace ecrom
