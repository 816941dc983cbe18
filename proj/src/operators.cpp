#include "ecrom/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ecrom/io.hpp"
#include "ecrom/kernels.hpp"

namespace ecrom {

double force_time_factor(ForceSchedule schedule, double t) {
    switch (schedule) {
        case ForceSchedule::Steady: return 1.0;
        case ForceSchedule::PulsedSine: return 1.0 + std::sin(std::numbers::pi * t);
    }
    return 1.0;
}

namespace {

using Triplet = Eigen::Triplet<double>;

/// Linear combination of unknowns plus a known constant.
struct Affine {
    std::vector<std::pair<Index, double>> terms;
    double c = 0.0;

    static Affine unknown(Index i) { return Affine{{{i, 1.0}}, 0.0}; }
    static Affine constant(double v) { return Affine{{}, v}; }

    Affine& add(const Affine& o, double w) {
        for (const auto& [i, v] : o.terms) terms.emplace_back(i, w * v);
        c += w * o.c;
        return *this;
    }

    /// Sums duplicate indices and drops exact zeros; ordered by index.
    Affine merged() const {
        std::map<Index, double> acc;
        for (const auto& [i, v] : terms) acc[i] += v;
        Affine out;
        out.c = c;
        for (const auto& [i, v] : acc)
            if (v != 0.0) out.terms.emplace_back(i, v);
        return out;
    }
};

Affine mean(const Affine& a, const Affine& b, double scale = 1.0) {
    Affine r;
    r.add(a, 0.5 * scale).add(b, 0.5 * scale);
    return r.merged();
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

/// Evaluates velocity components at arbitrary staggered positions in terms of
/// unknowns and boundary data. Tangential ghosts beyond a wall mirror around
/// the wall value; beyond an outflow edge values are copied (zero gradient).
class Sampler {
public:
    explicit Sampler(const Grid& g) : g_(g) {}

    Affine u(int i, int j) const {
        const int nx = g_.nx(), ny = g_.ny();
        if (j < 0 || j >= ny) {
            if (g_.periodic_y()) return u(i, wrap(j, ny));
            const bool south = j < 0;
            const BoundaryCondition& bc = g_.bc(south ? Edge::South : Edge::North);
            const Affine inner = u(i, south ? 0 : ny - 1);
            if (bc.kind == BcKind::Outflow) return inner;
            const double uw = bc.velocity(g_.x_face(i))[0];
            Affine ghost = Affine::constant(2.0 * uw);
            return ghost.add(inner, -1.0);
        }
        const Index idx = g_.u_index(i, j);
        if (idx >= 0) return Affine::unknown(idx);
        if (i == 0) return Affine::constant(g_.bc(Edge::West).velocity(g_.y_center(j))[0]);
        if (i == nx) return Affine::constant(g_.bc(Edge::East).velocity(g_.y_center(j))[0]);
        if (i < 0 && g_.bc(Edge::West).kind == BcKind::Outflow) return u(0, j);
        if (i > nx && g_.bc(Edge::East).kind == BcKind::Outflow) return u(nx, j);
        throw std::logic_error("u sample outside the stencil reach");
    }

    Affine v(int i, int j) const {
        const int nx = g_.nx(), ny = g_.ny();
        if (i < 0 || i >= nx) {
            if (g_.periodic_x()) return v(wrap(i, nx), j);
            const bool west = i < 0;
            const BoundaryCondition& bc = g_.bc(west ? Edge::West : Edge::East);
            const Affine inner = v(west ? 0 : nx - 1, j);
            if (bc.kind == BcKind::Outflow) return inner;
            const double vw = bc.velocity(g_.y_face(j))[1];
            Affine ghost = Affine::constant(2.0 * vw);
            return ghost.add(inner, -1.0);
        }
        const Index idx = g_.v_index(i, j);
        if (idx >= 0) return Affine::unknown(idx);
        if (j == 0) return Affine::constant(g_.bc(Edge::South).velocity(g_.x_center(i))[1]);
        if (j == ny) return Affine::constant(g_.bc(Edge::North).velocity(g_.x_center(i))[1]);
        if (j < 0 && g_.bc(Edge::South).kind == BcKind::Outflow) return v(i, 0);
        if (j > ny && g_.bc(Edge::North).kind == BcKind::Outflow) return v(i, ny);
        throw std::logic_error("v sample outside the stencil reach");
    }

    /// Unknown index of a stored position, wrapping the tangential axis too.
    Index u_unknown(int i, int j) const {
        if (g_.periodic_y()) j = wrap(j, g_.ny());
        return g_.u_index(i, j);
    }
    Index v_unknown(int i, int j) const {
        if (g_.periodic_x()) i = wrap(i, g_.nx());
        return g_.v_index(i, j);
    }

private:
    const Grid& g_;
};

enum class Family { UX, UY, VX, VY };

/// A face of a momentum control volume, separating positions a and b.
struct Face {
    Family family;
    int ia, ja, ib, jb;
};

/// Enumerates every face of every u and v control volume in a fixed order.
void for_each_face(const Grid& g, const std::function<void(const Face&)>& fn) {
    const int nx = g.nx(), ny = g.ny();
    // u volumes, faces normal to x (at cell centres)
    {
        const int c0 = g.periodic_x() ? 1 : g.u_first() - 1;
        const int c1 = g.periodic_x() ? nx : g.u_last();
        for (int j = 0; j < ny; ++j)
            for (int c = c0; c <= c1; ++c) fn({Family::UX, c, j, c + 1, j});
    }
    // u volumes, faces normal to y (at grid corners)
    {
        const int r0 = g.periodic_y() ? 0 : -1;
        for (int r = r0; r <= ny - 1; ++r)
            for (int i = g.u_first(); i <= g.u_last(); ++i) fn({Family::UY, i, r, i, r + 1});
    }
    // v volumes, faces normal to x (at grid corners)
    {
        const int c0 = g.periodic_x() ? 0 : -1;
        for (int j = g.v_first(); j <= g.v_last(); ++j)
            for (int c = c0; c <= nx - 1; ++c) fn({Family::VX, c, j, c + 1, j});
    }
    // v volumes, faces normal to y (at cell centres)
    {
        const int r0 = g.periodic_y() ? 1 : g.v_first() - 1;
        const int r1 = g.periodic_y() ? ny : g.v_last();
        for (int r = r0; r <= r1; ++r)
            for (int i = 0; i < nx; ++i) fn({Family::VY, i, r, i, r + 1});
    }
}

bool is_u_family(Family f) { return f == Family::UX || f == Family::UY; }
bool is_x_family(Family f) { return f == Family::UX || f == Family::VX; }

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.prune(0.0);
    m.makeCompressed();
    return m;
}

void check_length(const Vector& v, Index n, const char* what) {
    if (v.size() != n)
        throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(n) +
                                    ", got " + std::to_string(v.size()));
}

}  // namespace

DivergenceParts assemble_divergence(const Grid& g) {
    const Sampler s(g);
    const double dx = g.dx(), dy = g.dy();
    std::vector<Triplet> trip;
    Vector y_M = Vector::Zero(g.num_pressure());
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const Index row = g.p_index(i, j);
            Affine div;
            div.add(s.u(i + 1, j), dy).add(s.u(i, j), -dy).add(s.v(i, j + 1), dx).add(s.v(i, j), -dx);
            for (const auto& [col, val] : div.terms) trip.emplace_back(row, col, val);
            y_M[row] = -div.c;
        }
    }
    return {from_triplets(g.num_pressure(), g.num_velocity(), trip), y_M};
}

GradientParts assemble_gradient(const SparseMatrix& M, const Grid& g) {
    if (M.rows() != g.num_pressure() || M.cols() != g.num_velocity())
        throw std::invalid_argument("assemble_gradient: divergence size does not match grid");
    SparseMatrix G = -SparseMatrix(M.transpose());
    G.makeCompressed();
    Vector y_G = Vector::Zero(g.num_velocity());
    for (int j = 0; j < g.ny(); ++j) {
        if (g.bc(Edge::West).kind == BcKind::Outflow) y_G[g.u_index(0, j)] -= g.dy() * g.bc(Edge::West).p_inf;
        if (g.bc(Edge::East).kind == BcKind::Outflow)
            y_G[g.u_index(g.nx(), j)] += g.dy() * g.bc(Edge::East).p_inf;
    }
    for (int i = 0; i < g.nx(); ++i) {
        if (g.bc(Edge::South).kind == BcKind::Outflow)
            y_G[g.v_index(i, 0)] -= g.dx() * g.bc(Edge::South).p_inf;
        if (g.bc(Edge::North).kind == BcKind::Outflow)
            y_G[g.v_index(i, g.ny())] += g.dx() * g.bc(Edge::North).p_inf;
    }
    return {G, y_G};
}

DiffusionParts assemble_diffusion(const Grid& g) {
    const Sampler s(g);
    std::vector<Triplet> qtrip;
    Vector y_D = Vector::Zero(g.num_velocity());
    Index qrow = 0;
    for_each_face(g, [&](const Face& f) {
        const bool ucomp = is_u_family(f.family);
        const double w = is_x_family(f.family) ? g.dy() / g.dx() : g.dx() / g.dy();
        const Affine a = ucomp ? s.u(f.ia, f.ja) : s.v(f.ia, f.ja);
        const Affine b = ucomp ? s.u(f.ib, f.jb) : s.v(f.ib, f.jb);
        const Index ka = ucomp ? s.u_unknown(f.ia, f.ja) : s.v_unknown(f.ia, f.ja);
        const Index kb = ucomp ? s.u_unknown(f.ib, f.jb) : s.v_unknown(f.ib, f.jb);
        Affine delta;
        delta.add(b, 1.0).add(a, -1.0);
        delta = delta.merged();
        // The flux w*(b - a) enters a and leaves b. Its linear part must be a
        // multiple -c of the face incidence (e_a - e_b) for D to factor as -Q^T Q.
        double c = 0.0;
        if (!delta.terms.empty()) {
            const auto& [i0, v0] = delta.terms.front();
            const double k0 = (i0 == ka ? 1.0 : 0.0) - (i0 == kb ? 1.0 : 0.0);
            if (k0 == 0.0) throw std::logic_error("diffusion face couples a non-adjacent unknown");
            c = -v0 / k0;
            for (const auto& [i, v] : delta.terms) {
                const double k = (i == ka ? 1.0 : 0.0) - (i == kb ? 1.0 : 0.0);
                if (std::abs(v + c * k) > 1e-14 * std::abs(c))
                    throw std::logic_error("diffusion face is not a scaled incidence");
            }
        }
        if (c > 0.0) {
            const double q = std::sqrt(w * c);
            if (ka >= 0) qtrip.emplace_back(qrow, ka, q);
            if (kb >= 0 && kb != ka) qtrip.emplace_back(qrow, kb, -q);
            ++qrow;
        }
        if (delta.c != 0.0) {
            if (ka >= 0) y_D[ka] += w * delta.c;
            if (kb >= 0) y_D[kb] -= w * delta.c;
        }
    });
    SparseMatrix Q = from_triplets(qrow, g.num_velocity(), qtrip);
    SparseMatrix D = -SparseMatrix(Q.transpose() * Q);
    D.prune(0.0);
    D.makeCompressed();
    return {D, Q, y_D};
}

ConvectionParts assemble_convection_parts(const Grid& g) {
    const Sampler s(g);
    const double dx = g.dx(), dy = g.dy();
    std::vector<Triplet> ktrip, itrip, atrip;
    std::vector<double> y_I, y_A;
    Index face = 0;
    for_each_face(g, [&](const Face& f) {
        Affine flux, conv;
        Index ka = -1, kb = -1;
        switch (f.family) {
            case Family::UX:
                flux = mean(s.u(f.ia, f.ja), s.u(f.ib, f.jb), dy);
                conv = mean(s.u(f.ia, f.ja), s.u(f.ib, f.jb));
                break;
            case Family::UY:
                flux = mean(s.v(f.ia - 1, f.jb), s.v(f.ia, f.jb), dx);
                conv = mean(s.u(f.ia, f.ja), s.u(f.ib, f.jb));
                break;
            case Family::VX:
                flux = mean(s.u(f.ib, f.ja - 1), s.u(f.ib, f.ja), dy);
                conv = mean(s.v(f.ia, f.ja), s.v(f.ib, f.jb));
                break;
            case Family::VY:
                flux = mean(s.v(f.ia, f.ja), s.v(f.ib, f.jb), dx);
                conv = mean(s.v(f.ia, f.ja), s.v(f.ib, f.jb));
                break;
        }
        if (is_u_family(f.family)) {
            ka = s.u_unknown(f.ia, f.ja);
            kb = s.u_unknown(f.ib, f.jb);
        } else {
            ka = s.v_unknown(f.ia, f.ja);
            kb = s.v_unknown(f.ib, f.jb);
        }
        if (ka >= 0) ktrip.emplace_back(ka, face, 1.0);
        if (kb >= 0) ktrip.emplace_back(kb, face, -1.0);
        for (const auto& [i, v] : flux.terms) itrip.emplace_back(face, i, v);
        for (const auto& [i, v] : conv.terms) atrip.emplace_back(face, i, v);
        y_I.push_back(flux.c);
        y_A.push_back(conv.c);
        ++face;
    });
    ConvectionParts parts;
    parts.K = from_triplets(g.num_velocity(), face, ktrip);
    parts.I = from_triplets(face, g.num_velocity(), itrip);
    parts.A = from_triplets(face, g.num_velocity(), atrip);
    parts.y_I = Eigen::Map<const Vector>(y_I.data(), face);
    parts.y_A = Eigen::Map<const Vector>(y_A.data(), face);
    return parts;
}

BodyForce assemble_body_force(const Grid& g, const Actuator& act) {
    BodyForce force;
    force.spatial = Vector::Zero(g.num_velocity());
    force.schedule = ForceSchedule::PulsedSine;
    const double x_max = g.spec().x_range.second;
    const double y_max = g.spec().y_range.second;
    if (!(act.x0 > g.x_min() && act.x0 < x_max && act.y_min >= g.y_min() && act.y_max <= y_max &&
          act.y_min < act.y_max))
        throw std::invalid_argument("actuator segment lies outside the domain");
    const int i0 = int(std::lround((act.x0 - g.x_min()) / g.dx()));
    if (act.c_t == 0.0) return force;
    for (int j = 0; j < g.ny(); ++j) {
        const double overlap = std::min(g.y_face(j + 1), act.y_max) - std::max(g.y_face(j), act.y_min);
        if (overlap <= 1e-9 * g.dy()) continue;
        const Index idx = g.u_index(i0, j);
        if (idx < 0) throw std::invalid_argument("actuator sits on a boundary face");
        force.spatial[idx] = -act.c_t * g.dy();
    }
    return force;
}

FomOperators assemble_operators(const Grid& grid, const std::optional<Actuator>& actuator) {
    auto div = assemble_divergence(grid);
    auto grad = assemble_gradient(div.M, grid);
    auto diff = assemble_diffusion(grid);
    auto conv = assemble_convection_parts(grid);
    FomOperators ops{grid, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    ops.M = std::move(div.M);
    ops.y_M = std::move(div.y_M);
    ops.G = std::move(grad.G);
    ops.y_G = std::move(grad.y_G);
    ops.D = std::move(diff.D);
    ops.Q = std::move(diff.Q);
    ops.y_D = std::move(diff.y_D);
    ops.K = std::move(conv.K);
    ops.I = std::move(conv.I);
    ops.A = std::move(conv.A);
    ops.y_I = std::move(conv.y_I);
    ops.y_A = std::move(conv.y_A);
    ops.omega = Vector::Constant(grid.num_velocity(), grid.dx() * grid.dy());
    ops.omega_p = Vector::Constant(grid.num_pressure(), grid.dx() * grid.dy());
    const Vector omega_inv = ops.omega.cwiseInverse();
    ops.L = SparseMatrix(ops.M * (omega_inv.asDiagonal() * ops.G));
    ops.L.makeCompressed();
    if (actuator) {
        ops.force = assemble_body_force(grid, *actuator);
    } else {
        ops.force.spatial = Vector::Zero(grid.num_velocity());
        ops.force.schedule = ForceSchedule::Steady;
    }
    return ops;
}

Vector convection(const FomOperators& ops, const Vector& vc, const Vector& vu) {
    check_length(vc, ops.num_velocity(), "convection (convecting field)");
    check_length(vu, ops.num_velocity(), "convection (convected field)");
    Vector out;
    kernels::parallel::convection(ops, vc, vu, out);
    return out;
}

SparseMatrix convection_matrix(const FomOperators& ops, const Vector& vc) {
    check_length(vc, ops.num_velocity(), "convection_matrix");
    if (ops.grid.has_outflow() || !ops.y_M.isZero(0.0))
        throw std::invalid_argument("convection_matrix requires a grid without inflow or outflow");
    const Vector flux = ops.I * vc;
    SparseMatrix C = ops.K * (flux.asDiagonal() * ops.A);
    C.makeCompressed();
    return C;
}

SparseMatrix convection_jacobian(const FomOperators& ops, const Vector& V) {
    check_length(V, ops.num_velocity(), "convection_jacobian");
    const Vector flux = ops.I * V + ops.y_I;
    const Vector conv = ops.A * V + ops.y_A;
    SparseMatrix J = ops.K * SparseMatrix(conv.asDiagonal() * ops.I + flux.asDiagonal() * ops.A);
    J.makeCompressed();
    return J;
}

Matrix momentum_indicators(const Grid& g) {
    Matrix E = Matrix::Zero(g.num_velocity(), 2);
    E.col(0).head(g.num_u()).setOnes();
    E.col(1).tail(g.num_v()).setOnes();
    return E;
}

void write_csr(const std::string& path, const SparseMatrix& A_in) {
    SparseMatrix A = A_in;
    A.makeCompressed();
    io::BinaryWriter w(path);
    w.magic("ECROM1");
    w.u32(std::uint32_t(A.rows()));
    w.u32(std::uint32_t(A.cols()));
    w.u64(std::uint64_t(A.nonZeros()));
    for (Index r = 0; r <= A.rows(); ++r) w.u64(std::uint64_t(A.outerIndexPtr()[r]));
    for (Index k = 0; k < A.nonZeros(); ++k) w.u64(std::uint64_t(A.innerIndexPtr()[k]));
    w.f64s(A.valuePtr(), std::size_t(A.nonZeros()));
    w.close();
}

SparseMatrix read_csr(const std::string& path) {
    io::BinaryReader r(path);
    r.expect_magic("ECROM1");
    const Index rows = r.u32();
    const Index cols = r.u32();
    const Index nnz = Index(r.u64());
    std::vector<std::uint64_t> ptr(static_cast<std::size_t>(rows + 1)), col(static_cast<std::size_t>(nnz));
    for (auto& p : ptr) p = r.u64();
    for (auto& c : col) c = r.u64();
    std::vector<double> val(static_cast<std::size_t>(nnz));
    r.f64s(val.data(), val.size());
    std::vector<Triplet> trip;
    trip.reserve(std::size_t(nnz));
    for (Index row = 0; row < rows; ++row)
        for (auto k = ptr[std::size_t(row)]; k < ptr[std::size_t(row) + 1]; ++k)
            trip.emplace_back(row, Index(col[k]), val[k]);
    SparseMatrix A(rows, cols);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

}  // namespace ecrom
