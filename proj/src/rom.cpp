#include "ecrom/rom.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ecrom/io.hpp"

namespace ecrom {

Matrix RomOperators::convection_slice(Index i) const {
    if (i < 0 || i >= M) throw std::out_of_range("convection_slice: mode index out of range");
    Matrix S(M, M);
    for (Index k = 0; k < M; ++k)
        for (Index l = 0; l < M; ++l) S(k, l) = -F2(k, i * M + l);
    return S;
}

RomOperators precompute_rom_operators(const FomOperators& ops, const RomBasis& basis, const Vector& V_bc,
                                      double nu, const PrecomputeOptions& opt) {
    const Index nv = ops.num_velocity();
    const Index m = basis.M();
    const Matrix& Phi = basis.Phi;
    if (Phi.rows() != nv || V_bc.size() != nv) throw std::invalid_argument("precompute: basis/grid size mismatch");
    if (m < 1) throw std::invalid_argument("precompute: empty basis");
    const bool with_p = opt.with_pressure && basis.M_p() > 0;
    if (with_p && basis.Pi.rows() != ops.num_pressure())
        throw std::invalid_argument("precompute: pressure basis size mismatch");

    auto conv = [&](const Vector& vc, const Vector& vu) {
        Vector out;
        if (opt.parallel) kernels::parallel::convection(ops, vc, vu, out);
        else kernels::serial::convection(ops, vc, vu, out);
        return out;
    };

    RomOperators r;
    r.M = m;
    r.M_p = with_p ? basis.M_p() : 0;
    r.nu = nu;
    r.schedule = ops.force.schedule;

    // Projection onto the pressure right-hand side: Pi^T M Omega^-1.
    Matrix Rp;
    if (with_p)
        Rp = (ops.omega.cwiseInverse().asDiagonal() * Matrix(SparseMatrix(ops.M.transpose()) * basis.Pi))
                 .transpose();

    const Vector zero = Vector::Zero(nv);
    const Vector c00 = conv(zero, zero);
    std::vector<Vector> c_phi0(static_cast<std::size_t>(m)), c_0phi(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        c_phi0[std::size_t(i)] = conv(Phi.col(i), zero);
        c_0phi[std::size_t(i)] = conv(zero, Phi.col(i));
    }

    // Constant and linear convection contributions.
    const Vector yC = conv(V_bc, V_bc);
    const Vector c_bc0 = conv(V_bc, zero);
    const Vector c_0bc = conv(zero, V_bc);
    Matrix W1(nv, m);
    for (Index i = 0; i < m; ++i)
        W1.col(i) = conv(V_bc, Phi.col(i)) + conv(Phi.col(i), V_bc) - c_bc0 - c_0bc;

    // Quadratic term, one block of M columns per convecting mode.
    r.F2.resize(m, m * m);
    if (with_p) r.P2.resize(r.M_p, m * m);
    auto quadratic_block = [&](Index i) {
        Matrix W(nv, m);
        for (Index l = 0; l < m; ++l)
            W.col(l) = conv(Phi.col(i), Phi.col(l)) - c_phi0[std::size_t(i)] - c_0phi[std::size_t(l)] + c00;
        r.F2.middleCols(i * m, m) = -(Phi.transpose() * W);
        if (with_p) r.P2.middleCols(i * m, m) = -(Rp * W);
    };
    if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (Index i = 0; i < m; ++i) quadratic_block(i);
    } else {
        for (Index i = 0; i < m; ++i) quadratic_block(i);
    }

    const Matrix DPhi = ops.D * Phi;
    const Vector yD_full = ops.D * V_bc + ops.y_D;
    r.D_r = Phi.transpose() * DPhi;
    r.F1 = -(Phi.transpose() * W1) + nu * r.D_r;
    r.F0 = -(Phi.transpose() * yC) + nu * (Phi.transpose() * yD_full) - Phi.transpose() * ops.y_G;
    const Vector f_r = Phi.transpose() * ops.force.spatial;
    if (ops.force.schedule == ForceSchedule::Steady) {
        r.F0 += f_r;
        r.f_act = Vector::Zero(m);
    } else {
        r.f_act = f_r;
    }

    if (with_p) {
        const Matrix& Pi = basis.Pi;
        r.L_r = Pi.transpose() * (ops.L * Pi);
        r.P1 = Rp * (-W1 + nu * DPhi);
        r.P0 = Rp * (-yC + nu * yD_full - ops.y_G);
        const Vector p_f = Rp * ops.force.spatial;
        if (ops.force.schedule == ForceSchedule::Steady) {
            r.P0 += p_f;
            r.p_act = Vector::Zero(r.M_p);
        } else {
            r.p_act = p_f;
        }
    }
    return r;
}

Vector rom_rhs(const RomOperators& r, const Vector& a, double t) {
    if (a.size() != r.M) throw std::invalid_argument("rom_rhs: coefficient length mismatch");
    Vector out;
    kernels::serial::quadratic(r.F2, a, out);
    out += r.F1 * a + r.F0;
    const double g = force_time_factor(r.schedule, t);
    if (g != 0.0 && r.f_act.size() == r.M) out += g * r.f_act;
    return out;
}

Matrix rom_jacobian(const RomOperators& r, const Vector& a) {
    if (a.size() != r.M) throw std::invalid_argument("rom_jacobian: coefficient length mismatch");
    const Index m = r.M;
    Matrix J = r.F1;
    for (Index k = 0; k < m; ++k) {
        Eigen::Map<const RowMatrix> S(r.F2.data() + k * r.F2.cols(), m, m);
        J.row(k) += (S * a + S.transpose() * a).transpose();
    }
    return J;
}

Vector rom_step_implicit_midpoint(const RomOperators& r, const Vector& a, double t, double dt,
                                  const RomNewtonConfig& cfg, int* iterations) {
    const double h = 0.5 * dt;
    const double tm = t + h;
    Vector a1 = a;
    auto residual = [&](const Vector& x) { return Vector(x - a - h * rom_rhs(r, x, tm)); };
    Vector res = residual(a1);
    double rn = res.lpNorm<Eigen::Infinity>();
    int it = 0;
    Eigen::PartialPivLU<Matrix> lu;
    while (rn > cfg.tol) {
        if (it >= cfg.max_iter)
            throw std::runtime_error("ROM implicit midpoint Newton did not converge (residual " +
                                     std::to_string(rn) + ")");
        lu.compute(Matrix::Identity(r.M, r.M) - h * rom_jacobian(r, a1));
        a1 -= lu.solve(res);
        res = residual(a1);
        rn = res.lpNorm<Eigen::Infinity>();
        ++it;
    }
    if (it > 0 && rn > 0.0) {
        // One more correction with the last factorization drives the
        // residual to round-off, which keeps quadratic invariants tight.
        const Vector trial = a1 - lu.solve(res);
        const Vector tres = residual(trial);
        if (tres.lpNorm<Eigen::Infinity>() < rn) a1 = trial;
    }
    if (iterations) *iterations = it;
    return 2.0 * a1 - a;
}

Vector rom_step_erk4(const RomOperators& r, const Vector& a, double t, double dt) {
    const Vector k1 = rom_rhs(r, a, t);
    const Vector k2 = rom_rhs(r, a + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = rom_rhs(r, a + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = rom_rhs(r, a + dt * k3, t + dt);
    return a + dt * (k1 / 6.0 + k2 / 3.0 + k3 / 3.0 + k4 / 6.0);
}

Vector reconstruct_velocity(const Matrix& Phi, const Vector& a, const Vector& V_bc) {
    if (Phi.cols() != a.size() || Phi.rows() != V_bc.size())
        throw std::invalid_argument("reconstruct_velocity: size mismatch");
    return Phi * a + V_bc;
}

PressureRecovery::PressureRecovery(const RomOperators& r) {
    if (!r.has_pressure()) throw std::invalid_argument("pressure recovery needs reduced pressure operators");
    cod_.setThreshold(1e-12);
    cod_.compute(r.L_r);
}

Vector PressureRecovery::solve_q(const RomOperators& r, const Vector& a, double t) const {
    Vector rhs;
    kernels::serial::quadratic(r.P2, a, rhs);
    rhs += r.P1 * a + r.P0;
    const double g = force_time_factor(r.schedule, t);
    if (r.p_act.size() == r.M_p) rhs += g * r.p_act;
    return cod_.solve(rhs);
}

std::pair<Vector, Vector> PressureRecovery::recover(const RomOperators& r, const Matrix& Pi, const Vector& a,
                                                    double t) const {
    Vector q = solve_q(r, a, t);
    Vector p = Pi * q;
    remove_mean(p);
    return {std::move(q), std::move(p)};
}

std::pair<Vector, Vector> recover_pressure(const RomOperators& r, const RomBasis& basis, const Vector& a,
                                           double t) {
    return PressureRecovery(r).recover(r, basis.Pi, a, t);
}

double rom_kinetic_energy(const Vector& a) { return 0.5 * a.squaredNorm(); }

RomTrajectory run_rom(const RomOperators& r, const Vector& a0, const IntegratorConfig& cfg, double t0) {
    const int n = cfg.num_steps();
    if (a0.size() != r.M) throw std::invalid_argument("run_rom: initial coefficient length mismatch");
    RomTrajectory traj;
    const int count = n / cfg.snapshot_stride + 1;
    traj.A.resize(r.M, count);
    traj.times.reserve(std::size_t(count));
    const RomNewtonConfig ncfg{cfg.newton_tol, cfg.newton_max_iter};

    Vector a = a0;
    int col = 0;
    traj.A.col(col++) = a;
    traj.times.push_back(t0);
    const auto start = std::chrono::steady_clock::now();
    for (int k = 1; k <= n; ++k) {
        const double t = t0 + (k - 1) * cfg.dt;
        if (cfg.method == TimeMethod::ImplicitMidpoint) a = rom_step_implicit_midpoint(r, a, t, cfg.dt, ncfg);
        else a = rom_step_erk4(r, a, t, cfg.dt);
        if (k % cfg.snapshot_stride == 0) {
            traj.A.col(col++) = a;
            traj.times.push_back(t0 + k * cfg.dt);
        }
    }
    traj.online_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return traj;
}

void write_rom_operators(const std::string& path, const RomOperators& r) {
    const Index m = r.M;
    io::BinaryWriter w(path);
    w.magic("ECROMOP1");
    w.u32(std::uint32_t(m));
    w.u32(std::uint32_t(r.M_p));
    w.f64(r.nu);
    w.vector(r.F0);
    w.vector(r.f_act);
    w.matrix(r.F1);
    w.matrix(r.D_r);
    for (Index k = 0; k < m; ++k) {
        // Slice k as an M x M column-major matrix S(i, l) = F2(k, i*M + l).
        Matrix S(m, m);
        for (Index i = 0; i < m; ++i)
            for (Index l = 0; l < m; ++l) S(i, l) = r.F2(k, i * m + l);
        w.matrix(S);
    }
    if (r.M_p > 0) {
        w.matrix(r.L_r);
        w.vector(r.P0);
        w.matrix(r.P1);
        w.matrix(Matrix(r.P2));
        w.vector(r.p_act);
    }
    w.close();
}

RomOperators read_rom_operators(const std::string& path, ForceSchedule schedule) {
    io::BinaryReader rd(path);
    rd.expect_magic("ECROMOP1");
    RomOperators r;
    r.M = rd.u32();
    r.M_p = rd.u32();
    r.nu = rd.f64();
    r.schedule = schedule;
    const Index m = r.M;
    r.F0 = rd.vector(m);
    r.f_act = rd.vector(m);
    r.F1 = rd.matrix(m, m);
    r.D_r = rd.matrix(m, m);
    r.F2.resize(m, m * m);
    for (Index k = 0; k < m; ++k) {
        const Matrix S = rd.matrix(m, m);
        for (Index i = 0; i < m; ++i)
            for (Index l = 0; l < m; ++l) r.F2(k, i * m + l) = S(i, l);
    }
    if (r.M_p > 0) {
        r.L_r = rd.matrix(r.M_p, r.M_p);
        r.P0 = rd.vector(r.M_p);
        r.P1 = rd.matrix(r.M_p, m);
        r.P2 = rd.matrix(r.M_p, m * m);
        r.p_act = rd.vector(r.M_p);
    }
    return r;
}

void write_trajectory(const std::string& path, const RomTrajectory& traj) {
    io::BinaryWriter w(path);
    w.magic("ECCOEF1");
    w.u32(std::uint32_t(traj.A.rows()));
    w.u32(std::uint32_t(traj.A.cols()));
    w.f64s(traj.times.data(), traj.times.size());
    w.matrix(traj.A);
    w.close();
}

RomTrajectory read_trajectory(const std::string& path) {
    io::BinaryReader r(path);
    r.expect_magic("ECCOEF1");
    const Index m = r.u32();
    const Index n = r.u32();
    RomTrajectory traj;
    traj.times.resize(std::size_t(n));
    r.f64s(traj.times.data(), traj.times.size());
    traj.A = r.matrix(m, n);
    return traj;
}

}  // namespace ecrom
