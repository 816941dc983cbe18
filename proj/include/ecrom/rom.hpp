#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ecrom/fom.hpp"
#include "ecrom/kernels.hpp"
#include "ecrom/pod.hpp"

namespace ecrom {

using RowMatrix = kernels::RowMatrix;

/// Reduced operators for da/dt = F2 (a kron a) + F1 a + F0 + g(t) f_act.
///
/// Column i*M + l of F2 multiplies a_i a_l, where i indexes the convecting
/// mode and l the convected mode. Row k reshaped to M x M is the slice
/// applied as a^T S_k a.
struct RomOperators {
    Index M = 0;
    Index M_p = 0;
    double nu = 0.0;
    ForceSchedule schedule = ForceSchedule::Steady;

    RowMatrix F2;
    Matrix F1;
    Vector F0;
    Vector f_act;
    Matrix D_r;

    Matrix L_r;
    RowMatrix P2;
    Matrix P1;
    Vector P0;
    Vector p_act;

    bool has_pressure() const { return M_p > 0; }
    /// C_{r,i}(k, l) = Phi_k^T C~(Phi_i) Phi_l for the homogeneous part.
    Matrix convection_slice(Index i) const;
};

struct PrecomputeOptions {
    bool with_pressure = true;
    bool parallel = true;
};

RomOperators precompute_rom_operators(const FomOperators& ops, const RomBasis& basis, const Vector& V_bc,
                                      double nu, const PrecomputeOptions& opt = {});

Vector rom_rhs(const RomOperators& r, const Vector& a, double t);
Matrix rom_jacobian(const RomOperators& r, const Vector& a);

struct RomNewtonConfig {
    double tol = 1e-12;
    int max_iter = 20;
};

Vector rom_step_implicit_midpoint(const RomOperators& r, const Vector& a, double t, double dt,
                                  const RomNewtonConfig& cfg = {}, int* iterations = nullptr);
Vector rom_step_erk4(const RomOperators& r, const Vector& a, double t, double dt);

Vector reconstruct_velocity(const Matrix& Phi, const Vector& a, const Vector& V_bc);

/// Dense factorization of L_r, built once per operator set.
class PressureRecovery {
public:
    explicit PressureRecovery(const RomOperators& r);
    /// Returns (q, p_r) with p_r = Pi q shifted to zero mean.
    std::pair<Vector, Vector> recover(const RomOperators& r, const Matrix& Pi, const Vector& a, double t) const;
    Vector solve_q(const RomOperators& r, const Vector& a, double t) const;

private:
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
};

std::pair<Vector, Vector> recover_pressure(const RomOperators& r, const RomBasis& basis, const Vector& a,
                                           double t);

double rom_kinetic_energy(const Vector& a);

struct RomTrajectory {
    std::vector<double> times;
    Matrix A;  // M x n, one column per stored time
    double online_seconds = 0.0;
};

/// Integrates from a0 at t0 to cfg.t_end, storing every snapshot_stride-th step.
RomTrajectory run_rom(const RomOperators& r, const Vector& a0, const IntegratorConfig& cfg, double t0 = 0.0);

/// "ECROMOP1", u32 M, u32 M_p, f64 nu, then F0, f_act, F1, D_r, F2 slices, L_r, P0, P1, P2.
void write_rom_operators(const std::string& path, const RomOperators& r);
RomOperators read_rom_operators(const std::string& path, ForceSchedule schedule);

/// "ECCOEF1", u32 M, u32 n, times, coefficients column-major.
void write_trajectory(const std::string& path, const RomTrajectory& traj);
RomTrajectory read_trajectory(const std::string& path);

}  // namespace ecrom
