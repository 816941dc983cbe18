#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ecrom/operators.hpp"

namespace ecrom {

enum class TimeMethod { ImplicitMidpoint, ExplicitRK4 };

struct IntegratorConfig {
    TimeMethod method = TimeMethod::ExplicitRK4;
    double dt = 0.01;
    double t_end = 1.0;
    double newton_tol = 1e-12;
    int newton_max_iter = 20;
    int snapshot_stride = 1;

    void validate() const;
    /// Number of steps to reach t_end; t_end must be a multiple of dt.
    int num_steps() const;
};

struct StateVector {
    Vector V;
    Vector p;
    double t = 0.0;
};

struct SnapshotSet {
    Matrix X;  // N_V x K, lifting field subtracted
    Matrix P;  // N_p x K
    std::vector<double> times;
    Vector V_bc;
    double nu = 0.0;

    Index count() const { return X.cols(); }
};

/// Direct solver for L p = rhs, factorized once. When L is singular (no
/// outflow edge) one pressure is pinned during the solve and the mean of the
/// result is removed afterwards.
class PoissonSolver {
public:
    explicit PoissonSolver(const FomOperators& ops);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;

    Vector solve(const Vector& rhs) const;
    bool singular() const { return singular_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    bool singular_ = false;
};

/// Removes the spatial mean of p (uniform pressure volumes).
void remove_mean(Vector& p);

struct NewtonStats {
    int iterations = 0;
    double residual = 0.0;
};

class FomSolver {
public:
    FomSolver(const FomOperators& ops, double nu, bool with_convection = true);

    const FomOperators& ops() const { return *ops_; }
    double nu() const { return nu_; }
    const PoissonSolver& poisson() const { return poisson_; }

    /// -C(V, V) + nu (D V + y_D) + f(t); no pressure gradient and no y_G.
    Vector rhs_cd(const Vector& V, double t) const;
    Vector ppe_solve(const Vector& rhs) const { return poisson_.solve(rhs); }
    /// Returns V - Omega^-1 G phi with L phi = M V - y_M.
    Vector project(const Vector& V) const;
    /// Pressure consistent with V at time t: L p = M Omega^-1 (F(V, t) - y_G).
    Vector pressure(const Vector& V, double t) const;

    StateVector step_erk4(const StateVector& s, double dt) const;
    StateVector step_implicit_midpoint(const StateVector& s, const IntegratorConfig& cfg,
                                       NewtonStats* stats = nullptr) const;
    StateVector step(const StateVector& s, const IntegratorConfig& cfg) const;

    /// Integrates to cfg.t_end and stores the initial state plus every
    /// snapshot_stride-th state with V_bc subtracted.
    SnapshotSet run(const StateVector& init, const IntegratorConfig& cfg, const Vector& V_bc) const;

private:
    const FomOperators* ops_;
    double nu_;
    bool with_convection_;
    PoissonSolver poisson_;
    Vector omega_inv_;
};

double kinetic_energy(const FomOperators& ops, const Vector& V);
/// (P_u, P_v) = (e_u^T Omega V, e_v^T Omega V)
std::pair<double, double> momentum(const FomOperators& ops, const Vector& V);

/// "ECSNAP1", u32 N_V, u32 N_p, u32 K, f64 nu, times, V_bc, X, P.
void write_snapshots(const std::string& path, const SnapshotSet& snaps);
SnapshotSet read_snapshots(const std::string& path);

}  // namespace ecrom
