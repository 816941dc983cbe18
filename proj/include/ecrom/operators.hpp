#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ecrom/grid.hpp"

namespace ecrom {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Time modulation of the body force: f(t) = g(t) * spatial.
enum class ForceSchedule { Steady, PulsedSine };

double force_time_factor(ForceSchedule schedule, double t);

/// Actuator disk as a vertical segment at x = x0 with thrust coefficient c_t.
struct Actuator {
    double x0 = 0.0;
    double y_min = -0.5;
    double y_max = 0.5;
    double c_t = 0.5;
};

struct BodyForce {
    Vector spatial;
    ForceSchedule schedule = ForceSchedule::Steady;

    double factor(double t) const { return force_time_factor(schedule, t); }
    Vector at(double t) const { return factor(t) * spatial; }
};

struct DivergenceParts {
    SparseMatrix M;
    Vector y_M;
};

struct GradientParts {
    SparseMatrix G;
    Vector y_G;
};

struct DiffusionParts {
    SparseMatrix D;
    SparseMatrix Q;
    Vector y_D;
};

struct ConvectionParts {
    SparseMatrix K;
    SparseMatrix I;
    SparseMatrix A;
    Vector y_I;
    Vector y_A;
};

struct FomOperators {
    Grid grid;
    SparseMatrix M, G, D, Q, K, I, A, L;
    Vector omega;    // diagonal of Omega (velocity volumes)
    Vector omega_p;  // diagonal of Omega_p (pressure volumes)
    Vector y_M, y_G, y_D, y_I, y_A;
    BodyForce force;

    Index num_velocity() const { return grid.num_velocity(); }
    Index num_pressure() const { return grid.num_pressure(); }
    Index num_faces() const { return K.cols(); }
};

DivergenceParts assemble_divergence(const Grid& grid);
GradientParts assemble_gradient(const SparseMatrix& M, const Grid& grid);
DiffusionParts assemble_diffusion(const Grid& grid);
ConvectionParts assemble_convection_parts(const Grid& grid);
BodyForce assemble_body_force(const Grid& grid, const Actuator& actuator);

/// Assembles every operator. Without an actuator the body force is zero.
FomOperators assemble_operators(const Grid& grid, const std::optional<Actuator>& actuator = {});

/// K((I vc + y_I) o (A vu + y_A)).
Vector convection(const FomOperators& ops, const Vector& vc, const Vector& vu);

/// K diag(I vc) A. Only defined for grids without inflow or outflow.
SparseMatrix convection_matrix(const FomOperators& ops, const Vector& vc);

/// Derivative of convection(V, V) with respect to V.
SparseMatrix convection_jacobian(const FomOperators& ops, const Vector& V);

/// e_u and e_v as the two columns of an N_V x 2 matrix.
Matrix momentum_indicators(const Grid& grid);

/// CSR dump: "ECROM1", u32 rows, u32 cols, u64 nnz, u64 row_ptr, u64 col_idx, f64 values.
void write_csr(const std::string& path, const SparseMatrix& A);
SparseMatrix read_csr(const std::string& path);

}  // namespace ecrom
