#pragma once

#include <string>

#include "ecrom/fom.hpp"
#include "ecrom/operators.hpp"

namespace ecrom {

enum class SvdMethod { ThinSvd, Snapshots };

/// Modes and singular values of Omega^{1/2} X, zero singular values dropped.
struct WeightedSvd {
    Matrix modes;  // Omega^{-1/2} U, all retained columns
    Vector sigma;
};

WeightedSvd weighted_svd(const Matrix& X, const Vector& omega, SvdMethod method = SvdMethod::ThinSvd);

struct VelocityBasis {
    Matrix Phi;
    Vector sigma;
    Matrix E;  // N_V x n_c, Omega-orthonormal
};

struct RomBasis {
    Matrix Phi;
    Matrix Pi;
    Vector sigma;
    Vector sigma_p;
    Matrix E;

    Index M() const { return Phi.cols(); }
    Index M_p() const { return Pi.cols(); }
    Index num_constraints() const { return E.cols(); }
};

/// Phi = Omega^{-1/2} U_M from the thin SVD of Omega^{1/2} X.
VelocityBasis weighted_pod(const Matrix& X, const Vector& omega, Index M,
                           SvdMethod method = SvdMethod::ThinSvd);

/// Basis [E, Phi~] whose span contains the columns of E exactly. E_raw is
/// Omega-orthonormalized first; snapshots are projected onto its complement.
VelocityBasis constrained_pod(const Matrix& X, const Vector& omega, const Matrix& E_raw, Index M,
                              SvdMethod method = SvdMethod::ThinSvd);

/// Omega_p-orthonormal pressure basis.
Matrix pressure_pod(const Matrix& P, const Vector& omega_p, Index M_p, Vector* sigma = nullptr,
                    SvdMethod method = SvdMethod::ThinSvd);

/// V_bc = Omega^{-1} G zeta with L zeta = y_M.
Vector compute_lifting(const FomOperators& ops, const PoissonSolver& poisson, const Vector& y_M);

/// a(0) = Phi^T Omega (V0 - V_bc)
Vector initial_coeffs(const Matrix& Phi, const Vector& omega, const Vector& V0, const Vector& V_bc);

/// Omega-orthonormalizes the columns of E (two passes of modified Gram-Schmidt).
Matrix orthonormalize(const Matrix& E, const Vector& omega);

/// "ECPOD1", u32 N_V, N_p, M, M_p, n_c, then sigma, Phi, Pi, E.
void write_basis(const std::string& path, const RomBasis& basis);
RomBasis read_basis(const std::string& path);

}  // namespace ecrom
