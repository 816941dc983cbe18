#include "ecrom/pod.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "ecrom/io.hpp"

namespace ecrom {

namespace {

constexpr double kRankTol = 1e-13;

/// Flips each column so that its largest-magnitude entry is positive.
void fix_signs(Matrix& U) {
    for (Index j = 0; j < U.cols(); ++j) {
        Index imax = 0;
        U.col(j).cwiseAbs().maxCoeff(&imax);
        if (U(imax, j) < 0.0) U.col(j) = -U.col(j);
    }
}

void thin_svd(const Matrix& Xh, Matrix& U, Vector& s) {
    if (Xh.rows() >= Xh.cols()) {
        // QR first so the SVD only sees the small triangular factor.
        Eigen::HouseholderQR<Matrix> qr(Xh);
        const Index k = Xh.cols();
        const Matrix R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Matrix> svd(R, Eigen::ComputeThinU);
        const Matrix Q = qr.householderQ() * Matrix::Identity(Xh.rows(), k);
        U = Q * svd.matrixU();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Matrix> svd(Xh, Eigen::ComputeThinU);
        U = svd.matrixU();
        s = svd.singularValues();
    }
}

void snapshot_svd(const Matrix& Xh, Matrix& U, Vector& s) {
    const Matrix C = Xh.transpose() * Xh;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
    if (eig.info() != Eigen::Success) throw std::runtime_error("method of snapshots: eigensolver failed");
    const Index k = C.rows();
    s.resize(k);
    U.resize(Xh.rows(), k);
    for (Index j = 0; j < k; ++j) {
        const Index src = k - 1 - j;  // eigenvalues come ascending
        s[j] = std::sqrt(std::max(0.0, eig.eigenvalues()[src]));
        if (s[j] > 0.0) U.col(j) = Xh * eig.eigenvectors().col(src) / s[j];
        else U.col(j).setZero();
    }
}

}  // namespace

WeightedSvd weighted_svd(const Matrix& X, const Vector& omega, SvdMethod method) {
    if (X.rows() != omega.size()) throw std::invalid_argument("weighted_svd: weight length mismatch");
    const Vector sq = omega.cwiseSqrt();
    const Matrix Xh = sq.asDiagonal() * X;
    Matrix U;
    Vector s;
    if (X.cols() == 0) {
        U.resize(X.rows(), 0);
    } else if (method == SvdMethod::ThinSvd) {
        thin_svd(Xh, U, s);
    } else {
        snapshot_svd(Xh, U, s);
    }
    Index rank = 0;
    if (s.size() > 0 && s[0] > 0.0)
        while (rank < s.size() && s[rank] >= kRankTol * s[0]) ++rank;
    Matrix Ur = U.leftCols(rank);
    fix_signs(Ur);
    WeightedSvd out;
    out.modes = sq.cwiseInverse().asDiagonal() * Ur;
    out.sigma = s.head(rank);
    return out;
}

VelocityBasis weighted_pod(const Matrix& X, const Vector& omega, Index M, SvdMethod method) {
    if (M < 1) throw std::invalid_argument("weighted_pod: need at least one mode");
    WeightedSvd svd = weighted_svd(X, omega, method);
    if (M > svd.sigma.size())
        throw std::invalid_argument("weighted_pod: M = " + std::to_string(M) +
                                    " exceeds the numerical rank " + std::to_string(svd.sigma.size()));
    return {svd.modes.leftCols(M), svd.sigma, Matrix(omega.size(), 0)};
}

Matrix orthonormalize(const Matrix& E_raw, const Vector& omega) {
    Matrix E = E_raw;
    for (Index j = 0; j < E.cols(); ++j) {
        const double n0 = std::sqrt(E.col(j).dot(omega.cwiseProduct(E.col(j))));
        for (int pass = 0; pass < 2; ++pass)
            for (Index i = 0; i < j; ++i) E.col(j) -= E.col(i).dot(omega.cwiseProduct(E.col(j))) * E.col(i);
        const double n = std::sqrt(E.col(j).dot(omega.cwiseProduct(E.col(j))));
        if (!(n > 1e-10 * n0) || n == 0.0) throw std::invalid_argument("constraint columns are linearly dependent");
        E.col(j) /= n;
    }
    return E;
}

VelocityBasis constrained_pod(const Matrix& X, const Vector& omega, const Matrix& E_raw, Index M,
                              SvdMethod method) {
    const Index nc = E_raw.cols();
    if (E_raw.rows() != X.rows()) throw std::invalid_argument("constrained_pod: constraint length mismatch");
    if (M < nc) throw std::invalid_argument("constrained_pod: M must be at least the number of constraints");
    VelocityBasis out;
    out.E = orthonormalize(E_raw, omega);
    const Matrix Xt = X - out.E * (out.E.transpose() * omega.asDiagonal() * X);
    out.Phi.resize(X.rows(), M);
    out.Phi.leftCols(nc) = out.E;
    if (M > nc) {
        WeightedSvd svd = weighted_svd(Xt, omega, method);
        if (M - nc > svd.sigma.size())
            throw std::invalid_argument("constrained_pod: M = " + std::to_string(M) +
                                        " exceeds the numerical rank of the reduced snapshots");
        out.Phi.rightCols(M - nc) = svd.modes.leftCols(M - nc);
        out.sigma = svd.sigma;
    }
    return out;
}

Matrix pressure_pod(const Matrix& P, const Vector& omega_p, Index M_p, Vector* sigma, SvdMethod method) {
    VelocityBasis b = weighted_pod(P, omega_p, M_p, method);
    if (sigma) *sigma = b.sigma;
    return b.Phi;
}

Vector compute_lifting(const FomOperators& ops, const PoissonSolver& poisson, const Vector& y_M) {
    if (y_M.size() != ops.num_pressure()) throw std::invalid_argument("compute_lifting: y_M length mismatch");
    if (y_M.isZero(0.0)) return Vector::Zero(ops.num_velocity());
    const Vector zeta = poisson.solve(y_M);
    return ops.omega.cwiseInverse().asDiagonal() * (ops.G * zeta);
}

Vector initial_coeffs(const Matrix& Phi, const Vector& omega, const Vector& V0, const Vector& V_bc) {
    if (V0.size() != Phi.rows() || V_bc.size() != Phi.rows() || omega.size() != Phi.rows())
        throw std::invalid_argument("initial_coeffs: length mismatch");
    return Phi.transpose() * omega.cwiseProduct(V0 - V_bc);
}

void write_basis(const std::string& path, const RomBasis& b) {
    const Index nc = b.num_constraints();
    const Index ns = b.M() - nc;
    io::BinaryWriter w(path);
    w.magic("ECPOD1");
    w.u32(std::uint32_t(b.Phi.rows()));
    w.u32(std::uint32_t(b.Pi.rows()));
    w.u32(std::uint32_t(b.M()));
    w.u32(std::uint32_t(b.M_p()));
    w.u32(std::uint32_t(nc));
    const Vector s = b.sigma.head(std::min<Index>(ns, b.sigma.size()));
    w.vector(s);
    for (Index k = s.size(); k < ns; ++k) w.f64(0.0);
    w.matrix(b.Phi);
    w.matrix(b.Pi);
    w.matrix(b.E);
    w.close();
}

RomBasis read_basis(const std::string& path) {
    io::BinaryReader r(path);
    r.expect_magic("ECPOD1");
    const Index nv = r.u32();
    const Index np = r.u32();
    const Index m = r.u32();
    const Index mp = r.u32();
    const Index nc = r.u32();
    if (nc > m) throw std::runtime_error("corrupt basis file: more constraints than modes");
    RomBasis b;
    b.sigma = r.vector(m - nc);
    b.Phi = r.matrix(nv, m);
    b.Pi = r.matrix(np, mp);
    b.E = r.matrix(nv, nc);
    return b;
}

}  // namespace ecrom
