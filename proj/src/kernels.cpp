#include "ecrom/kernels.hpp"

namespace ecrom::kernels {

namespace {

inline double row_dot(const SparseMatrix& A, Index r, const double* x) {
    const auto* outer = A.outerIndexPtr();
    const auto* inner = A.innerIndexPtr();
    const double* val = A.valuePtr();
    double s = 0.0;
    for (auto k = outer[r]; k < outer[r + 1]; ++k) s += val[k] * x[inner[k]];
    return s;
}

inline double quadratic_row(const RowMatrix& F2, Index k, const double* a, Index m) {
    const double* row = F2.data() + k * F2.cols();
    double s = 0.0;
    for (Index i = 0; i < m; ++i) {
        const double* slice = row + i * m;
        double t = 0.0;
        for (Index l = 0; l < m; ++l) t += slice[l] * a[l];
        s += a[i] * t;
    }
    return s;
}

}  // namespace

namespace serial {

void spmv(const SparseMatrix& A, const double* x, double* y) {
    for (Index r = 0; r < A.rows(); ++r) y[r] = row_dot(A, r, x);
}

void convection(const FomOperators& ops, const Vector& vc, const Vector& vu, Vector& out) {
    const Index nf = ops.num_faces();
    Vector flux(nf);
    for (Index f = 0; f < nf; ++f)
        flux[f] = (row_dot(ops.I, f, vc.data()) + ops.y_I[f]) *
                  (row_dot(ops.A, f, vu.data()) + ops.y_A[f]);
    out.resize(ops.num_velocity());
    spmv(ops.K, flux.data(), out.data());
}

void quadratic(const RowMatrix& F2, const Vector& a, Vector& out) {
    const Index m = a.size();
    out.resize(F2.rows());
    for (Index k = 0; k < F2.rows(); ++k) out[k] = quadratic_row(F2, k, a.data(), m);
}

}  // namespace serial

namespace parallel {

void spmv(const SparseMatrix& A, const double* x, double* y) {
    const Index n = A.rows();
#pragma omp parallel for schedule(static) if (n > 4096)
    for (Index r = 0; r < n; ++r) y[r] = row_dot(A, r, x);
}

void convection(const FomOperators& ops, const Vector& vc, const Vector& vu, Vector& out) {
    const Index nf = ops.num_faces();
    Vector flux(nf);
#pragma omp parallel for schedule(static) if (nf > 4096)
    for (Index f = 0; f < nf; ++f)
        flux[f] = (row_dot(ops.I, f, vc.data()) + ops.y_I[f]) *
                  (row_dot(ops.A, f, vu.data()) + ops.y_A[f]);
    out.resize(ops.num_velocity());
    spmv(ops.K, flux.data(), out.data());
}

void quadratic(const RowMatrix& F2, const Vector& a, Vector& out) {
    const Index m = a.size();
    const Index rows = F2.rows();
    out.resize(rows);
#pragma omp parallel for schedule(static) if (rows >= 32)
    for (Index k = 0; k < rows; ++k) out[k] = quadratic_row(F2, k, a.data(), m);
}

}  // namespace parallel

}  // namespace ecrom::kernels
