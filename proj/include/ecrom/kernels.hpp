#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ecrom/operators.hpp"

/// Hot loops in two flavours: a plain serial reference and an OpenMP
/// version. Both compute every output entry with the same sequence of
/// floating point operations, so their results agree bit for bit.
namespace ecrom::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace serial {
/// y = A x
void spmv(const SparseMatrix& A, const double* x, double* y);
/// out = K ((I vc + y_I) o (A vu + y_A))
void convection(const FomOperators& ops, const Vector& vc, const Vector& vu, Vector& out);
/// out_k = sum_c F2(k, c) (a kron a)_c without forming the Kronecker product.
void quadratic(const RowMatrix& F2, const Vector& a, Vector& out);
}  // namespace serial

namespace parallel {
void spmv(const SparseMatrix& A, const double* x, double* y);
void convection(const FomOperators& ops, const Vector& vc, const Vector& vu, Vector& out);
void quadratic(const RowMatrix& F2, const Vector& a, Vector& out);
}  // namespace parallel

}  // namespace ecrom::kernels
