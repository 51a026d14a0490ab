#pragma once

#include <Eigen/Sparse>

#include "mflab/spectral.hpp"

namespace mflab {

using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct ExpmStats {
  int substeps = 0;
  int matvecs = 0;
  /// Norm of the last accepted Taylor term relative to the result, worst substep.
  double residual = 0.0;
};

/// exp(scale * A) v by scaled Taylor series. Throws NumericalError when the
/// series does not reach `tol` within the term budget.
CVector expm_multiply(const SparseOp& A, const CVector& v, cplx scale, double tol = 1e-15,
                      ExpmStats* stats = nullptr);
/// Same, applied to every column of V.
CMatrix expm_multiply_block(const SparseOp& A, const CMatrix& V, cplx scale, double tol = 1e-15,
                            ExpmStats* stats = nullptr);

/// Dense matrix exponential (Pade, scaling and squaring). Used as an oracle.
CMatrix dense_expm(const CMatrix& A);

/// Max column absolute sum.
double one_norm(const SparseOp& A);

/// max |A - A^dagger| entry.
double hermiticity_residual(const SparseOp& A);
double hermiticity_residual(const CMatrix& A);

/// Spectral (operator 2-) norm of a small dense matrix.
double operator_norm(const CMatrix& A);

}  // namespace mflab
