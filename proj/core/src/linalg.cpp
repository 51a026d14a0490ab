#include "mflab/linalg.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace mflab {

double one_norm(const SparseOp& A) {
  RVector col = RVector::Zero(A.cols());
  for (int r = 0; r < A.outerSize(); ++r)
    for (SparseOp::InnerIterator it(A, r); it; ++it) col[it.col()] += std::abs(it.value());
  return col.size() > 0 ? col.maxCoeff() : 0.0;
}

namespace {


template <class Dense>
Dense taylor_action(const SparseOp& A, const Dense& v, cplx scale, double tol, ExpmStats* stats) {
  constexpr int kMaxTerms = 80;
  // substep norm; terms peak near theta^theta / theta!, so 4 costs about one digit
  const double theta = 4.0;
  const double norm = std::abs(scale) * one_norm(A);
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm / theta)));
  const cplx h = scale / static_cast<double>(substeps);

  ExpmStats local;
  local.substeps = substeps;
  Dense x = v;
  for (int s = 0; s < substeps; ++s) {
    Dense term = x;
    Dense sum = x;
    double last = 0.0;
    bool converged = false;
    int small_in_row = 0;
    for (int k = 1; k <= kMaxTerms; ++k) {
      term = (h / static_cast<double>(k)) * (A * term);
      ++local.matvecs;
      sum += term;
      double tn = term.norm();
      double sn = sum.norm();
      last = sn > 0.0 ? tn / sn : tn;
      if (last <= tol) {
        if (++small_in_row >= 2) {
          converged = true;
          break;
        }
      } else {
        small_in_row = 0;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "expm_multiply: tolerance " << tol << " not reached; achieved residual " << last;
      throw NumericalError(os.str());
    }
    local.residual = std::max(local.residual, last);
    x = std::move(sum);
  }
  if (!x.allFinite()) throw NumericalError("expm_multiply: non-finite result");
  if (stats) *stats = local;
  return x;
}

template <class Dense>
Dense shifted_action(const SparseOp& A, const Dense& v, cplx scale, double tol, ExpmStats* stats) {
  if (A.rows() != A.cols() || A.cols() != v.rows()) throw InvalidArgument("expm_multiply: shape mismatch");
  // shift out the mean diagonal; it only contributes a scalar factor
  cplx mu = A.rows() > 0 ? A.diagonal().sum() / static_cast<double>(A.rows()) : cplx(0.0);
  if (mu == cplx(0.0)) return taylor_action(A, v, scale, tol, stats);
  SparseOp I(A.rows(), A.cols());
  I.setIdentity();
  SparseOp B = A - mu * I;
  return std::exp(scale * mu) * taylor_action(B, v, scale, tol, stats);
}

}  // namespace

CVector expm_multiply(const SparseOp& A, const CVector& v, cplx scale, double tol, ExpmStats* stats) {
  return shifted_action(A, v, scale, tol, stats);
}

CMatrix expm_multiply_block(const SparseOp& A, const CMatrix& V, cplx scale, double tol, ExpmStats* stats) {
  return shifted_action(A, V, scale, tol, stats);
}

CMatrix dense_expm(const CMatrix& A) { return A.exp(); }

double hermiticity_residual(const SparseOp& A) {
  SparseOp diff = A - SparseOp(A.adjoint());
  double worst = 0.0;
  for (int r = 0; r < diff.outerSize(); ++r)
    for (SparseOp::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double hermiticity_residual(const CMatrix& A) { return (A - A.adjoint()).cwiseAbs().maxCoeff(); }

double operator_norm(const CMatrix& A) {
  Eigen::JacobiSVD<CMatrix> svd(A);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace mflab
