#pragma once

// Dense complex linear algebra for small dimensions: Hermitian eigensolves,
// Takagi factorization, positive-definiteness tests, unitary exponentials.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "siegel/error.hpp"

namespace siegel {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// A = q * diag(mu) * q^T with q unitary and mu ascending, nonnegative.
struct TakagiFactors {
  ComplexMatrix q;
  RealVector mu;

  ComplexMatrix reconstruct() const { return q * mu.cast<Complex>().asDiagonal() * q.transpose(); }
};

struct HermitianEigen {
  RealVector values;  // ascending
  ComplexMatrix vectors;
};

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidPoint, std::string(who) + ": expected a nonempty square matrix");
  }
}

inline double symmetry_residual(const ComplexMatrix& a) { return (a - a.transpose()).norm(); }
inline double hermitian_residual(const ComplexMatrix& a) { return (a - a.adjoint()).norm(); }

inline ComplexMatrix symmetrized(const ComplexMatrix& a) { return 0.5 * (a + a.transpose()); }
inline ComplexMatrix hermitized(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

// Eigensolve of a matrix already known to be Hermitian (no validation).
inline HermitianEigen hermitian_eigen_unchecked(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitized(h));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolve did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Flip the column so its first largest-magnitude entry has a nonnegative real part.
inline void canonicalize_column_sign(ComplexMatrix& q, Eigen::Index j) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const double m = std::abs(q(i, j));
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      arg = i;
    }
  }
  if (q(arg, j).real() < 0.0) q.col(j) *= -1.0;
}

// Recursive Takagi factorization through the real symmetric embedding
//   T = [[Re A, Im A], [Im A, -Re A]],
// whose eigenpairs (+mu, [u; w]) give Takagi vectors q = u + i w. The
// eigenvectors for well separated positive eigenvalues are used directly;
// the remaining small-singular-value subspace is orthonormalized and
// factored recursively at its own scale. Columns come back unsorted.
inline void takagi_unsorted(const ComplexMatrix& a, ComplexMatrix& q, RealVector& mu) {
  const Eigen::Index n = a.rows();
  q.setZero(n, n);
  mu.setZero(n);
  const double scale = a.norm();
  if (scale == 0.0) {
    q.setIdentity();
    return;
  }
  if (n == 1) {
    const Complex b = a(0, 0);
    mu(0) = std::abs(b);
    q(0, 0) = std::polar(1.0, 0.5 * std::arg(b));
    return;
  }

  RealMatrix t(2 * n, 2 * n);
  const RealMatrix x = a.real();
  const RealMatrix y = a.imag();
  t.topLeftCorner(n, n) = x;
  t.topRightCorner(n, n) = y;
  t.bottomLeftCorner(n, n) = y;
  t.bottomRightCorner(n, n) = -x;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (t + t.transpose()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Takagi embedding eigensolve did not converge");
  }
  const RealVector& lam = es.eigenvalues();
  const RealMatrix& vec = es.eigenvectors();

  const double split = 1e-3 * scale;
  Eigen::Index filled = 0;
  for (Eigen::Index j = 2 * n - 1; j >= 0 && filled < n; --j) {
    if (lam(j) <= split) break;
    ComplexVector col(n);
    for (Eigen::Index i = 0; i < n; ++i) col(i) = Complex(vec(i, j), vec(n + i, j));
    col.normalize();
    q.col(filled) = col;
    mu(filled) = lam(j);
    ++filled;
  }
  const Eigen::Index small = n - filled;
  if (small == 0) return;

  // The remaining Takagi vectors span the orthogonal complement of the
  // columns found so far; complete it from unit vectors (largest residual first).
  ComplexMatrix basis(n, small);
  Eigen::Index found = 0;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (found < small) {
    Eigen::Index pick = -1;
    double best = 0.0;
    ComplexVector best_vec;
    for (Eigen::Index e = 0; e < n; ++e) {
      if (used[static_cast<std::size_t>(e)]) continue;
      ComplexVector v = ComplexVector::Unit(n, e);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < filled; ++c) v -= q.col(c) * q.col(c).dot(v);
        for (Eigen::Index b = 0; b < found; ++b) v -= basis.col(b) * basis.col(b).dot(v);
      }
      const double nv = v.norm();
      if (nv > best * (1.0 + 1e-12)) {
        best = nv;
        pick = e;
        best_vec = v;
      }
    }
    if (pick < 0 || best < 1e-6) {
      throw Error(ErrorCode::ConvergenceFailure, "Takagi: could not complete the orthonormal basis");
    }
    used[static_cast<std::size_t>(pick)] = true;
    basis.col(found++) = best_vec / best;
  }

  const ComplexMatrix block = symmetrized(basis.adjoint() * a * basis.conjugate());
  ComplexMatrix vq;
  RealVector vmu;
  takagi_unsorted(block, vq, vmu);
  q.rightCols(small) = basis * vq;
  mu.tail(small) = vmu;
}

}  // namespace detail

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
inline HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  detail::require_square(h, "hermitian_eigen");
  if (detail::hermitian_residual(h) > 1e-12 * h.norm()) {
    throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within 1e-12 relative");
  }
  return detail::hermitian_eigen_unchecked(h);
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& h) { return hermitian_eigen(h).values; }

/// True iff the smallest eigenvalue of the Hermitian matrix h exceeds tol.
inline bool is_positive_definite(const ComplexMatrix& h, double tol) {
  detail::require_square(h, "is_positive_definite");
  if (detail::hermitian_residual(h) > tol * (1.0 + h.norm())) {
    throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");
  }
  return detail::hermitian_eigen_unchecked(h).values(0) > tol;
}

/// Takagi factorization a = q diag(mu) q^T of a complex symmetric matrix.
///
/// mu is ascending. Only q diag(mu) q^T is meaningful: q is unique up to
/// the stabilizer of diag(mu) (column signs when mu is simple and nonzero).
/// Column signs are fixed so the first largest-magnitude entry of each
/// column has nonnegative real part; ties in mu (within 1e-12 ||A||) are ordered by the
/// entrywise magnitudes of the columns.
inline TakagiFactors takagi_decompose(const ComplexMatrix& a, double tol = 1e-12) {
  detail::require_square(a, "takagi_decompose");
  const double norm = a.norm();
  if (detail::symmetry_residual(a) > tol * norm) {
    throw Error(ErrorCode::NotSymmetric, "matrix is not complex symmetric within tolerance");
  }
  const ComplexMatrix sym = detail::symmetrized(a);
  ComplexMatrix q;
  RealVector mu;
  detail::takagi_unsorted(sym, q, mu);

  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return mu(i) < mu(j); });

  // Within runs of (numerically) equal mu, order by |column| lexicographically.
  const double tie = 1e-12 * std::max(norm, 1e-300);
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i == order.size() || mu(order[i]) - mu(order[i - 1]) > tie) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(run_start),
                       order.begin() + static_cast<std::ptrdiff_t>(i), [&](Eigen::Index x, Eigen::Index y) {
                         for (Eigen::Index r = 0; r < n; ++r) {
                           const double ax = std::abs(q(r, x));
                           const double ay = std::abs(q(r, y));
                           if (std::abs(ax - ay) > 1e-12) return ax < ay;
                         }
                         return false;
                       });
      run_start = i;
    }
  }

  TakagiFactors out{ComplexMatrix(n, n), RealVector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.q.col(j) = q.col(order[static_cast<std::size_t>(j)]);
    out.mu(j) = std::max(0.0, mu(order[static_cast<std::size_t>(j)]));
    // A column sign flip leaves q_j q_j^T unchanged.
    detail::canonicalize_column_sign(out.q, j);
  }
  // Tied values are replaced by their mean so mu is exactly monotone.
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    double acc = out.mu(start);
    while (end < n && out.mu(end) - out.mu(end - 1) <= tie && -(out.mu(end) - out.mu(end - 1)) <= tie) acc += out.mu(end++);
    out.mu.segment(start, end - start).setConstant(acc / static_cast<double>(end - start));
    start = end;
  }

  const double residual = (sym - out.reconstruct()).norm();
  const double unitarity = (out.q * out.q.adjoint() - ComplexMatrix::Identity(n, n)).norm();
  if (!(residual <= 1e-9 * (1.0 + norm)) || !(unitarity <= 1e-9)) {
    throw Error(ErrorCode::ConvergenceFailure, "Takagi factorization failed its residual check");
  }
  return out;
}

/// exp(x) for anti-Hermitian x, computed from the eigendecomposition of i x.
inline ComplexMatrix unitary_exp(const ComplexMatrix& x) {
  detail::require_square(x, "unitary_exp");
  if ((x + x.adjoint()).norm() > 1e-12 * (1.0 + x.norm())) {
    throw Error(ErrorCode::NotAntiHermitian, "matrix is not anti-Hermitian");
  }
  const ComplexMatrix h = detail::hermitized(kI * x);
  const HermitianEigen eig = detail::hermitian_eigen_unchecked(h);
  ComplexVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -eig.values(k));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// Orthonormal basis of u(n) under Re Tr(U V^dagger), in the order
/// alpha_{k,l} (k<l, lexicographic), beta_k, beta_{k,l} (k<l, lexicographic).
inline std::vector<ComplexMatrix> unitary_algebra_basis(Eigen::Index n) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      ComplexMatrix m = ComplexMatrix::Zero(n, n);
      m(l, k) = r;
      m(k, l) = -r;
      basis.push_back(std::move(m));
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(k, k) = kI;
    basis.push_back(std::move(m));
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      ComplexMatrix m = ComplexMatrix::Zero(n, n);
      m(l, k) = kI * r;
      m(k, l) = kI * r;
      basis.push_back(std::move(m));
    }
  }
  return basis;
}

}  // namespace siegel
