#pragma once

// Charts and frame geometry of the Siegel half-space: the half-space and
// disk models, Cayley maps, the cross-ratio, spectral coordinates, the disk
// metric, the orthonormal frame and the normal drift of the orbit foliation.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "siegel/error.hpp"
#include "siegel/linalg.hpp"

namespace siegel {

/// Gap tolerance on spectral coordinates (sigma gaps and sigma^1 > 0).
inline constexpr double kChamberGapTol = 1e-10;

/// Complex symmetric Z with Im Z positive definite.
class SiegelPoint {
 public:
  explicit SiegelPoint(ComplexMatrix z) : z_(std::move(z)) {
    detail::require_square(z_, "SiegelPoint");
    if (detail::symmetry_residual(z_) > 1e-12 * z_.norm()) {
      throw Error(ErrorCode::NotSymmetric, "SiegelPoint must be complex symmetric");
    }
    z_ = detail::symmetrized(z_);
    const ComplexMatrix im = z_.imag().cast<Complex>();
    if (!is_positive_definite(im, 1e-12)) {
      throw Error(ErrorCode::InvalidPoint, "imaginary part is not positive definite");
    }
  }

  const ComplexMatrix& matrix() const noexcept { return z_; }
  Eigen::Index dim() const noexcept { return z_.rows(); }

 private:
  ComplexMatrix z_;
};

/// Complex symmetric R with I - R conj(R) positive definite.
class DiskPoint {
 public:
  explicit DiskPoint(ComplexMatrix r) : r_(std::move(r)) {
    detail::require_square(r_, "DiskPoint");
    if (detail::symmetry_residual(r_) > 1e-12 * r_.norm()) {
      throw Error(ErrorCode::NotSymmetric, "DiskPoint must be complex symmetric");
    }
    r_ = detail::symmetrized(r_);
    if (!inside(r_)) throw Error(ErrorCode::InvalidPoint, "I - R conj(R) is not positive definite");
  }

  /// Membership test for an already symmetric matrix.
  static bool inside(const ComplexMatrix& r, double tol = 1e-12) {
    const Eigen::Index n = r.rows();
    const ComplexMatrix gap = ComplexMatrix::Identity(n, n) - r * r.conjugate();
    return detail::hermitian_eigen_unchecked(gap).values(0) > tol;
  }

  const ComplexMatrix& matrix() const noexcept { return r_; }
  Eigen::Index dim() const noexcept { return r_.rows(); }

 private:
  ComplexMatrix r_;
};

/// Interior point of the chamber 0 < sigma^1 < ... < sigma^n.
class SpectralCoord {
 public:
  explicit SpectralCoord(RealVector sigma) : sigma_(std::move(sigma)) { validate(sigma_); }
  explicit SpectralCoord(std::span<const double> sigma)
      : SpectralCoord(RealVector(Eigen::Map<const RealVector>(sigma.data(), static_cast<Eigen::Index>(sigma.size())))) {}
  SpectralCoord(std::initializer_list<double> sigma)
      : SpectralCoord(std::span<const double>(sigma.begin(), sigma.size())) {}

  static void validate(const RealVector& s) {
    if (s.size() == 0) throw Error(ErrorCode::OutOfChamber, "empty spectral coordinate");
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (!std::isfinite(s(k)) || s(k) < 0.0) {
        throw Error(ErrorCode::OutOfChamber, "sigma must be finite and positive");
      }
    }
    if (s(0) <= kChamberGapTol) throw Error(ErrorCode::DegenerateSpectrum, "sigma^1 at the chamber wall");
    for (Eigen::Index k = 1; k < s.size(); ++k) {
      if (s(k) - s(k - 1) <= kChamberGapTol) {
        throw Error(ErrorCode::DegenerateSpectrum, "sigma gaps below tolerance or unordered");
      }
    }
  }

  /// For integrators that already enforce a stricter gap floor.
  static SpectralCoord unchecked(RealVector sigma) { return SpectralCoord(std::move(sigma), Unchecked{}); }

  const RealVector& values() const noexcept { return sigma_; }
  Eigen::Index dim() const noexcept { return sigma_.size(); }
  double operator[](Eigen::Index k) const { return sigma_(k); }

 private:
  struct Unchecked {};
  SpectralCoord(RealVector sigma, Unchecked) : sigma_(std::move(sigma)) {}

  RealVector sigma_;
};

/// Orthonormal frame at a disk point: L_1..L_n (normal to the orbit) and
/// the n^2 orbit directions U_(k), U_(k,l,1), U_(k,l,2), all as dR values.
struct FrameBasis {
  std::vector<ComplexMatrix> l_vectors;
  std::vector<ComplexMatrix> u_vectors;
  TakagiFactors base;

  /// L_1..L_n, U_(1)..U_(n), U_(k,l,1) lexicographic, U_(k,l,2) lexicographic.
  std::vector<ComplexMatrix> ordered() const {
    std::vector<ComplexMatrix> all = l_vectors;
    all.insert(all.end(), u_vectors.begin(), u_vectors.end());
    return all;
  }
};

namespace detail {

inline Eigen::PartialPivLU<ComplexMatrix> checked_lu(const ComplexMatrix& m, const char* what) {
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularShift, what);
  return lu;
}

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

inline SpectralCoord sigma_from_lambda(const RealVector& lam) {
  const Eigen::Index n = lam.size();
  if (lam(0) < kChamberGapTol) throw Error(ErrorCode::DegenerateSpectrum, "lambda_1 below gap tolerance");
  for (Eigen::Index k = 1; k < n; ++k) {
    if (lam(k) - lam(k - 1) < kChamberGapTol) throw Error(ErrorCode::DegenerateSpectrum, "repeated lambda");
  }
  if (lam(n - 1) >= 1.0 - 1e-14) throw Error(ErrorCode::OutOfChamber, "lambda reaches 1");
  RealVector s(n);
  for (Eigen::Index k = 0; k < n; ++k) s(k) = 2.0 * std::atanh(std::sqrt(lam(k)));
  return SpectralCoord(std::move(s));
}

}  // namespace detail

/// R = (Z - iI)(Z + iI)^{-1}.
inline DiskPoint cayley_to_disk(const SiegelPoint& z) {
  const Eigen::Index n = z.dim();
  const ComplexMatrix& zm = z.matrix();
  auto lu = detail::checked_lu(zm + kI * detail::identity(n), "Z + iI is numerically singular");
  // Z - iI and (Z + iI)^{-1} commute.
  return DiskPoint(detail::symmetrized(lu.solve(zm - kI * detail::identity(n))));
}

/// Z = i (I + R)(I - R)^{-1}.
inline SiegelPoint cayley_to_halfspace(const DiskPoint& r) {
  const Eigen::Index n = r.dim();
  const ComplexMatrix& rm = r.matrix();
  auto lu = detail::checked_lu(detail::identity(n) - rm, "I - R is numerically singular");
  return SiegelPoint(detail::symmetrized(kI * lu.solve(detail::identity(n) + rm)));
}

/// Matrix-valued cross-ratio (Z-Z1)(Z-conj Z1)^{-1}(conj Z-conj Z1)(conj Z-Z1)^{-1}.
inline ComplexMatrix cross_ratio(const SiegelPoint& z, const SiegelPoint& z1) {
  if (z.dim() != z1.dim()) throw Error(ErrorCode::ShapeMismatch, "cross_ratio: dimension mismatch");
  const ComplexMatrix& a = z.matrix();
  const ComplexMatrix& b = z1.matrix();
  const ComplexMatrix ac = a.conjugate();
  const ComplexMatrix bc = b.conjugate();
  auto lu1 = detail::checked_lu(a - bc, "Z - conj(Z1) is numerically singular");
  auto lu2 = detail::checked_lu(ac - b, "conj(Z) - Z1 is numerically singular");
  const ComplexMatrix left = lu1.inverse();
  const ComplexMatrix right = lu2.inverse();
  return (a - b) * left * (ac - bc) * right;
}

/// lambda_k = tanh^2(sigma^k / 2).
inline RealVector sigma_to_lambda(const SpectralCoord& s) {
  RealVector lam(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double t = std::tanh(0.5 * s[k]);
    lam(k) = t * t;
  }
  return lam;
}

inline SpectralCoord lambda_to_sigma(const RealVector& lam) {
  if (lam.size() == 0) throw Error(ErrorCode::OutOfChamber, "empty lambda");
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (!(lam(k) > 0.0 && lam(k) < 1.0)) throw Error(ErrorCode::OutOfChamber, "lambda must lie in (0,1)");
    if (k > 0 && !(lam(k) > lam(k - 1))) throw Error(ErrorCode::OutOfChamber, "lambda must be ascending");
  }
  RealVector s(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) s(k) = 2.0 * std::atanh(std::sqrt(lam(k)));
  return SpectralCoord(std::move(s));
}

/// Spectral coordinates of a disk point from the eigenvalues of R conj(R).
inline SpectralCoord spectral_coordinates(const DiskPoint& r) {
  const ComplexMatrix& rm = r.matrix();
  const ComplexMatrix cr = detail::hermitized(rm * rm.conjugate());
  return detail::sigma_from_lambda(detail::hermitian_eigen_unchecked(cr).values);
}

/// Spectral coordinates of Z: eigenvalues of the cross-ratio with iI,
/// evaluated as R conj(R) for R the Cayley image of Z.
inline SpectralCoord spectral_coordinates(const SiegelPoint& z) { return spectral_coordinates(cayley_to_disk(z)); }

/// The disk metric at a fixed base point, with the two inverses cached.
class DiskMetric {
 public:
  explicit DiskMetric(const DiskPoint& r) {
    const Eigen::Index n = r.dim();
    const ComplexMatrix& rm = r.matrix();
    left_ = detail::checked_lu(detail::identity(n) - rm * rm.conjugate(), "I - R conj(R) singular").inverse();
    right_ = detail::checked_lu(detail::identity(n) - rm.conjugate() * rm, "I - conj(R) R singular").inverse();
  }

  /// 4 Re Tr((I - R conj R)^{-1} a (I - conj R R)^{-1} conj b).
  double operator()(const ComplexMatrix& a, const ComplexMatrix& b) const {
    return 4.0 * (left_ * a * right_ * b.conjugate()).trace().real();
  }

 private:
  ComplexMatrix left_;
  ComplexMatrix right_;
};

inline double disk_metric(const DiskPoint& r, const ComplexMatrix& a, const ComplexMatrix& b) {
  return DiskMetric(r)(a, b);
}

/// Orthonormal frame at R = Q diag(tanh(sigma/2)) Q^T. Only tf.q is read;
/// the coefficients come from sigma.
inline FrameBasis frame_at(const TakagiFactors& tf, const SpectralCoord& sigma) {
  const Eigen::Index n = sigma.dim();
  if (tf.q.rows() != n) throw Error(ErrorCode::ShapeMismatch, "frame_at: Takagi factors and sigma disagree");
  const double r2 = 1.0 / std::sqrt(2.0);
  RealVector ch(n);
  for (Eigen::Index k = 0; k < n; ++k) ch(k) = std::cosh(0.5 * sigma[k]);

  FrameBasis f;
  f.base = tf;
  f.l_vectors.reserve(static_cast<std::size_t>(n));
  f.u_vectors.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const ComplexVector qk = tf.q.col(k);
    f.l_vectors.push_back((qk * qk.transpose()) / (2.0 * ch(k) * ch(k)));
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const ComplexVector qk = tf.q.col(k);
    f.u_vectors.push_back((kI * (qk * qk.transpose())) / (2.0 * ch(k) * ch(k)));
  }
  for (int kind = 1; kind <= 2; ++kind) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k + 1; l < n; ++l) {
        const ComplexVector qk = tf.q.col(k);
        const ComplexVector ql = tf.q.col(l);
        ComplexMatrix m = (qk * ql.transpose() + ql * qk.transpose()) * (r2 / (2.0 * ch(k) * ch(l)));
        if (kind == 1) m *= kI;
        f.u_vectors.push_back(std::move(m));
      }
    }
  }
  return f;
}

/// Takagi-factor the disk point and build the frame there.
inline FrameBasis frame_at(const DiskPoint& r) {
  TakagiFactors tf = takagi_decompose(r.matrix());
  RealVector s(tf.mu.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = 2.0 * std::atanh(tf.mu(k));
  return frame_at(tf, SpectralCoord(std::move(s)));
}

/// L-frame coordinates of -1/2 sum_i nabla_{U_i} U_i, assembled from the
/// covariant derivatives of the orbit directions:
///   nabla U_(k) U_(k)         = -coth(s_k) L_k
///   nabla U_(k,l,1) U_(k,l,1) = -coth((s_k+s_l)/2) (L_k+L_l)/2
///   nabla U_(k,l,2) U_(k,l,2) = -coth((s_k-s_l)/2) (L_k-L_l)/2
inline RealVector normal_drift(const SpectralCoord& sigma) {
  const Eigen::Index n = sigma.dim();
  RealVector d = RealVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) d(k) += 0.5 / std::tanh(sigma[k]);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      const double plus = 0.5 / std::tanh(0.5 * (sigma[k] + sigma[l]));
      const double minus = 0.5 / std::tanh(0.5 * (sigma[k] - sigma[l]));
      d(k) += 0.5 * plus + 0.5 * minus;
      d(l) += 0.5 * plus - 0.5 * minus;
    }
  }
  return d;
}

}  // namespace siegel
