#pragma once

// Closed-form reference for the equidistant null direction, built from
// Gram-Schmidt and an LU kernel rather than the SVD used by the library.
//
// Inside the span U of the unit inputs u_1..u_N, the unit vectors at equal
// cosine distance from every u_j form the unit sphere of
// W = U ∩ {u_1 - u_j}^⊥. The one closest to u_1 is P_W u_1 / |P_W u_1|, so the
// smallest common distance is 1 - |P_W u_1|.

#include <cmath>
#include <optional>

#include <Eigen/LU>

#include "otto/types.h"

namespace otto::oracle {

// Orthonormal columns spanning the columns of `a` (modified Gram-Schmidt,
// dropping directions below `tol`).
inline Matrix orthonormal_basis(const Matrix& a, double tol = 1e-10) {
  Matrix q(a.rows(), 0);
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    Vector v = a.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < q.cols(); ++c) v -= q.col(c).dot(v) * q.col(c);
    if (v.norm() > tol * std::max(1.0, a.col(k).norm())) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = v.normalized();
    }
  }
  return q;
}

struct EquidistantSet {
  Matrix basis;      // D x k orthonormal basis of W
  Vector closest;    // unit vector in W nearest u_1 (empty if P_W u_1 = 0)
  double d_min = 0;  // 1 - |P_W u_1|
};

inline std::optional<EquidistantSet> equidistant_set(const Matrix& rows) {
  Matrix u = rows;
  for (Eigen::Index i = 0; i < u.rows(); ++i) u.row(i).normalize();
  const Matrix q = orthonormal_basis(u.transpose());
  if (u.rows() == 1) return EquidistantSet{q, q.col(0), 0.0};

  Matrix diffs(u.rows() - 1, q.cols());  // in U coordinates
  for (Eigen::Index j = 1; j < u.rows(); ++j)
    diffs.row(j - 1) = (q.transpose() * (u.row(0) - u.row(j)).transpose()).transpose();
  Eigen::FullPivLU<Matrix> lu(diffs);
  lu.setThreshold(1e-10);
  const Matrix kernel = lu.dimensionOfKernel() > 0 ? Matrix(lu.kernel()) : Matrix(q.cols(), 0);
  if (kernel.cols() == 0 || (kernel.cols() == 1 && kernel.norm() == 0)) return std::nullopt;
  EquidistantSet s;
  s.basis = orthonormal_basis(q * kernel);
  if (s.basis.cols() == 0) return std::nullopt;
  const Vector proj = s.basis * (s.basis.transpose() * u.row(0).transpose());
  s.d_min = 1.0 - proj.norm();
  if (proj.norm() > 1e-12) s.closest = proj.normalized();
  return s;
}

}  // namespace otto::oracle
