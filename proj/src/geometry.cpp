#include "otto/geometry.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

namespace otto {

namespace {

Matrix normalized_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= out.row(i).norm();
  return out;
}

}  // namespace

double cosine_distance(const Vector& a, const Vector& b) {
  return 1.0 - a.dot(b) / (a.norm() * b.norm());
}

Matrix cost_matrix(const WordEmbeddings& src, const WordEmbeddings& tgt) {
  if (src.cols() != tgt.cols())
    throw DimensionMismatch("cost_matrix: src D=" + std::to_string(src.cols()) +
                            ", tgt D=" + std::to_string(tgt.cols()));
  const Matrix us = normalized_rows(src);
  const Matrix ut = normalized_rows(tgt);
  // Plain ordered dot so that cost_matrix(b, a) is bitwise the transpose.
  Matrix c(src.rows(), tgt.rows());
  for (Eigen::Index i = 0; i < us.rows(); ++i) {
    for (Eigen::Index j = 0; j < ut.rows(); ++j) {
      double dot = 0;
      for (Eigen::Index k = 0; k < us.cols(); ++k) dot += us(i, k) * ut(j, k);
      // Rounding can push |cos| a hair past 1.
      c(i, j) = std::clamp(1.0 - dot, 0.0, 2.0);
    }
  }
  return c;
}

std::optional<EquidistantVector> equidistant_vector(const Matrix& vectors) {
  const Eigen::Index n = vectors.rows();
  if (n == 0) return std::nullopt;
  if (n == 1) return EquidistantVector{vectors.row(0).transpose().normalized(), 0.0};

  // Cosine equidistance is blind to per-vector scale, and the span is the same,
  // so work with unit rows throughout.
  const Matrix u = normalized_rows(vectors);

  Matrix diffs(n - 1, u.cols());
  for (Eigen::Index j = 1; j < n; ++j) diffs.row(j - 1) = u.row(0) - u.row(j);
  const Matrix system = diffs * u.transpose();  // (N-1) x N

  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  // Entries of the system are O(1), so tiny systems (near-parallel inputs)
  // count as all-zero rather than being rescaled.
  const double cutoff = 1e-10 * std::max(largest, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff && sv(k) > 0) ++rank;
  if (rank >= n) return std::nullopt;

  // Columns of V past the rank span the kernel. Every kernel combination maps
  // to an equidistant direction; the least-squares fit to u_1 picks the one
  // nearest u_1, which has the smallest common distance.
  const Matrix kernel = svd.matrixV().rightCols(n - rank);
  // Kernel vectors of u^T map to zero and carry no direction; keep only the
  // image directions before projecting.
  Eigen::JacobiSVD<Matrix> image(u.transpose() * kernel, Eigen::ComputeThinU);
  Eigen::Index usable = 0;
  while (usable < image.singularValues().size() && image.singularValues()(usable) >= 1e-10) ++usable;
  if (usable == 0) return std::nullopt;
  const Matrix basis = image.matrixU().leftCols(usable);
  const Vector u1 = u.row(0).transpose();
  Vector direction = basis * (basis.transpose() * u1);
  if (direction.norm() < 1e-10) direction = basis.col(usable - 1);
  const double norm = direction.norm();

  direction /= norm;
  if (direction.dot(u1) < 0) direction = -direction;
  const double d_min = std::max(0.0, 1.0 - direction.dot(u1));
  return EquidistantVector{std::move(direction), d_min};
}

double median_of(const Matrix& values) {
  std::vector<double> v(values.data(), values.data() + values.size());
  if (v.empty()) throw Error("median of an empty matrix");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

NullGeometry null_geometry(const Matrix& opposite_side, const Matrix& pairwise_costs,
                           NullDistance mode) {
  NullGeometry g;
  g.c_center = mode == NullDistance::Median ? median_of(pairwise_costs) : pairwise_costs.mean();
  if (auto eq = equidistant_vector(opposite_side)) {
    g.null_vector = std::move(eq->direction);
    g.d_min = eq->d_min;
  } else {
    g.d_min = g.c_center;
    g.fallback_used = true;
  }
  g.d = std::max(g.d_min, g.c_center);
  return g;
}

Matrix ExtendedCostMatrix::interior() const {
  if (direction == Direction::Reverse) return values.topRows(values.rows() - 1);
  return values.leftCols(values.cols() - 1);
}

ExtendedCostMatrix extend_cost(const Matrix& base, double d, Direction direction) {
  if (!std::isfinite(d) || d < 0) throw Error("extend_cost: null distance must be finite and >= 0");
  ExtendedCostMatrix ext{Matrix(), direction};
  if (direction == Direction::Reverse) {
    ext.values.resize(base.rows() + 1, base.cols());
    ext.values.topRows(base.rows()) = base;
    ext.values.row(base.rows()).setConstant(d);
  } else {
    ext.values.resize(base.rows(), base.cols() + 1);
    ext.values.leftCols(base.cols()) = base;
    ext.values.col(base.cols()).setConstant(d);
  }
  return ext;
}

}  // namespace otto
