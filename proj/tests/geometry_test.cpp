#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "geometry_oracle.h"
#include "otto/geometry.h"
#include "synthetic.h"

namespace otto {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

double max_deviation(const Vector& e, const Matrix& rows) {
  double lo = 3, hi = -1;
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    const double d = cosine_distance(e, rows.row(j).transpose());
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi - lo;
}

TEST(CosineDistance, Basics) {
  EXPECT_NEAR(cosine_distance(vec({1, 2}), vec({2, 4})), 0.0, 1e-15);
  EXPECT_NEAR(cosine_distance(vec({1, 0}), vec({0, 5})), 1.0, 1e-15);
  EXPECT_NEAR(cosine_distance(vec({1, 0}), vec({-1, 0})), 2.0, 1e-15);
}

TEST(CostMatrix, EntriesMatchCosineDistanceAndStayInRange) {
  std::mt19937_64 rng(1);
  const Matrix a = synthetic::gaussian(rng, 5, 7), b = synthetic::gaussian(rng, 4, 7);
  const Matrix c = cost_matrix(a, b);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      EXPECT_NEAR(c(i, j), cosine_distance(a.row(i).transpose(), b.row(j).transpose()), 1e-12);
      EXPECT_GE(c(i, j), 0.0);
      EXPECT_LE(c(i, j), 2.0);
    }
}

TEST(CostMatrix, SwapGivesTranspose) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = synthetic::gaussian(rng, 1 + t % 6, 9), b = synthetic::gaussian(rng, 1 + t % 4, 9);
    EXPECT_EQ(cost_matrix(b, a), cost_matrix(a, b).transpose());
  }
}

TEST(CostMatrix, DimensionMismatch) {
  EXPECT_THROW(cost_matrix(Matrix::Ones(2, 3), Matrix::Ones(2, 4)), DimensionMismatch);
}

TEST(EquidistantVector, TwoOrthogonalVectorsGiveTheBisector) {
  Matrix v(2, 2);
  v << 1, 0, 0, 1;
  const auto e = equidistant_vector(v);
  ASSERT_TRUE(e);
  EXPECT_NEAR(e->direction(0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(e->direction(1), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(e->d_min, 1 - 1 / std::sqrt(2.0), 1e-12);
}

TEST(EquidistantVector, StandardBasisIn3d) {
  const auto e = equidistant_vector(Matrix::Identity(3, 3));
  ASSERT_TRUE(e);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(e->direction(k), 1 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(e->d_min, 1 - 1 / std::sqrt(3.0), 1e-12);
}

TEST(EquidistantVector, ParallelVectorsAreAtDistanceZero) {
  Matrix v(2, 3);
  v << 1, 2, -1, 3, 6, -3;
  const auto e = equidistant_vector(v);
  ASSERT_TRUE(e);
  EXPECT_NEAR(e->d_min, 0.0, 1e-12);
  EXPECT_LE(max_deviation(e->direction, v), 1e-12);
}

TEST(EquidistantVector, SingleVectorIsItsOwnDirection) {
  Matrix v(1, 3);
  v << 0, 3, 4;
  const auto e = equidistant_vector(v);
  ASSERT_TRUE(e);
  EXPECT_NEAR(e->direction.norm(), 1.0, 1e-15);
  EXPECT_EQ(e->d_min, 0.0);
}

TEST(EquidistantVector, FullSpanIsDegenerate) {
  std::mt19937_64 rng(5);
  EXPECT_FALSE(equidistant_vector(synthetic::gaussian(rng, 6, 4)));
}

TEST(EquidistantVector, ScaleOfInputsDoesNotMatter) {
  std::mt19937_64 rng(6);
  const Matrix v = synthetic::gaussian(rng, 5, 12);
  Matrix scaled = v;
  for (Eigen::Index i = 0; i < v.rows(); ++i) scaled.row(i) *= 0.01 + 10.0 * i;
  const auto a = equidistant_vector(v), b = equidistant_vector(scaled);
  ASSERT_TRUE(a && b);
  EXPECT_NEAR(a->d_min, b->d_min, 1e-10);
  EXPECT_LE((a->direction - b->direction).norm(), 1e-8);
}

// Property: equidistant, in the span, and at the smallest common distance.
class EquidistantRandom : public ::testing::TestWithParam<int> {};

TEST_P(EquidistantRandom, MatchesProjectionOracle) {
  const int dim = GetParam();
  std::mt19937_64 rng(100 + dim);
  for (int t = 0; t < 100; ++t) {
    const int n = synthetic::uniform_int(rng, 2, std::min(12, dim - 1));
    const Matrix v = synthetic::gaussian(rng, n, dim, std::exp(synthetic::uniform(rng, 1, 1, -3, 3)(0, 0)));
    const auto e = equidistant_vector(v);
    const auto ref = oracle::equidistant_set(v);
    ASSERT_TRUE(e);
    ASSERT_TRUE(ref);

    EXPECT_LE(max_deviation(e->direction, v), 1e-9);
    EXPECT_NEAR(e->d_min, cosine_distance(e->direction, v.row(0).transpose()), 1e-12);
    EXPECT_NEAR(e->d_min, ref->d_min, 1e-9);

    const Matrix q = oracle::orthonormal_basis(v.transpose());
    const Vector residual = e->direction - q * (q.transpose() * e->direction);
    EXPECT_LE(residual.norm(), 1e-8 * e->direction.norm());
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, EquidistantRandom, ::testing::Values(8, 32, 128));

TEST(EquidistantVector, DuplicateInputsDoNotMatter) {
  std::mt19937_64 rng(9);
  const Matrix v = synthetic::gaussian(rng, 3, 10);
  Matrix dup(5, 10);
  dup << v, 2 * v.row(0), v.row(2);
  const auto e = equidistant_vector(v);
  const auto d = equidistant_vector(dup);
  const auto ref = oracle::equidistant_set(dup);
  ASSERT_TRUE(e && d && ref);
  EXPECT_LE(max_deviation(d->direction, dup), 1e-9);
  EXPECT_NEAR(d->d_min, e->d_min, 1e-9);
  EXPECT_NEAR(d->d_min, ref->d_min, 1e-9);
}

TEST(EquidistantVector, DependentInputsCanRuleOutEveryDirection) {
  std::mt19937_64 rng(10);
  Matrix v = synthetic::gaussian(rng, 4, 10);
  v.row(3) = v.row(0) - 2 * v.row(1);
  EXPECT_FALSE(equidistant_vector(v));
  EXPECT_FALSE(oracle::equidistant_set(v));
}

TEST(MedianOf, EvenAndOddCounts) {
  Matrix c(2, 2);
  c << 0.2, 0.4, 0.6, 0.8;
  EXPECT_DOUBLE_EQ(median_of(c), 0.5);
  Matrix odd(1, 3);
  odd << 3, 1, 2;
  EXPECT_DOUBLE_EQ(median_of(odd), 2.0);
}

TEST(NullGeometry, IdenticalVectorsGiveTheMedian) {
  Matrix tgt = Matrix::Zero(3, 4);
  tgt.col(1).setConstant(2.0);
  Matrix c(2, 3);
  c << 0.3, 0.1, 0.9, 0.5, 0.7, 0.2;
  const NullGeometry g = null_geometry(tgt, c);
  EXPECT_FALSE(g.fallback_used);
  EXPECT_NEAR(g.d_min, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.d, 0.4);
}

TEST(NullGeometry, DIsMaxOfMinimumAndCenter) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Matrix src = synthetic::gaussian(rng, synthetic::uniform_int(rng, 1, 6), 16);
    const Matrix tgt = synthetic::gaussian(rng, 5, 16);
    const Matrix c = cost_matrix(src, tgt);
    const NullGeometry g = null_geometry(tgt, c);
    const auto ref = oracle::equidistant_set(tgt);
    ASSERT_TRUE(ref);

    std::vector<double> all(c.data(), c.data() + c.size());
    std::sort(all.begin(), all.end());
    const std::size_t k = all.size();
    const double median = k % 2 ? all[k / 2] : 0.5 * (all[k / 2 - 1] + all[k / 2]);

    EXPECT_NEAR(g.c_center, median, 1e-15);
    EXPECT_NEAR(g.d, std::max(ref->d_min, median), 1e-9);
    EXPECT_GE(g.d, g.d_min);
    EXPECT_GE(g.d, g.c_center);
  }
}

TEST(NullGeometry, MeanMode) {
  Matrix c(1, 3);
  c << 0.1, 0.2, 0.9;
  const NullGeometry g = null_geometry(Matrix::Identity(2, 4), c, NullDistance::Mean);
  EXPECT_NEAR(g.c_center, 0.4, 1e-15);
  EXPECT_NEAR(g.d, std::max(0.4, 1 - 1 / std::sqrt(2.0)), 1e-12);
}

TEST(NullGeometry, DegenerateFallsBackToCenter) {
  std::mt19937_64 rng(12);
  const Matrix tgt = synthetic::gaussian(rng, 5, 3);
  Matrix c(1, 2);
  c << 0.25, 0.75;
  const NullGeometry g = null_geometry(tgt, c);
  EXPECT_TRUE(g.fallback_used);
  EXPECT_EQ(g.null_vector.size(), 0);
  EXPECT_DOUBLE_EQ(g.d, 0.5);
  EXPECT_DOUBLE_EQ(g.d_min, 0.5);
}

TEST(ExtendCost, ReverseAndForward) {
  Matrix base(2, 2);
  base << 0.1, 0.2, 0.3, 0.4;
  const auto rev = extend_cost(base, 0.5, Direction::Reverse);
  ASSERT_EQ(rev.values.rows(), 3);
  ASSERT_EQ(rev.values.cols(), 2);
  EXPECT_EQ(rev.values(2, 0), 0.5);
  EXPECT_EQ(rev.values(2, 1), 0.5);
  EXPECT_EQ(rev.interior(), base);

  const auto fwd = extend_cost(base, 0.5, Direction::Forward);
  ASSERT_EQ(fwd.values.rows(), 2);
  ASSERT_EQ(fwd.values.cols(), 3);
  EXPECT_EQ(fwd.values(0, 2), 0.5);
  EXPECT_EQ(fwd.values(1, 2), 0.5);
  EXPECT_EQ(fwd.interior(), base);
}

TEST(ExtendCost, RejectsBadDistance) {
  EXPECT_THROW(extend_cost(Matrix::Zero(1, 1), -0.1, Direction::Reverse), Error);
  EXPECT_THROW(extend_cost(Matrix::Zero(1, 1), std::nan(""), Direction::Forward), Error);
}

}  // namespace
}  // namespace otto
