#pragma once

#include <optional>

#include "otto/embedding_io.h"
#include "otto/types.h"

namespace otto {

// Cosine distance 1 - cos(a, b); lies in [0, 2].
double cosine_distance(const Vector& a, const Vector& b);

// m x n matrix of cosine distances between source rows and target rows.
Matrix cost_matrix(const WordEmbeddings& src, const WordEmbeddings& tgt);

struct EquidistantVector {
  Vector direction;  // e_null, lies in the span of the inputs
  double d_min = 0;  // common cosine distance to every input vector
};

// Finds the vector in the span of `vectors` (rows) that is at equal cosine
// distance from every row, and returns it with that distance.
//
// Writing e_null = sum_k a_k e_k, equidistance reduces to the homogeneous
// system E a = 0 with E[j-1][k] = e_k . (u_1 - u_j), u_j = e_j / |e_j|.
// The kernel is read off a full SVD (singular values below 1e-10 times
// max(1, largest) count as zero). With a multi-dimensional kernel the combination
// nearest u_1 is taken; the sign is chosen so that e_null is closer to e_1.
// Either way d_min is the smallest realizable common distance rather than
// 2 - d_min.
//
// Returns nullopt when no usable direction exists (|e_null| < 1e-10), which
// happens once the rows span the whole space (N > D).
// A single vector is its own equidistant direction with d_min = 0.
std::optional<EquidistantVector> equidistant_vector(const Matrix& vectors);

enum class NullDistance { Median, Mean };

struct NullGeometry {
  Vector null_vector;     // empty when fallback_used
  double d_min = 0;
  double c_center = 0;    // median (default) or mean of all pairwise costs
  double d = 0;           // max(d_min, c_center)
  bool fallback_used = false;
};

// Median of all entries; midpoint of the two central order statistics for an
// even count.
double median_of(const Matrix& values);

// Null geometry for a null word placed opposite `opposite_side` (the side the
// null vector must be equidistant to). On a degenerate kernel, d_min falls
// back to the cost center and fallback_used is set.
NullGeometry null_geometry(const Matrix& opposite_side, const Matrix& pairwise_costs,
                           NullDistance mode = NullDistance::Median);

// Reverse appends a null source row; Forward appends a null target column.
enum class Direction { Forward, Reverse };

struct ExtendedCostMatrix {
  Matrix values;
  Direction direction;

  // The base block without the appended null row/column.
  Matrix interior() const;
};

ExtendedCostMatrix extend_cost(const Matrix& base, double d, Direction direction);

}  // namespace otto
