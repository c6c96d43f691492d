#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "otto/ot_solvers.h"

namespace otto {

namespace {

struct SquareSolution {
  std::vector<double> row_pot, col_pot;  // cost(i,j) >= row_pot[i] + col_pot[j]
  std::vector<int> match;                // row -> column
};

// Shortest augmenting path Hungarian method on a square matrix.
SquareSolution hungarian(const Matrix& a) {
  const int k = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> owner(k + 1, 0), way(k + 1, 0);  // 1-based; owner[0] is scratch

  for (int i = 1; i <= k; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = owner[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  SquareSolution s;
  s.row_pot.assign(u.begin() + 1, u.end());
  s.col_pot.assign(v.begin() + 1, v.end());
  s.match.assign(k, -1);
  for (int j = 1; j <= k; ++j) s.match[owner[j] - 1] = j - 1;
  return s;
}

// Walks the optimal face (perfect matchings on zero reduced-cost edges) and
// fixes rows in order to their smallest admissible column.
class LexicographicMatcher {
 public:
  LexicographicMatcher(const Matrix& a, const SquareSolution& sol)
      : k_(static_cast<int>(a.rows())), match_(sol.match), owner_(k_, -1), tight_(k_ * k_, 0) {
    const double tol = 1e-9 * (1.0 + a.cwiseAbs().maxCoeff());
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j)
        tight_[i * k_ + j] = a(i, j) - sol.row_pot[i] - sol.col_pot[j] <= tol;
    for (int i = 0; i < k_; ++i) owner_[match_[i]] = i;
  }

  void fix_rows(int num_rows) {
    for (int i = 0; i < num_rows; ++i) {
      fixed_upto_ = i;
      for (int c = 0; c < k_; ++c) {
        if (!tight(i, c)) continue;
        if (match_[i] == c || reroute(i, c)) break;
      }
    }
  }

  const std::vector<int>& match() const { return match_; }

 private:
  bool tight(int i, int j) const { return tight_[i * k_ + j] != 0; }

  // Gives column c to row i, pushing c's current owner along an alternating
  // path of unfixed rows that ends at i's old column.
  bool reroute(int i, int c) {
    const int r = owner_[c];
    if (r < fixed_upto_) return false;
    const int freed = match_[i];
    std::vector<char> seen(k_, 0);
    seen[c] = 1;
    if (!augment(r, freed, seen)) return false;
    match_[i] = c;
    owner_[c] = i;
    return true;
  }

  bool augment(int row, int target, std::vector<char>& seen) {
    for (int c = 0; c < k_; ++c) {
      if (seen[c] || !tight(row, c)) continue;
      seen[c] = 1;
      if (c == target) {
        match_[row] = c;
        owner_[c] = row;
        return true;
      }
      const int next = owner_[c];
      if (next <= fixed_upto_) continue;
      if (augment(next, target, seen)) {
        match_[row] = c;
        owner_[c] = row;
        return true;
      }
    }
    return false;
  }

  int k_;
  std::vector<int> match_, owner_;
  std::vector<char> tight_;
  int fixed_upto_ = 0;
};

}  // namespace

BinaryMatrix solve_assignment(const Matrix& cost) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  BinaryMatrix gamma = BinaryMatrix::Zero(m, n);
  if (m == 0 || n == 0) return gamma;
  if (!cost.allFinite()) throw Error("assignment cost has non-finite entries");

  // Pad to square with zero-cost dummies; dummy columns sort after real ones,
  // so an earlier row prefers any real column over staying unassigned.
  const Eigen::Index k = std::max(m, n);
  Matrix square = Matrix::Zero(k, k);
  square.topLeftCorner(m, n) = cost;

  LexicographicMatcher matcher(square, hungarian(square));
  matcher.fix_rows(static_cast<int>(m));
  const auto& match = matcher.match();
  for (Eigen::Index i = 0; i < m; ++i)
    if (match[i] < n) gamma(i, match[i]) = 1;
  return gamma;
}

}  // namespace otto
