#pragma once
// Small dense real solvers. Sizes here are at most a few hundred.

#include <cstddef>
#include <vector>

namespace omaxcones::lp {

using Vec = std::vector<double>;
/// Row-major dense real matrix as a list of rows.
using Mat = std::vector<Vec>;

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vec x;
};

/// maximize c^t x subject to A x <= b, x >= 0 (Bland's rule, two phases).
LpResult simplex(const Mat& a, const Vec& b, const Vec& c, double eps = 1e-10);

/// Solves S x = b for symmetric positive definite S (Cholesky); empty on failure.
Vec solve_spd(Mat s, const Vec& b);

}  // namespace omaxcones::lp
