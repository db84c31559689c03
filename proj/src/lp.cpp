#include "omaxcones/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omaxcones::lp {

namespace {

// Tableau with the objective in row m and the phase-one row in m + 1.
class Tableau {
 public:
  Tableau(const Mat& a, const Vec& b, const Vec& c, double eps)
      : m_(b.size()), n_(c.size()), eps_(eps), basis_(m_), nonbasis_(n_ + 1), d_(m_ + 2, Vec(n_ + 2)) {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) d_[i][j] = a[i][j];
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = static_cast<long>(n_ + i);
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = static_cast<long>(j);
      d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  LpResult solve() {
    LpResult out;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -eps_) {
      pivot(r, n_);
      if (!run(2) || d_[m_ + 1][n_ + 1] < -eps_) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j)
          if (better(j, s, i)) s = j;
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) out.x[basis_[i]] = d_[i][n_ + 1];
    out.value = d_[m_][n_ + 1];
    out.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
    return out;
  }

 private:
  bool better(std::size_t j, std::size_t s, std::size_t row) const {
    if (d_[row][j] < d_[row][s]) return true;
    return d_[row][j] == d_[row][s] && nonbasis_[j] < nonbasis_[s];
  }

  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / d_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(d_[i][s]) <= eps_) continue;
      const double f = d_[i][s] * inv;
      for (std::size_t j = 0; j < n_ + 2; ++j) d_[i][j] -= d_[r][j] * f;
      d_[i][s] = d_[r][s] * f;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j)
      if (j != s) d_[r][j] *= inv;
    for (std::size_t i = 0; i < m_ + 2; ++i)
      if (i != r) d_[i][s] *= -inv;
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const std::size_t x = phase == 1 ? m_ : m_ + 1;
    for (;;) {
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase) continue;
        if (s == n_ + 1 || d_[x][j] < d_[x][s] || (d_[x][j] == d_[x][s] && nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (d_[x][s] >= -eps_) return true;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (d_[i][s] <= eps_) continue;
        if (r == m_) {
          r = i;
          continue;
        }
        const double lhs = d_[i][n_ + 1] / d_[i][s], rhs = d_[r][n_ + 1] / d_[r][s];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == m_) return false;
      pivot(r, s);
    }
  }

  std::size_t m_, n_;
  double eps_;
  std::vector<long> basis_, nonbasis_;
  Mat d_;
};

}  // namespace

LpResult simplex(const Mat& a, const Vec& b, const Vec& c, double eps) {
  Tableau t(a, b, c, eps);
  return t.solve();
}

Vec solve_spd(Mat s, const Vec& b) {
  const std::size_t n = b.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = s[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= s[j][k] * s[j][k];
    if (!(d > 0.0)) return {};
    d = std::sqrt(d);
    s[j][j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= s[i][k] * s[j][k];
      s[i][j] = v / d;
    }
  }
  Vec x = b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= s[i][k] * x[k];
    x[i] /= s[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= s[k][i] * x[k];
    x[i] /= s[i][i];
  }
  return x;
}

}  // namespace omaxcones::lp
