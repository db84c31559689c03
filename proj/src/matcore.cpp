#include "omaxcones/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "omaxcones/simd/kernels.hpp"

namespace omaxcones {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CertificateMismatch: return "CertificateMismatch";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::EmptyStateSpace: return "EmptyStateSpace";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch, "entry count does not match rows x cols");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::ShapeMismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

ComplexMatrix ComplexMatrix::unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
  ComplexMatrix out(rows, cols);
  out(i, j) = 1.0;
  return out;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix out(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

ComplexMatrix ComplexMatrix::column(std::span<const cplx> x) {
  return {x.size(), 1, std::vector<cplx>(x.begin(), x.end())};
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> x) {
  ComplexMatrix out(x.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out(i, j) = x[i] * std::conj(x[j]);
  return out;
}

std::vector<cplx> ComplexMatrix::col(std::size_t j) const {
  std::vector<cplx> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& z : data_) s = std::max(s, std::abs(z));
  return s;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  return add_scaled(1.0, other);
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  return add_scaled(-1.0, other);
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix& ComplexMatrix::add_scaled(cplx s, const ComplexMatrix& other) {
  require_same_shape(*this, other, "add");
  simd::active_kernels().caxpy(s, other.data_.data(), data_.data(), data_.size());
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "matrix product");
  ComplexMatrix c(a.rows(), b.cols());
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const cplx s = a(i, l);
      if (s == cplx(0.0)) continue;
      k.caxpy(s, b.row(l).data(), crow.data(), b.cols());
    }
  }
  return c;
}

std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::ShapeMismatch, "matrix-vector product");
  std::vector<cplx> y(a.rows());
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = k.cdotu(a.row(i).data(), x.data(), x.size());
  return y;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "inner product");
  return simd::active_kernels().cdotc(a.data(), b.data(), a.size());
}

double norm(std::span<const cplx> x) { return std::sqrt(std::max(0.0, inner(x, x).real())); }

cplx quadratic_form(const ComplexMatrix& a, std::span<const cplx> x) {
  const auto ax = a * x;
  return inner(x, ax);
}

cplx bilinear_pairing(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "pairing");
  return simd::active_kernels().cdotu(a.data().data(), b.data().data(), a.data().size());
}

double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "frobenius inner product");
  return simd::active_kernels().cdotc(a.data().data(), b.data().data(), a.data().size()).real();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "difference");
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

double relative_frobenius_error(const ComplexMatrix& approx, const ComplexMatrix& exact) {
  const double scale = exact.frobenius_norm();
  const double err = (approx - exact).frobenius_norm();
  return scale > 0.0 ? err / scale : err;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx s = a(i, j);
      if (s == cplx(0.0)) continue;
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) out(i * b.rows() + r, j * b.cols() + c) = s * b(r, c);
    }
  return out;
}

std::vector<cplx> kron(std::span<const cplx> x, std::span<const cplx> y) {
  std::vector<cplx> out(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t a = 0; a < y.size(); ++a) out[i * y.size() + a] = x[i] * y[a];
  return out;
}

bool is_hermitian(const ComplexMatrix& h) {
  if (!h.square()) return false;
  const double tol = tolerance::hermitian * (1.0 + h.max_abs());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j)
      if (std::abs(h(i, j) - std::conj(h(j, i))) > tol) return false;
  return true;
}

void require_hermitian(const ComplexMatrix& h, const char* context) {
  if (!is_hermitian(h)) {
    throw Error(ErrorCode::NotHermitian, std::string(context) + ": input is not hermitian");
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& h) {
  ComplexMatrix out = h;
  out += h.adjoint();
  out *= 0.5;
  return out;
}

// ---------------------------------------------------------------------------
// Eigensolver

namespace {

constexpr int kMaxSweeps = 100;

struct RealJacobiResult {
  std::vector<double> diag;
  int sweeps = 0;
  double off = 0.0;
};

// In-place cyclic Jacobi on a dense symmetric N x N matrix. When vt is given it
// accumulates the rotations with eigenvectors stored as rows.
RealJacobiResult jacobi_symmetric(std::vector<double>& s, std::size_t n, std::vector<double>* vt) {
  const auto& k = simd::active_kernels();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return s[i * n + j]; };

  double total = 0.0;
  for (double x : s) total += x * x;
  const double stop = 1e-30 * total;

  RealJacobiResult res;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    res.off = std::sqrt(2.0 * off);
    res.sweeps = sweep;
    if (off <= stop) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p), aqq = at(q, q);
        if (sweep > 3 && std::abs(apq) * 1e3 + std::abs(app) == std::abs(app) &&
            std::abs(apq) * 1e3 + std::abs(aqq) == std::abs(aqq)) {
          at(p, q) = at(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        k.rotate(&s[p * n], &s[q * n], n, c, sn);
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = at(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          at(r, p) = at(p, r);
          at(r, q) = at(q, r);
        }
        if (vt) k.rotate(&(*vt)[p * n], &(*vt)[q * n], n, c, sn);
      }
    }
    if (sweep == kMaxSweeps - 1) {
      double rem = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) rem += at(p, q) * at(p, q);
      if (rem > stop && std::sqrt(rem) > tolerance::eigen * std::sqrt(total)) {
        throw Error(ErrorCode::NoConvergence,
                    "Jacobi sweeps exhausted, off-diagonal residual " + std::to_string(std::sqrt(2.0 * rem)));
      }
    }
  }
  res.diag.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.diag[i] = at(i, i);
  return res;
}

std::vector<double> real_embedding(const ComplexMatrix& h) {
  const std::size_t n = h.rows();
  const std::size_t nn = 2 * n;
  std::vector<double> s(nn * nn);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // Symmetrize on the fly so round-off in the input cannot break symmetry.
      const cplx z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      s[i * nn + j] = z.real();
      s[(i + n) * nn + (j + n)] = z.real();
      s[i * nn + (j + n)] = -z.imag();
      s[(i + n) * nn + j] = z.imag();
    }
  return s;
}

void normalize_phase(std::vector<cplx>& z) {
  for (const auto& c : z) {
    const double a = std::abs(c);
    if (a > 1e-8) {
      const cplx phase = std::conj(c) / a;
      for (auto& w : z) w *= phase;
      return;
    }
  }
}

}  // namespace

Spectrum eig_hermitian(const ComplexMatrix& h) {
  require_hermitian(h, "eig_hermitian");
  const std::size_t n = h.rows();
  Spectrum out;
  out.eigenvectors = ComplexMatrix(n, n);
  if (n == 0) return out;

  const std::size_t nn = 2 * n;
  auto s = real_embedding(h);
  std::vector<double> vt(nn * nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i) vt[i * nn + i] = 1.0;
  const auto res = jacobi_symmetric(s, nn, &vt);

  std::vector<std::size_t> order(nn);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return res.diag[a] < res.diag[b]; });

  double scale = 0.0;
  for (double d : res.diag) scale = std::max(scale, std::abs(d));
  const double cluster_gap = 1e-12 * (1.0 + scale);

  // Each eigenvalue of H appears twice in the embedding; (x, y) -> x + i y maps
  // the doubled real eigenspace onto the complex one. Pivoted Gram-Schmidt per
  // cluster keeps the best conditioned half.
  std::vector<std::vector<cplx>> accepted;
  accepted.reserve(n);
  std::vector<double> values;
  values.reserve(n);
  std::size_t start = 0;
  while (start < nn && accepted.size() < n) {
    std::size_t end = start + 1;
    while (end < nn && res.diag[order[end]] - res.diag[order[end - 1]] <= cluster_gap) ++end;
    std::vector<std::vector<cplx>> cands;
    for (std::size_t c = start; c < end; ++c) {
      const double* row = &vt[order[c] * nn];
      std::vector<cplx> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = cplx(row[i], row[i + n]);
      cands.push_back(std::move(z));
    }
    const std::size_t want = std::min<std::size_t>((end - start + 1) / 2, n - accepted.size());
    std::vector<bool> used(cands.size(), false);
    std::vector<std::pair<double, std::vector<cplx>>> cluster;
    for (std::size_t pick = 0; pick < want; ++pick) {
      double best = -1.0;
      std::size_t best_idx = 0;
      std::vector<cplx> best_vec;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        if (used[c]) continue;
        auto z = cands[c];
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& q : accepted) {
            const cplx proj = inner(q, z);
            for (std::size_t i = 0; i < n; ++i) z[i] -= proj * q[i];
          }
          for (const auto& cq : cluster) {
            const cplx proj = inner(cq.second, z);
            for (std::size_t i = 0; i < n; ++i) z[i] -= proj * cq.second[i];
          }
        }
        const double nz = norm(z);
        if (nz > best) {
          best = nz;
          best_idx = c;
          best_vec = std::move(z);
        }
      }
      used[best_idx] = true;
      for (auto& w : best_vec) w /= best;
      normalize_phase(best_vec);
      const double rq = quadratic_form(h, best_vec).real();
      cluster.emplace_back(rq, std::move(best_vec));
    }
    std::stable_sort(cluster.begin(), cluster.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [val, vec] : cluster) {
      values.push_back(val);
      accepted.push_back(std::move(vec));
    }
    start = end;
  }

  out.eigenvalues = std::move(values);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = accepted[j][i];
  return out;
}

std::vector<double> eigvalsh(const ComplexMatrix& h) {
  require_hermitian(h, "eigvalsh");
  const std::size_t n = h.rows();
  if (n == 0) return {};
  auto s = real_embedding(h);
  auto res = jacobi_symmetric(s, 2 * n, nullptr);
  std::sort(res.diag.begin(), res.diag.end());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (res.diag[2 * i] + res.diag[2 * i + 1]);
  return out;
}

PsdResult is_psd(const ComplexMatrix& h, double tol) {
  require_hermitian(h, "is_psd");
  if (h.rows() == 0) return {true, 0.0};
  const auto ev = eigvalsh(h);
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
  return {ev.front() >= -tol * (1.0 + scale), ev.front()};
}

std::pair<ComplexMatrix, ComplexMatrix> positive_negative_parts(const ComplexMatrix& h) {
  const auto sp = eig_hermitian(h);
  const std::size_t n = h.rows();
  ComplexMatrix pos(n, n), neg(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = sp.eigenvalues[k];
    if (lam == 0.0) continue;
    const auto v = sp.eigenvectors.col(k);
    (lam > 0 ? pos : neg).add_scaled(std::abs(lam), ComplexMatrix::outer(v));
  }
  return {pos, neg};
}

ComplexMatrix psd_projection(const ComplexMatrix& h) { return positive_negative_parts(h).first; }

// ---------------------------------------------------------------------------
// BlockElement

BlockElement::BlockElement(std::size_t n, std::size_t m) : n_(n), m_(m), flat_(n * m, n * m) {}

BlockElement::BlockElement(std::size_t n, std::size_t m, ComplexMatrix flat)
    : n_(n), m_(m), flat_(std::move(flat)) {
  if (flat_.rows() != n * m || flat_.cols() != n * m) {
    throw Error(ErrorCode::ShapeMismatch, "flat matrix is not nm x nm");
  }
}

BlockElement BlockElement::from_blocks(const std::vector<std::vector<ComplexMatrix>>& blocks) {
  const std::size_t n = blocks.size();
  const std::size_t m = n == 0 ? 0 : blocks[0][0].rows();
  BlockElement out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks[i].size() != n) throw Error(ErrorCode::ShapeMismatch, "block grid is not square");
    for (std::size_t j = 0; j < n; ++j) out.set_block(i, j, blocks[i][j]);
  }
  return out;
}

BlockElement BlockElement::from_tensor_terms(std::size_t n, std::size_t m,
                                             std::span<const std::pair<ComplexMatrix, ComplexMatrix>> terms) {
  BlockElement out(n, m);
  for (const auto& [a, v] : terms) {
    if (a.rows() != n || a.cols() != n || v.rows() != m || v.cols() != m) {
      throw Error(ErrorCode::ShapeMismatch, "tensor term shape");
    }
    out.flat_ += kron(a, v);
  }
  return out;
}

ComplexMatrix BlockElement::block(std::size_t i, std::size_t j) const {
  ComplexMatrix out(m_, m_);
  for (std::size_t a = 0; a < m_; ++a)
    for (std::size_t b = 0; b < m_; ++b) out(a, b) = at(i, a, j, b);
  return out;
}

void BlockElement::set_block(std::size_t i, std::size_t j, const ComplexMatrix& b) {
  if (b.rows() != m_ || b.cols() != m_) throw Error(ErrorCode::ShapeMismatch, "block shape");
  for (std::size_t a = 0; a < m_; ++a)
    for (std::size_t c = 0; c < m_; ++c) at(i, a, j, c) = b(a, c);
}

std::vector<std::vector<ComplexMatrix>> BlockElement::blocks() const {
  std::vector<std::vector<ComplexMatrix>> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i].push_back(block(i, j));
  return out;
}

ComplexMatrix BlockElement::compress_inner(std::span<const cplx> y) const {
  if (y.size() != m_) throw Error(ErrorCode::ShapeMismatch, "compress_inner vector size");
  ComplexMatrix out(n_, n_);
  std::vector<cplx> ay(m_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t a = 0; a < m_; ++a) {
        cplx s = 0.0;
        for (std::size_t b = 0; b < m_; ++b) s += at(i, a, j, b) * y[b];
        ay[a] = s;
      }
      out(i, j) = inner(y, ay);
    }
  return out;
}

ComplexMatrix BlockElement::compress_outer(std::span<const cplx> x) const {
  if (x.size() != n_) throw Error(ErrorCode::ShapeMismatch, "compress_outer vector size");
  ComplexMatrix out(m_, m_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const cplx w = std::conj(x[i]) * x[j];
      if (w == cplx(0.0)) continue;
      for (std::size_t a = 0; a < m_; ++a)
        for (std::size_t b = 0; b < m_; ++b) out(a, b) += w * at(i, a, j, b);
    }
  return out;
}

cplx BlockElement::product_value(std::span<const cplx> x, std::span<const cplx> y) const {
  const auto z = kron(x, y);
  return quadratic_form(flat_, z);
}

BlockElement partial_transpose(const BlockElement& b) {
  BlockElement out(b.n(), b.m());
  for (std::size_t i = 0; i < b.n(); ++i)
    for (std::size_t j = 0; j < b.n(); ++j)
      for (std::size_t a = 0; a < b.m(); ++a)
        for (std::size_t c = 0; c < b.m(); ++c) out.at(i, a, j, c) = b.at(i, c, j, a);
  return out;
}

BlockElement swap_factors(const BlockElement& b) {
  BlockElement out(b.m(), b.n());
  for (std::size_t i = 0; i < b.n(); ++i)
    for (std::size_t j = 0; j < b.n(); ++j)
      for (std::size_t a = 0; a < b.m(); ++a)
        for (std::size_t c = 0; c < b.m(); ++c) out.at(a, i, c, j) = b.at(i, a, j, c);
  return out;
}

std::vector<HermitianTerm> hermitian_tensor_decompose(const BlockElement& b) {
  require_hermitian(b.flat(), "hermitian_tensor_decompose");
  const std::size_t n = b.n();
  const double drop = 1e-15 * (1.0 + b.flat().max_abs());
  std::vector<HermitianTerm> terms;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = hermitian_part(b.block(i, i));
    if (v.max_abs() > drop) terms.push_back({ComplexMatrix::unit(n, n, i, i), std::move(v)});
  }
  const cplx I(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto v = b.block(i, j);
      const auto vstar = v.adjoint();
      ComplexMatrix re_part = v;
      re_part += vstar;
      re_part *= 0.5;
      ComplexMatrix im_part = v;
      im_part -= vstar;
      im_part *= cplx(0.0, -0.5);
      auto [rp, rn] = positive_negative_parts(re_part);
      auto [ip, in] = positive_negative_parts(im_part);
      const std::pair<cplx, ComplexMatrix*> parts[] = {{1.0, &rp}, {-1.0, &rn}, {I, &ip}, {-I, &in}};
      for (const auto& [lambda, w] : parts) {
        if (w->max_abs() <= drop) continue;
        ComplexMatrix a(n, n);
        a(i, j) = lambda;
        a(j, i) = std::conj(lambda);
        terms.push_back({std::move(a), std::move(*w)});
      }
    }
  return terms;
}

}  // namespace omaxcones
