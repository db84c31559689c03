#pragma once
// Dense complex matrices, the hermitian eigensolver and the block algebra of
// M_n(M_m) = M_n (x) M_m.

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "omaxcones/errors.hpp"

namespace omaxcones {

using cplx = std::complex<double>;

/// Tolerances shared by every module.
namespace tolerance {
inline constexpr double hermitian = 1e-10;  // scaled by (1 + max|entry|)
inline constexpr double eigen = 1e-11;
inline constexpr double psd = 1e-9;  // scaled by (1 + spectral norm)
}  // namespace tolerance

/// Dense row-major complex matrix. 0x0 is a valid value.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  /// Matrix unit E_{i,j} (zero-based indices).
  static ComplexMatrix unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);
  static ComplexMatrix diagonal(std::span<const double> d);
  /// Column vector x as an n x 1 matrix.
  static ComplexMatrix column(std::span<const cplx> x);
  /// x x^*.
  static ComplexMatrix outer(std::span<const cplx> x);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<cplx> col(std::size_t j) const;

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;

  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);
  /// this += s * other
  ComplexMatrix& add_scaled(cplx s, const ComplexMatrix& other);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x);

/// sum_i conj(a_i) b_i
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> x);
/// <x, A x>
cplx quadratic_form(const ComplexMatrix& a, std::span<const cplx> x);
/// sum_{ij} a_ij b_ij, i.e. tr(A B^t)
cplx bilinear_pairing(const ComplexMatrix& a, const ComplexMatrix& b);
/// Re tr(A^* B) for equally shaped matrices.
double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double relative_frobenius_error(const ComplexMatrix& approx, const ComplexMatrix& exact);

/// Kronecker product; block (i,j) of A (x) B is a_ij B.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<cplx> kron(std::span<const cplx> x, std::span<const cplx> y);

bool is_hermitian(const ComplexMatrix& h);
/// Throws NotHermitian unless H is square and hermitian within tolerance.
void require_hermitian(const ComplexMatrix& h, const char* context);
/// (H + H^*) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& h);

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // orthonormal columns, first significant coordinate real > 0
};

/// Full spectrum of a hermitian matrix by cyclic Jacobi rotations on the
/// 2n x 2n real symmetric embedding [[Re H, -Im H], [Im H, Re H]].
Spectrum eig_hermitian(const ComplexMatrix& h);
/// Eigenvalues only; same algorithm without the vector bookkeeping.
std::vector<double> eigvalsh(const ComplexMatrix& h);

struct PsdResult {
  bool psd = true;
  double min_eigenvalue = 0.0;
};

/// psd iff lambda_min >= -tol * (1 + ||H||). Empty matrices are vacuously PSD.
PsdResult is_psd(const ComplexMatrix& h, double tol = tolerance::psd);

/// Positive and negative parts: H = pos - neg, both PSD.
std::pair<ComplexMatrix, ComplexMatrix> positive_negative_parts(const ComplexMatrix& h);

/// Projection onto the PSD cone (negative eigenvalues clipped to zero).
ComplexMatrix psd_projection(const ComplexMatrix& h);

/// An element of M_n(M_m): n x n grid of m x m blocks, stored flat as an
/// nm x nm matrix with the outer index major (row (i, a) is i*m + a).
class BlockElement {
 public:
  BlockElement() = default;
  BlockElement(std::size_t n, std::size_t m);
  /// Wraps a flat nm x nm matrix.
  BlockElement(std::size_t n, std::size_t m, ComplexMatrix flat);

  static BlockElement from_blocks(const std::vector<std::vector<ComplexMatrix>>& blocks);
  /// sum_l a_l (x) v_l
  static BlockElement from_tensor_terms(std::size_t n, std::size_t m,
                                        std::span<const std::pair<ComplexMatrix, ComplexMatrix>> terms);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t dim() const noexcept { return n_ * m_; }

  const ComplexMatrix& flat() const noexcept { return flat_; }
  ComplexMatrix& flat() noexcept { return flat_; }

  ComplexMatrix block(std::size_t i, std::size_t j) const;
  void set_block(std::size_t i, std::size_t j, const ComplexMatrix& b);
  std::vector<std::vector<ComplexMatrix>> blocks() const;

  cplx& at(std::size_t i, std::size_t a, std::size_t j, std::size_t b) {
    return flat_(i * m_ + a, j * m_ + b);
  }
  const cplx& at(std::size_t i, std::size_t a, std::size_t j, std::size_t b) const {
    return flat_(i * m_ + a, j * m_ + b);
  }

  bool hermitian() const { return is_hermitian(flat_); }

  /// n x n matrix (<y, A_ij y>)_{ij}
  ComplexMatrix compress_inner(std::span<const cplx> y) const;
  /// m x m matrix sum_ij conj(x_i) x_j A_ij
  ComplexMatrix compress_outer(std::span<const cplx> x) const;
  /// <x (x) y, A (x (x) y)>
  cplx product_value(std::span<const cplx> x, std::span<const cplx> y) const;

  friend bool operator==(const BlockElement&, const BlockElement&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  ComplexMatrix flat_;
};

/// Blockwise transpose: A_ij -> A_ij^t.
BlockElement partial_transpose(const BlockElement& b);
/// Exchange of the tensor factors: M_n(M_m) -> M_m(M_n).
BlockElement swap_factors(const BlockElement& b);

struct HermitianTerm {
  ComplexMatrix a;  // n x n hermitian
  ComplexMatrix v;  // m x m hermitian
};

/// B = sum_j a_j (x) v_j with hermitian factors. Diagonal blocks give
/// E_ii (x) B_ii; each off-diagonal B_ij (i < j) is split into four positive
/// parts B_ij = sum_k lambda_k w_k, lambda_k in {1, -1, i, -i}, contributing
/// (lambda_k E_ij + conj(lambda_k) E_ji) (x) w_k. Zero parts are dropped.
std::vector<HermitianTerm> hermitian_tensor_decompose(const BlockElement& b);

}  // namespace omaxcones
