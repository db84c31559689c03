#pragma once
// The identification of M_n with its dual, linear maps M_k -> M_m in Choi,
// Kraus and Holevo form, the flat adjoint and sampling checks of cone duality.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "omaxcones/cones.hpp"
#include "omaxcones/matcore.hpp"

namespace omaxcones {

/// The functional f(X) = tr(X Y^t) = sum_ij x_ij y_ij, stored through Y.
struct FunctionalMatrix {
  ComplexMatrix y;

  cplx operator()(const ComplexMatrix& x) const;
  /// f(M_n^+) in [0, inf), decided through Y.
  bool positive(double tol = tolerance::psd) const;
};

/// gamma(Y) is the functional with matrix Y; gamma(E_ij) picks the (i,j) entry.
FunctionalMatrix gamma(const ComplexMatrix& y);
ComplexMatrix gamma_inv(const FunctionalMatrix& f);

/// F is an n x n grid of functionals on M_m, stored as the BlockElement whose
/// (i,j) block is the matrix of f_ij. Returns sum_ij f_ij(A_ij).
cplx pair(const BlockElement& f, const BlockElement& a);

/// (f_ij(v))_ij for v in M_m.
ComplexMatrix evaluate_functionals(const BlockElement& f, const ComplexMatrix& v);

enum class MapKind { Choi, Kraus, Holevo };
const char* to_string(MapKind k);

struct HolevoTerm {
  FunctionalMatrix s;  // positive functional on M_k
  ComplexMatrix p;     // PSD m x m
};

/// Linear map M_k -> M_m in one of three presentations:
///   choi:   sum_ij E_ij (x) phi(E_ij)
///   kraus:  X -> sum_l A_l^* X A_l with A_l in M_{k,m}
///   holevo: X -> sum_l s_l(X) P_l
class MatrixMap {
 public:
  static MatrixMap from_choi(BlockElement choi);
  static MatrixMap from_kraus(std::size_t k, std::size_t m, std::vector<ComplexMatrix> kraus);
  static MatrixMap from_holevo(std::size_t k, std::size_t m, std::vector<HolevoTerm> terms);

  static MatrixMap identity(std::size_t k);
  static MatrixMap transpose(std::size_t k);
  /// X -> tr(X) I_m / m
  static MatrixMap depolarizing(std::size_t k, std::size_t m);
  /// X -> sum_i x_ii E_ii
  static MatrixMap dephasing(std::size_t k);
  /// X -> A X B with A in M_{m,k}, B in M_{k,m}.
  static MatrixMap sandwich(const ComplexMatrix& a, const ComplexMatrix& b);

  std::size_t k() const noexcept { return k_; }
  std::size_t m() const noexcept { return m_; }
  MapKind kind() const noexcept { return kind_; }

  const BlockElement& choi_data() const { return choi_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  const std::vector<HolevoTerm>& holevo() const { return holevo_; }

  ComplexMatrix apply(const ComplexMatrix& x) const;

 private:
  std::size_t k_ = 0;
  std::size_t m_ = 0;
  MapKind kind_ = MapKind::Choi;
  BlockElement choi_;
  std::vector<ComplexMatrix> kraus_;
  std::vector<HolevoTerm> holevo_;
};

BlockElement choi(const MatrixMap& phi);
MatrixMap map_from_choi(const BlockElement& c);

/// Largest entry deviation of phi and psi on the basis E_ij of M_k.
double basis_deviation(const MatrixMap& phi, const MatrixMap& psi);

/// phi^flat = gamma_k^{-1} o phi' o gamma_m : M_m -> M_k, i.e.
/// phi^flat(E_ij)_ab = phi(E_ab)_ij. Keeps the presentation kind.
MatrixMap flat_adjoint(const MatrixMap& phi);

/// The Hilbert-Schmidt adjoint phi^dagger (tr(phi(X)^* Y) = tr(X^* phi^dagger(Y))).
/// This is the entrywise conjugate of phi^flat and is NOT the flat adjoint.
MatrixMap hilbert_schmidt_adjoint(const MatrixMap& phi);

/// Block-positive F (certified by min_cone_test) with Re pair(F, A) < 0, found
/// from a negative eigenvector of A or of its partial transpose. Empty when A
/// is PSD and PPT.
struct DualWitness {
  BlockElement functional;
  double pairing = 0.0;
  ConeVerdict block_positivity;
};
std::optional<DualWitness> negative_pairing_witness(const BlockElement& a, const SearchBudget& budget = {});

struct DualityViolation {
  std::string kind;  // "qmin-cmin", "qmax-dmax" or "qmax-evaluation"
  std::size_t index = 0;
  double value = 0.0;
  BlockElement functional;
  BlockElement element;
};

struct DualityReport {
  std::size_t pairs = 0;
  double min_pairing = 0.0;
  std::size_t evaluations = 0;
  double min_evaluation_eigenvalue = 0.0;
  std::vector<DualityViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// For each sample: a Q^min functional sum P_i (x) g_i paired with a certified
/// block-positive element, a Q^max functional (block-positive F) paired with a
/// separable element, and (f_ij(v)) for v PSD checked PSD.
DualityReport dual_cone_check(std::size_t n, std::size_t m, std::size_t samples, std::uint64_t seed);

}  // namespace omaxcones
