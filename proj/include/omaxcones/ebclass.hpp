#pragma once
// Entanglement-breaking classification of maps M_k -> M_m and conversion
// between separable Choi, Holevo and rank-one Kraus certificates.

#include <cstdint>
#include <string>
#include <vector>

#include "omaxcones/cones.hpp"
#include "omaxcones/duality.hpp"

namespace omaxcones {

enum class EBStatus { NotCP, CPNotEB, EB, Undetermined };
const char* to_string(EBStatus s);

struct CrossCheck {
  std::string forms;  // e.g. "holevo-choi"
  double deviation = 0.0;
};

struct EBVerdict {
  EBStatus status = EBStatus::Undetermined;
  double choi_min_eigenvalue = 0.0;
  std::vector<cplx> choi_min_eigenvector;  // reported for NotCP
  ConeVerdict choi_cone;                    // max-cone verdict of the Choi matrix (CP maps)
  std::vector<HolevoTerm> holevo;           // EB only
  std::vector<ComplexMatrix> kraus;         // EB only, rank one
  std::vector<CrossCheck> cross_checks;
  std::string note;

  /// Kinds present among {choi-psd, ppt-violation, witness-functional,
  /// separable-choi, holevo, rank-one-kraus}.
  std::vector<std::string> certificates() const;
};

/// CP check on the Choi matrix, then max_cone_test on it. Member with a
/// decomposition yields EB with Holevo and Kraus forms; a membership that rests
/// only on PPT sufficiency is reported Undetermined with a note.
EBVerdict classify(const MatrixMap& phi, const SearchBudget& budget = {});

/// phi(X) = sum_l s_l(X) P_l from choi(phi) = sum_l a_l (x) P_l: each a_l is
/// refined into rank-one pieces lambda u u^*, i.e. vector states at
/// sqrt(lambda) conj(u). Throws CertificateMismatch when the decomposition does
/// not re-sum to the Choi matrix within 1e-8.
std::vector<HolevoTerm> holevo_from_separable(const SeparableDecomposition& dec, const BlockElement& choi_matrix);

/// Sums the functionals of terms whose P matrices coincide.
std::vector<HolevoTerm> merge_holevo_terms(const std::vector<HolevoTerm>& terms);

/// Rank-one Kraus operators A = (sqrt(lambda) conj(u)) (sqrt(mu) p)^* from the
/// spectral pieces of each s_l and P_l (cutoff 1e-10 of the largest eigenvalue).
std::vector<ComplexMatrix> kraus_from_holevo(const std::vector<HolevoTerm>& terms);

/// A = sigma a b^* gives s(X) = sigma a^* X a and P = sigma b b^*. Throws
/// NotRankOne when the second singular value exceeds 1e-8 of the first.
std::vector<HolevoTerm> holevo_from_kraus(const std::vector<ComplexMatrix>& kraus);

struct FalsifyReport {
  bool not_cp = false;  // short-circuit: the Choi matrix is not PSD
  std::size_t checked = 0;
  bool counterexample_found = false;
  BlockElement counterexample;  // block-positive input in M_n(M_k)
  double image_min_eigenvalue = 0.0;
  EBStatus classified = EBStatus::Undetermined;
  bool consistent = true;  // counterexample found => not EB
  std::string note;
};

/// Samples block-positive P + PT(Q) in M_n(M_k) and checks that (phi(v_ij)) is PSD.
FalsifyReport cp_omin_falsify(const MatrixMap& phi, std::size_t n, std::size_t samples, std::uint64_t seed,
                              const SearchBudget& budget = {});

struct CoEBReport {
  EBStatus phi = EBStatus::Undetermined;
  EBStatus flat = EBStatus::Undetermined;
  bool consistent = true;
};

/// Classifies phi and flat_adjoint(phi); EB status must agree unless one side is Undetermined.
CoEBReport co_eb_check(const MatrixMap& phi, const SearchBudget& budget = {});

/// Applies phi blockwise: (phi(v_ij)) for v in M_n(M_k).
BlockElement apply_blockwise(const MatrixMap& phi, const BlockElement& v);

}  // namespace omaxcones
