#pragma once
// Membership in the minimal cone C_n^min(M_m) (block-positive elements) and the
// maximal cone D_n^max(M_m) (separable elements), with certificates.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "omaxcones/matcore.hpp"

namespace omaxcones {

enum class ConeStatus { Member, NotMember, Undetermined };
const char* to_string(ConeStatus s);

struct SearchBudget {
  std::uint64_t seed = 0;
  int restarts = 64;          // see-saw restarts for product-vector searches
  int iterations = 10000;     // decomposition search iterations
  double tol = 1e-10;         // squared relative Frobenius distance for the decomposition search
  double psd_tol = tolerance::psd;
  int decomposable_iterations = 2000;
  int oracle_restarts = 4;    // see-saw restarts inside one decomposition step
  bool prefer_sufficiency = false;  // skip the search when PPT already decides membership
};

struct TensorTerm {
  ComplexMatrix a;  // n x n PSD
  ComplexMatrix v;  // m x m PSD
};

struct SeparableDecomposition {
  std::vector<TensorTerm> terms;

  BlockElement resum(std::size_t n, std::size_t m) const;
};

/// <x (x) y, A (x (x) y)> = value < 0 shows A is not block-positive.
struct ProductWitness {
  std::vector<cplx> x;
  std::vector<cplx> y;
  double value = 0.0;
};

/// Negative eigenpair of the partial transpose.
struct PptViolation {
  double eigenvalue = 0.0;
  std::vector<cplx> eigenvector;
};

/// Block-positive W = v v^* (or its partial transpose) with Re tr(A W) = value < 0.
struct WitnessFunctional {
  std::vector<cplx> vector;
  bool partial_transposed = false;
  double value = 0.0;

  BlockElement matrix(std::size_t n, std::size_t m) const;
};

struct PsdCertificate {
  double min_eigenvalue = 0.0;
};

/// flat(A) = P + partial_transpose(Q) with P, Q PSD.
struct DecomposableCertificate {
  ComplexMatrix p;
  ComplexMatrix q;
};

/// Membership that follows from an imported fact rather than a construction.
struct SufficiencyTag {
  std::string kind;
  std::string note;
};

struct BudgetReport {
  double best_value = 0.0;
  int restarts_used = 0;
  int iterations_used = 0;
  double residual = 0.0;
};

using Certificate = std::variant<SeparableDecomposition, ProductWitness, PptViolation, WitnessFunctional,
                                 PsdCertificate, DecomposableCertificate, SufficiencyTag, BudgetReport>;

std::string certificate_kind(const Certificate& c);

struct ConeVerdict {
  ConeStatus status = ConeStatus::Undetermined;
  Certificate certificate = BudgetReport{};
  double margin = 0.0;
  bool ppt_sufficient = false;
};

/// Best product vector found by alternating eigenvector updates.
struct ProductSearchResult {
  std::vector<cplx> x;
  std::vector<cplx> y;
  double value = 0.0;
  int restarts_used = 0;
};

/// Maximizes <x (x) y, D (x (x) y)> over unit x, y. Restart r starts from the
/// basis vector e_r for r < n, from y = e_{r-n} for r < n + m, and from a random
/// x seeded by (seed, r) otherwise. Ties keep the lower restart index.
ProductSearchResult maximize_product(const BlockElement& d, int restarts, std::uint64_t seed,
                                     std::span<const std::vector<cplx>> warm_starts = {});

ConeVerdict min_cone_test(const BlockElement& a, const SearchBudget& budget = {});
ConeVerdict max_cone_test(const BlockElement& a, const SearchBudget& budget = {});

struct DecompositionResult {
  bool found = false;
  SeparableDecomposition decomposition;
  double residual = 0.0;  // relative Frobenius error of the returned terms
  int iterations = 0;
};

/// Conditional-gradient search over product states x x^* (x) y y^* with fully
/// corrective weights. Interior points are first approached from A - delta I
/// and the remainder is absorbed exactly through the hermitian tensor
/// decomposition. Throws NotPSD when flat(A) is not PSD.
DecompositionResult decompose_separable(const BlockElement& a, const SearchBudget& budget = {});

struct DmaxSample {
  BlockElement element;
  SeparableDecomposition decomposition;
};

/// Conic combination of `terms` products of Wishart PSD factors.
DmaxSample sample_dmax(std::size_t n, std::size_t m, std::size_t terms, std::uint64_t seed);

/// P + partial_transpose(Q) with Wishart P, Q; block-positive by construction.
BlockElement sample_decomposable(std::size_t n, std::size_t m, std::uint64_t seed);

/// alpha diag(v_1, ..., v_q) alpha^*: one column of alpha per rank-one piece.
struct AlphaDiagForm {
  ComplexMatrix alpha;  // n x q
  std::vector<ComplexMatrix> v;
};
AlphaDiagForm to_alpha_diag(const SeparableDecomposition& dec, std::size_t n);
BlockElement from_alpha_diag(const AlphaDiagForm& form);

struct CertificateCheck {
  bool ok = false;
  double deviation = 0.0;
  std::string detail;
};

/// Re-verifies a verdict by direct evaluation only (eigensolve, pairing or
/// re-summation); never re-runs a search.
CertificateCheck verify_min_verdict(const BlockElement& a, const ConeVerdict& v, double tol = tolerance::psd);
CertificateCheck verify_max_verdict(const BlockElement& a, const ConeVerdict& v, double tol = tolerance::psd);

}  // namespace omaxcones
