#include "omaxcones/ebclass.hpp"

#include <algorithm>
#include <cmath>

#include "omaxcones/random.hpp"

namespace omaxcones {

const char* to_string(EBStatus s) {
  switch (s) {
    case EBStatus::NotCP: return "NotCP";
    case EBStatus::CPNotEB: return "CPNotEB";
    case EBStatus::EB: return "EB";
    case EBStatus::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::vector<std::string> EBVerdict::certificates() const {
  std::vector<std::string> out;
  if (status == EBStatus::NotCP) return out;
  out.push_back("choi-psd");
  if (status == EBStatus::CPNotEB) out.push_back(certificate_kind(choi_cone.certificate));
  if (status == EBStatus::EB) {
    out.push_back("separable-choi");
    out.push_back("holevo");
    out.push_back("rank-one-kraus");
  }
  return out;
}

namespace {

struct RankOnePiece {
  double weight;
  std::vector<cplx> vector;
};

std::vector<RankOnePiece> rank_one_pieces(const ComplexMatrix& h, const char* what) {
  const auto sp = eig_hermitian(hermitian_part(h));
  std::vector<RankOnePiece> out;
  if (sp.eigenvalues.empty()) return out;
  const double top = std::max(std::abs(sp.eigenvalues.front()), std::abs(sp.eigenvalues.back()));
  if (sp.eigenvalues.front() < -tolerance::psd * (1.0 + top))
    throw Error(ErrorCode::NotPSD, std::string(what) + " has eigenvalue " + std::to_string(sp.eigenvalues.front()));
  for (std::size_t k = sp.eigenvalues.size(); k-- > 0;) {
    const double lam = sp.eigenvalues[k];
    if (lam <= 1e-10 * top) break;
    out.push_back({lam, sp.eigenvectors.col(k)});
  }
  return out;
}

std::vector<cplx> conj_vector(std::vector<cplx> v) {
  for (auto& z : v) z = std::conj(z);
  return v;
}

}  // namespace

std::vector<HolevoTerm> holevo_from_separable(const SeparableDecomposition& dec, const BlockElement& choi_matrix) {
  const std::size_t k = choi_matrix.n(), m = choi_matrix.m();
  const double err = relative_frobenius_error(dec.resum(k, m).flat(), choi_matrix.flat());
  if (!(err <= 1e-8))
    throw Error(ErrorCode::CertificateMismatch, "separable decomposition re-sums with error " + std::to_string(err));
  // choi = sum a_l (x) P_l means phi(E_ij) = sum_l (a_l)_ij P_l, so s_l = gamma(a_l).
  std::vector<HolevoTerm> out;
  for (const auto& t : dec.terms) {
    for (const auto& piece : rank_one_pieces(t.a, "separable factor")) {
      auto y = ComplexMatrix::outer(piece.vector);
      y *= piece.weight;
      out.push_back({gamma(std::move(y)), t.v});
    }
  }
  return out;
}

std::vector<HolevoTerm> merge_holevo_terms(const std::vector<HolevoTerm>& terms) {
  std::vector<HolevoTerm> out;
  for (const auto& t : terms) {
    auto same = std::find_if(out.begin(), out.end(), [&](const HolevoTerm& o) {
      return max_abs_diff(o.p, t.p) <= 1e-14 * (1.0 + t.p.max_abs());
    });
    if (same == out.end()) {
      out.push_back(t);
    } else {
      same->s.y += t.s.y;
    }
  }
  return out;
}

std::vector<ComplexMatrix> kraus_from_holevo(const std::vector<HolevoTerm>& terms) {
  std::vector<ComplexMatrix> out;
  for (const auto& t : terms) {
    const auto states = rank_one_pieces(t.s.y, "Holevo functional");
    const auto effects = rank_one_pieces(t.p, "Holevo effect");
    for (const auto& s : states) {
      // s(X) = lambda u^t X conj(u) is the vector state at sqrt(lambda) conj(u).
      const auto v = conj_vector(s.vector);
      for (const auto& e : effects) {
        const double scale = std::sqrt(s.weight * e.weight);
        ComplexMatrix a(v.size(), e.vector.size());
        for (std::size_t i = 0; i < v.size(); ++i)
          for (std::size_t j = 0; j < e.vector.size(); ++j) a(i, j) = scale * v[i] * std::conj(e.vector[j]);
        out.push_back(std::move(a));
      }
    }
  }
  return out;
}

std::vector<HolevoTerm> holevo_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  std::vector<HolevoTerm> out;
  for (const auto& a : kraus) {
    const auto sp = eig_hermitian(hermitian_part(a.adjoint() * a));
    const std::size_t m = a.cols();
    if (m == 0) continue;
    const double s1 = std::max(0.0, sp.eigenvalues.back());
    if (s1 == 0.0) continue;
    const auto b = sp.eigenvectors.col(m - 1);
    // ||A - A b b^*||_F bounds the remaining singular values without squaring them.
    const auto ab = a * std::span<const cplx>(b);
    const double rest = (a - ComplexMatrix::column(ab) * ComplexMatrix::column(b).adjoint()).frobenius_norm();
    if (rest > 1e-8 * std::sqrt(s1))
      throw Error(ErrorCode::NotRankOne, "Kraus operator has rank above one (tail " + std::to_string(rest) +
                                             ", leading singular value " + std::to_string(std::sqrt(s1)) + ")");
    const double sigma = std::sqrt(s1);
    auto av = ab;
    for (auto& z : av) z /= sigma;
    // A^* X A = sigma^2 (a^* X a) b b^*, and a^* X a = tr(X conj(a a^*)^t).
    auto y = ComplexMatrix::outer(av).conj();
    y *= sigma;
    auto p = ComplexMatrix::outer(b);
    p *= sigma;
    out.push_back({gamma(std::move(y)), std::move(p)});
  }
  return out;
}

EBVerdict classify(const MatrixMap& phi, const SearchBudget& budget) {
  EBVerdict out;
  const auto c = choi(phi);
  if (!is_hermitian(c.flat())) {
    out.status = EBStatus::NotCP;
    out.note = "Choi matrix is not hermitian";
    const auto sp = eig_hermitian(hermitian_part(c.flat()));
    out.choi_min_eigenvalue = sp.eigenvalues.front();
    out.choi_min_eigenvector = sp.eigenvectors.col(0);
    return out;
  }
  const auto sp = eig_hermitian(c.flat());
  const double scale =
      1.0 + (sp.eigenvalues.empty() ? 0.0 : std::max(std::abs(sp.eigenvalues.front()), std::abs(sp.eigenvalues.back())));
  out.choi_min_eigenvalue = sp.eigenvalues.empty() ? 0.0 : sp.eigenvalues.front();
  if (out.choi_min_eigenvalue < -budget.psd_tol * scale) {
    out.status = EBStatus::NotCP;
    out.choi_min_eigenvector = sp.eigenvectors.col(0);
    return out;
  }

  SearchBudget search = budget;
  search.prefer_sufficiency = false;
  out.choi_cone = max_cone_test(c, search);
  switch (out.choi_cone.status) {
    case ConeStatus::NotMember:
      out.status = EBStatus::CPNotEB;
      return out;
    case ConeStatus::Undetermined:
      out.status = EBStatus::Undetermined;
      out.note = "decomposition search exhausted its budget";
      return out;
    case ConeStatus::Member:
      break;
  }
  const auto* dec = std::get_if<SeparableDecomposition>(&out.choi_cone.certificate);
  if (dec == nullptr) {
    out.status = EBStatus::Undetermined;
    out.note = "PPT decides membership in this dimension, but no separable decomposition was constructed";
    return out;
  }

  out.holevo = merge_holevo_terms(holevo_from_separable(*dec, c));
  out.kraus = kraus_from_holevo(out.holevo);
  const auto holevo_map = MatrixMap::from_holevo(phi.k(), phi.m(), out.holevo);
  const auto kraus_map = MatrixMap::from_kraus(phi.k(), phi.m(), out.kraus);
  out.cross_checks = {
      {"separable-choi", max_abs_diff(dec->resum(phi.k(), phi.m()).flat(), c.flat())},
      {"holevo-choi", max_abs_diff(choi(holevo_map).flat(), c.flat())},
      {"kraus-choi", max_abs_diff(choi(kraus_map).flat(), c.flat())},
      {"holevo-kraus", basis_deviation(holevo_map, kraus_map)},
  };
  const double bound = 1e-8 * (1.0 + c.flat().max_abs());
  const bool consistent =
      std::all_of(out.cross_checks.begin(), out.cross_checks.end(), [&](const CrossCheck& x) { return x.deviation <= bound; });
  if (consistent) {
    out.status = EBStatus::EB;
  } else {
    out.status = EBStatus::Undetermined;
    out.note = "certificate forms disagree beyond 1e-8";
  }
  return out;
}

BlockElement apply_blockwise(const MatrixMap& phi, const BlockElement& v) {
  if (v.m() != phi.k()) throw Error(ErrorCode::ShapeMismatch, "apply_blockwise: inner size must equal k");
  BlockElement out(v.n(), phi.m());
  for (std::size_t i = 0; i < v.n(); ++i)
    for (std::size_t j = 0; j < v.n(); ++j) out.set_block(i, j, phi.apply(v.block(i, j)));
  return out;
}

FalsifyReport cp_omin_falsify(const MatrixMap& phi, std::size_t n, std::size_t samples, std::uint64_t seed,
                              const SearchBudget& budget) {
  FalsifyReport out;
  const auto c = choi(phi);
  if (!is_hermitian(c.flat()) || !is_psd(c.flat(), budget.psd_tol).psd) {
    out.not_cp = true;
    out.classified = EBStatus::NotCP;
    out.note = "NotCP: the Choi matrix is not PSD, so phi already fails on PSD inputs";
    return out;
  }
  out.classified = classify(phi, budget).status;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto v = sample_decomposable(n, phi.k(), split_seed(seed, s));
    const auto image = apply_blockwise(phi, v);
    const auto res = is_psd(hermitian_part(image.flat()), budget.psd_tol);
    ++out.checked;
    if (!res.psd) {
      out.counterexample_found = true;
      out.counterexample = v;
      out.image_min_eigenvalue = res.min_eigenvalue;
      break;
    }
  }
  out.consistent = !(out.counterexample_found && out.classified == EBStatus::EB);
  return out;
}

CoEBReport co_eb_check(const MatrixMap& phi, const SearchBudget& budget) {
  CoEBReport out;
  out.phi = classify(phi, budget).status;
  out.flat = classify(flat_adjoint(phi), budget).status;
  const bool undecided = out.phi == EBStatus::Undetermined || out.flat == EBStatus::Undetermined;
  out.consistent = undecided || ((out.phi == EBStatus::EB) == (out.flat == EBStatus::EB));
  return out;
}

}  // namespace omaxcones
