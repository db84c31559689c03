#include "omaxcones/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omaxcones/random.hpp"

namespace omaxcones {

cplx FunctionalMatrix::operator()(const ComplexMatrix& x) const {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw Error(ErrorCode::ShapeMismatch, "functional argument shape");
  return bilinear_pairing(x, y);
}

bool FunctionalMatrix::positive(double tol) const { return is_hermitian(y) && is_psd(y, tol).psd; }

FunctionalMatrix gamma(const ComplexMatrix& y) {
  if (!y.square()) throw Error(ErrorCode::ShapeMismatch, "gamma expects a square matrix");
  return {y};
}

ComplexMatrix gamma_inv(const FunctionalMatrix& f) { return f.y; }

cplx pair(const BlockElement& f, const BlockElement& a) {
  if (f.n() != a.n() || f.m() != a.m()) throw Error(ErrorCode::ShapeMismatch, "pair: block shapes differ");
  return bilinear_pairing(a.flat(), f.flat());
}

ComplexMatrix evaluate_functionals(const BlockElement& f, const ComplexMatrix& v) {
  if (v.rows() != f.m() || v.cols() != f.m()) throw Error(ErrorCode::ShapeMismatch, "evaluate_functionals");
  ComplexMatrix out(f.n(), f.n());
  for (std::size_t i = 0; i < f.n(); ++i)
    for (std::size_t j = 0; j < f.n(); ++j) out(i, j) = bilinear_pairing(v, f.block(i, j));
  return out;
}

const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::Choi: return "choi";
    case MapKind::Kraus: return "kraus";
    case MapKind::Holevo: return "holevo";
  }
  return "choi";
}

MatrixMap MatrixMap::from_choi(BlockElement choi) {
  MatrixMap out;
  out.k_ = choi.n();
  out.m_ = choi.m();
  out.kind_ = MapKind::Choi;
  out.choi_ = std::move(choi);
  return out;
}

MatrixMap MatrixMap::from_kraus(std::size_t k, std::size_t m, std::vector<ComplexMatrix> kraus) {
  for (const auto& a : kraus)
    if (a.rows() != k || a.cols() != m) throw Error(ErrorCode::ShapeMismatch, "Kraus operators must be k x m");
  MatrixMap out;
  out.k_ = k;
  out.m_ = m;
  out.kind_ = MapKind::Kraus;
  out.kraus_ = std::move(kraus);
  return out;
}

MatrixMap MatrixMap::from_holevo(std::size_t k, std::size_t m, std::vector<HolevoTerm> terms) {
  for (const auto& t : terms) {
    if (t.s.y.rows() != k || t.s.y.cols() != k || t.p.rows() != m || t.p.cols() != m)
      throw Error(ErrorCode::ShapeMismatch, "Holevo terms must be (k x k, m x m)");
  }
  MatrixMap out;
  out.k_ = k;
  out.m_ = m;
  out.kind_ = MapKind::Holevo;
  out.holevo_ = std::move(terms);
  return out;
}

MatrixMap MatrixMap::identity(std::size_t k) { return from_kraus(k, k, {ComplexMatrix::identity(k)}); }

MatrixMap MatrixMap::transpose(std::size_t k) {
  BlockElement c(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) c.at(i, j, j, i) = 1.0;
  return from_choi(std::move(c));
}

MatrixMap MatrixMap::depolarizing(std::size_t k, std::size_t m) {
  ComplexMatrix p = ComplexMatrix::identity(m);
  p *= 1.0 / static_cast<double>(m);
  return from_holevo(k, m, {HolevoTerm{gamma(ComplexMatrix::identity(k)), std::move(p)}});
}

MatrixMap MatrixMap::dephasing(std::size_t k) {
  std::vector<HolevoTerm> terms;
  for (std::size_t i = 0; i < k; ++i) {
    const auto e = ComplexMatrix::unit(k, k, i, i);
    terms.push_back({gamma(e), e});
  }
  return from_holevo(k, k, std::move(terms));
}

MatrixMap MatrixMap::sandwich(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t m = a.rows(), k = a.cols();
  if (b.rows() != k || b.cols() != m) throw Error(ErrorCode::ShapeMismatch, "sandwich: A is m x k, B is k x m");
  BlockElement c(k, m);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) c.set_block(i, j, a * ComplexMatrix::unit(k, k, i, j) * b);
  return from_choi(std::move(c));
}

ComplexMatrix MatrixMap::apply(const ComplexMatrix& x) const {
  if (x.rows() != k_ || x.cols() != k_) throw Error(ErrorCode::ShapeMismatch, "map argument must be k x k");
  ComplexMatrix out(m_, m_);
  switch (kind_) {
    case MapKind::Choi:
      for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j)
          if (x(i, j) != 0.0) out.add_scaled(x(i, j), choi_.block(i, j));
      break;
    case MapKind::Kraus:
      for (const auto& a : kraus_) out += a.adjoint() * x * a;
      break;
    case MapKind::Holevo:
      for (const auto& t : holevo_) out.add_scaled(t.s(x), t.p);
      break;
  }
  return out;
}

BlockElement choi(const MatrixMap& phi) {
  if (phi.kind() == MapKind::Choi) return phi.choi_data();
  BlockElement c(phi.k(), phi.m());
  for (std::size_t i = 0; i < phi.k(); ++i)
    for (std::size_t j = 0; j < phi.k(); ++j) c.set_block(i, j, phi.apply(ComplexMatrix::unit(phi.k(), phi.k(), i, j)));
  return c;
}

MatrixMap map_from_choi(const BlockElement& c) { return MatrixMap::from_choi(c); }

double basis_deviation(const MatrixMap& phi, const MatrixMap& psi) {
  if (phi.k() != psi.k() || phi.m() != psi.m()) throw Error(ErrorCode::ShapeMismatch, "basis_deviation");
  return max_abs_diff(choi(phi).flat(), choi(psi).flat());
}

MatrixMap flat_adjoint(const MatrixMap& phi) {
  switch (phi.kind()) {
    case MapKind::Choi:
      return MatrixMap::from_choi(swap_factors(phi.choi_data()));
    case MapKind::Kraus: {
      std::vector<ComplexMatrix> out;
      for (const auto& a : phi.kraus()) out.push_back(a.transpose());
      return MatrixMap::from_kraus(phi.m(), phi.k(), std::move(out));
    }
    case MapKind::Holevo: {
      // phi(E_ab)_ij = sum_l (Y_l)_ab (P_l)_ij, so the roles of s_l and P_l swap.
      std::vector<HolevoTerm> out;
      for (const auto& t : phi.holevo()) out.push_back({gamma(t.p), t.s.y});
      return MatrixMap::from_holevo(phi.m(), phi.k(), std::move(out));
    }
  }
  return phi;
}

MatrixMap hilbert_schmidt_adjoint(const MatrixMap& phi) {
  switch (phi.kind()) {
    case MapKind::Choi: {
      auto c = swap_factors(phi.choi_data());
      c.flat() = c.flat().conj();
      return MatrixMap::from_choi(std::move(c));
    }
    case MapKind::Kraus: {
      std::vector<ComplexMatrix> out;
      for (const auto& a : phi.kraus()) out.push_back(a.adjoint());
      return MatrixMap::from_kraus(phi.m(), phi.k(), std::move(out));
    }
    case MapKind::Holevo: {
      std::vector<HolevoTerm> out;
      for (const auto& t : phi.holevo()) out.push_back({gamma(t.p.conj()), t.s.y.conj()});
      return MatrixMap::from_holevo(phi.m(), phi.k(), std::move(out));
    }
  }
  return phi;
}

std::optional<DualWitness> negative_pairing_witness(const BlockElement& a, const SearchBudget& budget) {
  require_hermitian(a.flat(), "negative_pairing_witness");
  const std::size_t n = a.n(), m = a.m();
  const auto sp = eig_hermitian(a.flat());
  const double scale =
      1.0 + (sp.eigenvalues.empty() ? 0.0 : std::max(std::abs(sp.eigenvalues.front()), std::abs(sp.eigenvalues.back())));
  // pair(F, A) = tr(A F^t), so F^t is the block-positive matrix we pair against.
  BlockElement ft;
  if (!sp.eigenvalues.empty() && sp.eigenvalues.front() < -budget.psd_tol * scale) {
    ft = BlockElement(n, m, ComplexMatrix::outer(sp.eigenvectors.col(0)));
  } else {
    const auto spt = eig_hermitian(partial_transpose(a).flat());
    if (spt.eigenvalues.empty() || spt.eigenvalues.front() >= -budget.psd_tol * scale) return std::nullopt;
    ft = partial_transpose(BlockElement(n, m, ComplexMatrix::outer(spt.eigenvectors.col(0))));
  }
  DualWitness w;
  w.functional = BlockElement(n, m, ft.flat().transpose());
  w.pairing = pair(w.functional, a).real();
  w.block_positivity = min_cone_test(w.functional, budget);
  return w;
}

DualityReport dual_cone_check(std::size_t n, std::size_t m, std::size_t samples, std::uint64_t seed) {
  DualityReport report;
  if (samples == 0) return report;
  report.min_pairing = std::numeric_limits<double>::infinity();
  report.min_evaluation_eigenvalue = std::numeric_limits<double>::infinity();
  const double floor = -1e-9;
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(seed, s);

    // Q^min: sum P_i (x) g_i with P_i PSD and g_i positive functionals,
    // against a block-positive P + PT(Q).
    BlockElement qmin(n, m);
    const std::size_t terms = 1 + rng.index(3);
    for (std::size_t t = 0; t < terms; ++t) qmin.flat() += kron(rng.wishart(n, 1), rng.wishart(m, 1 + rng.index(m)));
    const auto bp = sample_decomposable(n, m, split_seed(seed, 2 * s));
    const double v1 = pair(qmin, bp).real();
    report.min_pairing = std::min(report.min_pairing, v1);
    if (v1 < floor) report.violations.push_back({"qmin-cmin", s, v1, qmin, bp});

    // Q^max: a block-positive F against a separable element.
    const auto qmax = sample_decomposable(n, m, split_seed(seed, 2 * s + 1));
    const auto sep = sample_dmax(n, m, 1 + rng.index(4), split_seed(seed, s)).element;
    const double v2 = pair(qmax, sep).real();
    report.min_pairing = std::min(report.min_pairing, v2);
    if (v2 < floor) report.violations.push_back({"qmax-dmax", s, v2, qmax, sep});

    const auto v = rng.wishart(m, 1 + rng.index(m));
    const double lmin = eigvalsh(hermitian_part(evaluate_functionals(qmax, v))).front();
    ++report.evaluations;
    report.min_evaluation_eigenvalue = std::min(report.min_evaluation_eigenvalue, lmin);
    if (lmin < floor) report.violations.push_back({"qmax-evaluation", s, lmin, qmax, BlockElement(1, m, v)});
    report.pairs += 2;
  }
  return report;
}

}  // namespace omaxcones
