#include "omaxcones/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "omaxcones/lp.hpp"
#include "omaxcones/random.hpp"

namespace omaxcones {

const char* to_string(ConeStatus s) {
  switch (s) {
    case ConeStatus::Member: return "Member";
    case ConeStatus::NotMember: return "NotMember";
    case ConeStatus::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string certificate_kind(const Certificate& c) {
  struct Visitor {
    std::string operator()(const SeparableDecomposition&) const { return "separable-decomposition"; }
    std::string operator()(const ProductWitness&) const { return "product-witness"; }
    std::string operator()(const PptViolation&) const { return "ppt-violation"; }
    std::string operator()(const WitnessFunctional&) const { return "witness-functional"; }
    std::string operator()(const PsdCertificate&) const { return "psd"; }
    std::string operator()(const DecomposableCertificate&) const { return "decomposable"; }
    std::string operator()(const SufficiencyTag& t) const { return t.kind; }
    std::string operator()(const BudgetReport&) const { return "budget-report"; }
  };
  return std::visit(Visitor{}, c);
}

BlockElement SeparableDecomposition::resum(std::size_t n, std::size_t m) const {
  BlockElement out(n, m);
  for (const auto& t : terms) out.flat() += kron(t.a, t.v);
  return out;
}

BlockElement WitnessFunctional::matrix(std::size_t n, std::size_t m) const {
  BlockElement w(n, m, ComplexMatrix::outer(vector));
  return partial_transposed ? partial_transpose(w) : w;
}

namespace {

double spectral_scale(const std::vector<double>& ev) {
  if (ev.empty()) return 0.0;
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

std::vector<cplx> top_eigenvector(const ComplexMatrix& h, double& value) {
  const auto sp = eig_hermitian(hermitian_part(h));
  value = sp.eigenvalues.back();
  return sp.eigenvectors.col(h.rows() - 1);
}

std::vector<cplx> basis_vector(std::size_t n, std::size_t i) {
  std::vector<cplx> e(n);
  e[i] = 1.0;
  return e;
}

struct SeesawOutcome {
  std::vector<cplx> x, y;
  double value = -std::numeric_limits<double>::infinity();
};

// Alternating maximization starting from x (when non-empty) or from y.
SeesawOutcome seesaw(const BlockElement& d, std::vector<cplx> x, std::vector<cplx> y) {
  SeesawOutcome out;
  double v = 0.0;
  if (!x.empty()) y = top_eigenvector(d.compress_outer(x), v);
  for (int it = 0; it < 200; ++it) {
    x = top_eigenvector(d.compress_inner(y), v);
    y = top_eigenvector(d.compress_outer(x), v);
    const bool done = v - out.value <= 1e-13 * (1.0 + std::abs(v));
    out.value = v;
    if (done) break;
  }
  out.x = std::move(x);
  out.y = std::move(y);
  return out;
}

}  // namespace

ProductSearchResult maximize_product(const BlockElement& d, int restarts, std::uint64_t seed,
                                     std::span<const std::vector<cplx>> warm_starts) {
  const std::size_t n = d.n(), m = d.m();
  ProductSearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  if (n == 0 || m == 0) {
    best.value = 0.0;
    return best;
  }
  auto consider = [&](SeesawOutcome&& o) {
    if (o.value > best.value) {
      best.value = o.value;
      best.x = std::move(o.x);
      best.y = std::move(o.y);
    }
  };
  for (const auto& x0 : warm_starts) consider(seesaw(d, x0, {}));
  for (int r = 0; r < restarts; ++r) {
    const auto ur = static_cast<std::size_t>(r);
    if (ur < n) {
      consider(seesaw(d, basis_vector(n, ur), {}));
    } else if (ur < n + m) {
      consider(seesaw(d, {}, basis_vector(m, ur - n)));
    } else {
      Rng rng(seed, ur);
      consider(seesaw(d, rng.unit_vector(n), {}));
    }
    best.restarts_used = r + 1;
  }
  // Recompute the value directly from the vectors.
  best.value = d.product_value(best.x, best.y).real();
  return best;
}

// ---------------------------------------------------------------------------
// Minimal cone

namespace {

// Projects onto {H >= floor * I}.
ComplexMatrix floor_projection(const ComplexMatrix& h, double floor) {
  if (floor <= 0.0) return psd_projection(hermitian_part(h));
  ComplexMatrix shifted = hermitian_part(h);
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= floor;
  shifted = psd_projection(shifted);
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += floor;
  return shifted;
}

// Alternating projections between {P + PT(Q) = A} and {P, Q >= floor * I}.
// A positive product margin mu leaves room for floor = mu / 4 on both sides,
// which keeps the final PSD check away from the boundary.
std::optional<DecomposableCertificate> find_decomposable(const BlockElement& a, int iterations, double tol,
                                                         double floor) {
  const std::size_t n = a.n(), m = a.m();
  const ComplexMatrix& flat = a.flat();
  auto pt = [&](const ComplexMatrix& x) { return partial_transpose(BlockElement(n, m, x)).flat(); };
  auto accept = [&](const ComplexMatrix& q) -> std::optional<DecomposableCertificate> {
    ComplexMatrix p = hermitian_part(flat - pt(q));
    if (is_psd(q, tol).psd && is_psd(p, tol).psd) return DecomposableCertificate{std::move(p), q};
    return std::nullopt;
  };
  // P = 0: A is the partial transpose of a PSD matrix.
  if (auto c = accept(hermitian_part(pt(flat)))) return c;

  ComplexMatrix p = floor_projection(flat, floor);
  ComplexMatrix q = floor_projection(pt(flat - p), floor);
  for (int it = 0; it < iterations; ++it) {
    ComplexMatrix r = flat - p - pt(q);
    p.add_scaled(0.5, r);
    q.add_scaled(0.5, pt(r));
    p = floor_projection(p, floor);
    q = floor_projection(q, floor);
    if (it % 10 == 9) {
      if (auto c = accept(psd_projection(q))) return c;
    }
  }
  return std::nullopt;
}

}  // namespace

ConeVerdict min_cone_test(const BlockElement& a, const SearchBudget& budget) {
  require_hermitian(a.flat(), "min_cone_test");
  const auto sp = eig_hermitian(a.flat());
  const double scale = 1.0 + spectral_scale(sp.eigenvalues);
  const double threshold = -budget.psd_tol * scale;
  ConeVerdict out;
  if (a.dim() == 0 || sp.eigenvalues.front() >= threshold) {
    out.status = ConeStatus::Member;
    out.margin = a.dim() == 0 ? 0.0 : sp.eigenvalues.front();
    out.certificate = PsdCertificate{out.margin};
    return out;
  }

  const std::size_t n = a.n(), m = a.m();
  ProductWitness witness;
  int restarts_used = 0;
  if (n == 1 || m == 1) {
    // Every vector is a product vector.
    const auto z = sp.eigenvectors.col(0);
    witness.x = n == 1 ? std::vector<cplx>{1.0} : z;
    witness.y = n == 1 ? z : std::vector<cplx>{1.0};
  } else {
    BlockElement neg = a;
    neg.flat() *= -1.0;
    const auto best = maximize_product(neg, budget.restarts, budget.seed);
    witness.x = best.x;
    witness.y = best.y;
    restarts_used = best.restarts_used;
  }
  witness.value = a.product_value(witness.x, witness.y).real();
  if (witness.value < threshold) {
    out.status = ConeStatus::NotMember;
    out.margin = witness.value;
    out.certificate = std::move(witness);
    return out;
  }

  const double floor = 0.25 * std::max(0.0, witness.value);
  if (auto dec = find_decomposable(a, budget.decomposable_iterations, budget.psd_tol, floor)) {
    out.status = ConeStatus::Member;
    out.margin = witness.value;
    out.certificate = std::move(*dec);
    return out;
  }
  out.status = ConeStatus::Undetermined;
  out.margin = witness.value;
  out.certificate = BudgetReport{witness.value, restarts_used, budget.decomposable_iterations, 0.0};
  return out;
}

// ---------------------------------------------------------------------------
// Separable decomposition search

namespace {

bool ppt_decides(std::size_t n, std::size_t m) { return n == 1 || m == 1 || n * m <= 6; }

std::optional<SeparableDecomposition> structural_decomposition(const BlockElement& a) {
  const std::size_t n = a.n(), m = a.m();
  const double zero = 1e-14 * (1.0 + a.flat().max_abs());
  SeparableDecomposition dec;
  if (n == 1) {
    dec.terms.push_back({ComplexMatrix::identity(1), hermitian_part(a.flat())});
    return dec;
  }
  if (m == 1) {
    dec.terms.push_back({hermitian_part(a.flat()), ComplexMatrix::identity(1)});
    return dec;
  }
  // Rank one: flat(A) = lambda u u^* with u = x (x) y exactly when the n x m
  // reshaping of u has rank one.
  const auto sp = eig_hermitian(hermitian_part(a.flat()));
  const double top = sp.eigenvalues.back();
  if (top > 0.0 && std::abs(sp.eigenvalues[sp.eigenvalues.size() - 2]) <= 1e-13 * top &&
      std::abs(sp.eigenvalues.front()) <= 1e-13 * top) {
    const auto u = sp.eigenvectors.col(a.dim() - 1);
    ComplexMatrix shaped(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < m; ++r) shaped(i, r) = u[i * m + r];
    double lx = 0.0;
    const auto x = top_eigenvector(shaped * shaped.adjoint(), lx);
    std::vector<cplx> y(m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t i = 0; i < n; ++i) y[r] += std::conj(x[i]) * shaped(i, r);
    const auto rebuilt = kron(x, y);
    double err = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) err = std::max(err, std::abs(rebuilt[k] - u[k]));
    if (err <= 1e-12) {
      auto xa = ComplexMatrix::outer(x);
      xa *= top;
      dec.terms.push_back({std::move(xa), ComplexMatrix::outer(y)});
      return dec;
    }
  }
  bool outer_diagonal = true, inner_diagonal = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) {
          if (std::abs(a.at(i, r, j, c)) <= zero) continue;
          if (i != j) outer_diagonal = false;
          if (r != c) inner_diagonal = false;
        }
  if (outer_diagonal) {
    for (std::size_t i = 0; i < n; ++i) {
      auto b = hermitian_part(a.block(i, i));
      if (b.max_abs() > zero) dec.terms.push_back({ComplexMatrix::unit(n, n, i, i), std::move(b)});
    }
    return dec;
  }
  if (inner_diagonal) {
    // A = sum_t A(t) (x) E_tt with A(t)_ij = (A_ij)_tt.
    for (std::size_t t = 0; t < m; ++t) {
      ComplexMatrix slot(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) slot(i, j) = a.at(i, t, j, t);
      slot = hermitian_part(slot);
      if (slot.max_abs() > zero) dec.terms.push_back({std::move(slot), ComplexMatrix::unit(m, m, t, t)});
    }
    return dec;
  }
  return std::nullopt;
}

struct Atom {
  std::vector<cplx> x, y, z;
  double a_value = 0.0;  // <z, A z>
};

class GilbertSearch {
 public:
  explicit GilbertSearch(const BlockElement& a) : a_(a) {}

  std::size_t size() const { return atoms_.size(); }

  void add_atom(std::vector<cplx> x, std::vector<cplx> y) {
    Atom at;
    at.z = kron(x, y);
    at.x = std::move(x);
    at.y = std::move(y);
    at.a_value = quadratic_form(a_.flat(), at.z).real();
    std::vector<double> row(atoms_.size() + 1);
    for (std::size_t l = 0; l < atoms_.size(); ++l) {
      const double g = std::norm(inner(atoms_[l].z, at.z));
      row[l] = g;
      gram_[l].push_back(g);
    }
    row.back() = 1.0;
    gram_.push_back(std::move(row));
    atoms_.push_back(std::move(at));
    weights_.push_back(0.0);
  }

  // Coordinate descent on 1/2 w^T G w - b^T w over w >= 0, b_l = <z_l, (A - delta I) z_l>.
  void reweight(double delta, int sweeps) {
    const std::size_t k = atoms_.size();
    std::vector<double> gw(k, 0.0);
    for (std::size_t l = 0; l < k; ++l)
      if (weights_[l] != 0.0)
        for (std::size_t j = 0; j < k; ++j) gw[j] += gram_[j][l] * weights_[l];
    for (int s = 0; s < sweeps; ++s) {
      double change = 0.0;
      for (std::size_t l = 0; l < k; ++l) {
        const double b = atoms_[l].a_value - delta;
        const double nw = std::max(0.0, weights_[l] + (b - gw[l]));
        const double dl = nw - weights_[l];
        if (dl == 0.0) continue;
        weights_[l] = nw;
        for (std::size_t j = 0; j < k; ++j) gw[j] += gram_[j][l] * dl;
        change = std::max(change, std::abs(dl));
      }
      if (change <= 1e-17) break;
    }
  }

  void prune() {
    std::vector<std::size_t> kept;
    for (std::size_t l = 0; l < atoms_.size(); ++l)
      if (weights_[l] > 0.0) kept.push_back(l);
    if (kept.size() == atoms_.size()) return;
    std::vector<Atom> atoms;
    std::vector<double> weights;
    std::vector<std::vector<double>> gram;
    for (std::size_t l : kept) {
      atoms.push_back(std::move(atoms_[l]));
      weights.push_back(weights_[l]);
      std::vector<double> row;
      for (std::size_t j : kept) row.push_back(gram_[l][j]);
      gram.push_back(std::move(row));
    }
    atoms_ = std::move(atoms);
    weights_ = std::move(weights);
    gram_ = std::move(gram);
  }

  ComplexMatrix current() const {
    ComplexMatrix s(a_.dim(), a_.dim());
    for (std::size_t l = 0; l < atoms_.size(); ++l) s.add_scaled(weights_[l], ComplexMatrix::outer(atoms_[l].z));
    return s;
  }

  std::vector<TensorTerm> atom_terms() const {
    std::vector<TensorTerm> out;
    for (std::size_t l = 0; l < atoms_.size(); ++l) {
      if (weights_[l] <= 0.0) continue;
      auto xa = ComplexMatrix::outer(atoms_[l].x);
      xa *= weights_[l];
      out.push_back({std::move(xa), ComplexMatrix::outer(atoms_[l].y)});
    }
    return out;
  }

  // Block coordinate descent on (w_l, x_l, y_l) for ||A - sum w_l z_l z_l^*||:
  // each atom is replaced by the best product term for the residual it leaves.
  void refine(int sweeps) {
    ComplexMatrix d = a_.flat() - current();
    const std::size_t n = a_.n(), m = a_.m();
    for (int s = 0; s < sweeps; ++s) {
      for (std::size_t l = 0; l < atoms_.size(); ++l) {
        Atom& at = atoms_[l];
        if (weights_[l] > 0.0) d.add_scaled(weights_[l], ComplexMatrix::outer(at.z));
        const BlockElement r(n, m, d);
        double v = 0.0;
        for (int k = 0; k < 3; ++k) {
          at.y = top_eigenvector(r.compress_outer(at.x), v);
          at.x = top_eigenvector(r.compress_inner(at.y), v);
        }
        at.z = kron(at.x, at.y);
        weights_[l] = std::max(0.0, r.product_value(at.x, at.y).real());
        if (weights_[l] > 0.0) d.add_scaled(-weights_[l], ComplexMatrix::outer(at.z));
      }
    }
    for (std::size_t l = 0; l < atoms_.size(); ++l) {
      atoms_[l].a_value = quadratic_form(a_.flat(), atoms_[l].z).real();
      for (std::size_t k = 0; k < atoms_.size(); ++k) gram_[l][k] = std::norm(inner(atoms_[l].z, atoms_[k].z));
    }
    prune();
  }

 private:
  const BlockElement& a_;
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> gram_;
};

// Absorbs the remainder R = A - delta I - S into separable terms:
// a (x) w with w PSD equals (a + rI) (x) w - r I (x) w, r = max(0, -lambda_min(a)),
// and the accumulated r w is paid for by I_n (x) (delta I_m - sum r w).
std::optional<SeparableDecomposition> polish(const BlockElement& a, const GilbertSearch& search, double delta) {
  const std::size_t n = a.n(), m = a.m();
  ComplexMatrix r = a.flat() - search.current();
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) -= delta;
  r = hermitian_part(r);
  const auto pieces = hermitian_tensor_decompose(BlockElement(n, m, r));

  SeparableDecomposition dec;
  dec.terms = search.atom_terms();
  ComplexMatrix correction(m, m);
  const auto identity_n = ComplexMatrix::identity(n);
  for (const auto& piece : pieces) {
    auto [pos, neg] = positive_negative_parts(piece.v);
    for (int sign : {1, -1}) {
      ComplexMatrix& w = sign > 0 ? pos : neg;
      if (w.max_abs() == 0.0) continue;
      ComplexMatrix factor = piece.a;
      factor *= static_cast<double>(sign);
      const double lmin = eigvalsh(factor).front();
      const double shift = std::max(0.0, -lmin);
      factor.add_scaled(shift, identity_n);
      correction.add_scaled(shift, w);
      dec.terms.push_back({std::move(factor), w});
    }
  }
  ComplexMatrix slack = ComplexMatrix::identity(m);
  slack *= delta;
  slack -= correction;
  slack = hermitian_part(slack);
  const auto ev = eigvalsh(slack);
  if (ev.front() < 0.0) return std::nullopt;
  dec.terms.push_back({identity_n, std::move(slack)});
  return dec;
}

// Levenberg-Marquardt on the factors of A = sum_l z_l z_l^*, z_l = u_l (x) y_l.
// Every iterate is a sum of PSD product terms, so positivity never breaks.
std::optional<SeparableDecomposition> factor_polish(const BlockElement& a, const std::vector<TensorTerm>& terms,
                                                    int iterations) {
  const std::size_t n = a.n(), m = a.m(), d = a.dim();
  std::vector<std::vector<cplx>> us, ys;
  for (const auto& t : terms) {
    double va = 0.0, vy = 0.0;
    auto u = top_eigenvector(t.a, va);
    auto y = top_eigenvector(t.v, vy);
    if (va <= 0.0 || vy <= 0.0) continue;
    const double s = std::sqrt(va * vy);
    for (auto& e : u) e *= s;
    us.push_back(std::move(u));
    ys.push_back(std::move(y));
  }
  const std::size_t k = us.size();
  if (k == 0) return std::nullopt;
  const std::size_t per = 2 * (n + m);
  const std::size_t params = k * per;
  const std::size_t rows = d * d;
  const double rt2 = std::sqrt(2.0);

  // Real coordinates of dz z^* + z dz^* (or of a hermitian matrix when dz is empty).
  auto sym_coords = [&](const std::vector<cplx>& dz, const std::vector<cplx>& z, std::vector<double>& out) {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < d; ++p) {
      out[idx++] = 2.0 * (dz[p] * std::conj(z[p])).real();
      for (std::size_t q = p + 1; q < d; ++q) {
        const cplx h = dz[p] * std::conj(z[q]) + z[p] * std::conj(dz[q]);
        out[idx++] = rt2 * h.real();
        out[idx++] = rt2 * h.imag();
      }
    }
  };
  auto residual = [&](const std::vector<std::vector<cplx>>& uu, const std::vector<std::vector<cplx>>& yy) {
    ComplexMatrix r = hermitian_part(a.flat());
    for (std::size_t l = 0; l < k; ++l) r.add_scaled(-1.0, ComplexMatrix::outer(kron(uu[l], yy[l])));
    std::vector<double> out(rows);
    std::size_t idx = 0;
    for (std::size_t p = 0; p < d; ++p) {
      out[idx++] = r(p, p).real();
      for (std::size_t q = p + 1; q < d; ++q) {
        out[idx++] = rt2 * r(p, q).real();
        out[idx++] = rt2 * r(p, q).imag();
      }
    }
    return out;
  };
  auto sq = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  };

  const double norm_a2 = std::pow(a.flat().frobenius_norm(), 2);
  auto f = residual(us, ys);
  double cost = sq(f);
  double mu = 1e-6 * norm_a2;
  std::vector<double> col(rows);
  lp::Mat jac(params, lp::Vec(rows));
  for (int it = 0; it < iterations && cost > 1e-28 * norm_a2; ++it) {
    for (std::size_t l = 0; l < k; ++l) {
      const auto z = kron(us[l], ys[l]);
      std::vector<cplx> dz(d);
      for (std::size_t c = 0; c < per; ++c) {
        std::fill(dz.begin(), dz.end(), cplx{});
        const cplx unit = (c / (c < 2 * n ? n : m)) % 2 == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
        if (c < 2 * n) {
          const std::size_t i = c % n;
          for (std::size_t b = 0; b < m; ++b) dz[i * m + b] = unit * ys[l][b];
        } else {
          const std::size_t b = (c - 2 * n) % m;
          for (std::size_t i = 0; i < n; ++i) dz[i * m + b] = unit * us[l][i];
        }
        sym_coords(dz, z, col);
        jac[l * per + c] = col;
      }
    }
    // Dual normal equations: delta = J^t (J J^t + mu I)^{-1} f.
    lp::Mat jjt(rows, lp::Vec(rows, 0.0));
    for (std::size_t pcol = 0; pcol < params; ++pcol) {
      const auto& jc = jac[pcol];
      for (std::size_t i = 0; i < rows; ++i) {
        const double ji = jc[i];
        if (ji == 0.0) continue;
        for (std::size_t j = 0; j <= i; ++j) jjt[i][j] += ji * jc[j];
      }
    }
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < i; ++j) jjt[j][i] = jjt[i][j];
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      lp::Mat sys = jjt;
      for (std::size_t i = 0; i < rows; ++i) sys[i][i] += mu;
      const auto w = lp::solve_spd(std::move(sys), f);
      if (w.empty()) {
        mu *= 10.0;
        continue;
      }
      auto nu = us;
      auto ny = ys;
      for (std::size_t l = 0; l < k; ++l)
        for (std::size_t c = 0; c < per; ++c) {
          double step = 0.0;
          for (std::size_t i = 0; i < rows; ++i) step += jac[l * per + c][i] * w[i];
          const cplx unit = (c / (c < 2 * n ? n : m)) % 2 == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
          if (c < 2 * n)
            nu[l][c % n] += step * unit;
          else
            ny[l][(c - 2 * n) % m] += step * unit;
        }
      auto nf = residual(nu, ny);
      const double ncost = sq(nf);
      if (ncost < cost) {
        us = std::move(nu);
        ys = std::move(ny);
        f = std::move(nf);
        cost = ncost;
        mu = std::max(mu / 5.0, 1e-30 * norm_a2);
        improved = true;
      } else {
        mu *= 8.0;
      }
    }
    if (!improved) break;
  }
  if (cost > 1e-24 * norm_a2) return std::nullopt;
  SeparableDecomposition dec;
  for (std::size_t l = 0; l < k; ++l) {
    const double ny = norm(ys[l]);
    if (ny == 0.0) continue;
    auto u = us[l];
    for (auto& e : u) e *= ny;
    auto y = ys[l];
    for (auto& e : y) e /= ny;
    dec.terms.push_back({ComplexMatrix::outer(u), ComplexMatrix::outer(y)});
  }
  return dec;
}

// Conditional-gradient search on a PSD element; residual relative to a.
DecompositionResult search_decomposition(const BlockElement& a, const SearchBudget& budget) {
  const std::size_t n = a.n(), m = a.m();
  const auto ev = eigvalsh(a.flat());
  const double scale = spectral_scale(ev);
  DecompositionResult out;
  auto finish = [&](SeparableDecomposition dec) {
    out.found = true;
    out.residual = relative_frobenius_error(dec.resum(n, m).flat(), a.flat());
    out.decomposition = std::move(dec);
    return out;
  };
  const double norm_a = a.flat().frobenius_norm();
  const double lmin = std::max(0.0, ev.front());
  std::vector<double> deltas;
  if (lmin > 1e-12 * scale) {
    for (double f : {0.5, 0.125, 0.03, 0.005, 1e-3}) deltas.push_back(f * lmin);
  }
  deltas.push_back(0.0);

  GilbertSearch search(a);
  std::size_t stage = 0;
  double delta = deltas[0];
  double best_dist2 = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  int refinements = 0;
  int it = 0;
  double dist2 = norm_a * norm_a;
  std::vector<std::vector<cplx>> warm;
  for (; it < budget.iterations; ++it) {
    ComplexMatrix d = a.flat() - search.current();
    for (std::size_t i = 0; i < d.rows(); ++i) d(i, i) -= delta;
    d = hermitian_part(d);
    dist2 = std::pow(d.frobenius_norm(), 2);

    if (delta > 0.0 && (it % 4 == 3) && std::sqrt(dist2) <= delta) {
      if (auto dec = polish(a, search, delta)) {
        out.iterations = it;
        return finish(std::move(*dec));
      }
    }
    if (delta == 0.0 && dist2 <= budget.tol * norm_a * norm_a) break;

    const BlockElement dir(n, m, d);
    // Basis starts alone can sit on saddle points of symmetric residuals.
    const int restarts = static_cast<int>(n + m) + budget.oracle_restarts;
    const auto best = maximize_product(dir, restarts, split_seed(budget.seed, it), warm);
    const double gap = best.value;

    // For a target inside the cone, ||D||^2 <= tr(target) * max_p <p, D>.
    const double trace_target = std::max(0.0, a.flat().trace().real() - delta * static_cast<double>(a.dim()));
    bool stalled = gap <= 1e-15 * norm_a || dist2 > 4.0 * trace_target * gap;
    if (dist2 < best_dist2 * (1.0 - 1e-3)) {
      best_dist2 = dist2;
      since_improvement = 0;
    } else if (++since_improvement > 60) {
      stalled = true;
    }
    if (stalled && delta == 0.0 && refinements % 4 == 0) {
      if (auto dec = factor_polish(a, search.atom_terms(), 300)) {
        out.iterations = it;
        return finish(std::move(*dec));
      }
    }
    if (stalled && delta == 0.0 && refinements < 20) {
      // Boundary targets: Gilbert steps slow down, local refinement does not.
      ++refinements;
      search.refine(10);
      search.reweight(0.0, 50);
      search.prune();
      best_dist2 = std::numeric_limits<double>::infinity();
      since_improvement = 0;
      continue;
    }
    if (stalled) {
      if (stage + 1 >= deltas.size()) break;
      delta = deltas[++stage];
      best_dist2 = std::numeric_limits<double>::infinity();
      since_improvement = 0;
      search.reweight(delta, 50);
      continue;
    }
    warm.assign(1, best.x);
    search.add_atom(best.x, best.y);
    search.reweight(delta, 30);
    search.prune();
  }
  out.iterations = it;
  SeparableDecomposition dec;
  dec.terms = search.atom_terms();
  out.residual = relative_frobenius_error(dec.resum(n, m).flat(), a.flat());
  if (out.residual > 1e-12 && !dec.terms.empty()) {
    if (auto exact = factor_polish(a, dec.terms, 100)) {
      out.iterations = it;
      return finish(std::move(*exact));
    }
  }
  out.decomposition = std::move(dec);
  out.found = out.residual * out.residual <= budget.tol;
  return out;
}

struct LocalFilter {
  ComplexMatrix g1, g2;  // A = (g1 (x) g2) filtered (g1 (x) g2)^*
  BlockElement filtered;
};

ComplexMatrix trace_inner(const BlockElement& a) {
  ComplexMatrix out(a.n(), a.n());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j)
      for (std::size_t r = 0; r < a.m(); ++r) out(i, j) += a.at(i, r, j, r);
  return hermitian_part(out);
}

ComplexMatrix trace_outer(const BlockElement& a) {
  ComplexMatrix out(a.m(), a.m());
  for (std::size_t i = 0; i < a.n(); ++i) out += a.block(i, i);
  return hermitian_part(out);
}

// Returns (f, g) with f = D^{-1/2} U^* and g = U D^{1/2} on the support of h,
// normalized so that f h f^* = (tr h / rank) I.
std::pair<ComplexMatrix, ComplexMatrix> whitening(const ComplexMatrix& h) {
  const auto sp = eig_hermitian(h);
  const double top = sp.eigenvalues.back();
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k)
    if (sp.eigenvalues[k] > 1e-12 * top) keep.push_back(k);
  double mean = 0.0;
  for (std::size_t k : keep) mean += sp.eigenvalues[k];
  mean /= static_cast<double>(keep.size());
  ComplexMatrix f(keep.size(), h.rows()), g(h.rows(), keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double lam = sp.eigenvalues[keep[c]] / mean;
    for (std::size_t i = 0; i < h.rows(); ++i) {
      const cplx u = sp.eigenvectors(i, keep[c]);
      f(c, i) = std::conj(u) / std::sqrt(lam);
      g(i, c) = u * std::sqrt(lam);
    }
  }
  return {f, g};
}

// Local congruences preserve separability; bringing both marginals close to
// multiples of the identity (and dropping their kernels) makes the identity
// shift used by the search meaningful for anisotropic inputs.
LocalFilter local_filter(const BlockElement& a) {
  LocalFilter out{ComplexMatrix::identity(a.n()), ComplexMatrix::identity(a.m()), a};
  for (int it = 0; it < 12; ++it) {
    const auto [f1, g1] = whitening(trace_inner(out.filtered));
    const auto [f2, g2] = whitening(trace_outer(out.filtered));
    const auto f = kron(f1, f2);
    out.filtered = BlockElement(f1.rows(), f2.rows(), hermitian_part(f * out.filtered.flat() * f.adjoint()));
    out.g1 = out.g1 * g1;
    out.g2 = out.g2 * g2;
    const double dev = std::max(max_abs_diff(g1 * f1, ComplexMatrix::identity(g1.rows())),
                                max_abs_diff(g2 * f2, ComplexMatrix::identity(g2.rows())));
    if (dev <= 1e-3) break;
  }
  return out;
}

}  // namespace

DecompositionResult decompose_separable(const BlockElement& a, const SearchBudget& budget) {
  require_hermitian(a.flat(), "decompose_separable");
  const auto ev = eigvalsh(a.flat());
  const double scale = spectral_scale(ev);
  if (!ev.empty() && ev.front() < -budget.psd_tol * (1.0 + scale)) {
    throw Error(ErrorCode::NotPSD, "decompose_separable: flat(A) has eigenvalue " + std::to_string(ev.front()));
  }
  const std::size_t n = a.n(), m = a.m();
  DecompositionResult out;
  auto finish = [&](SeparableDecomposition dec) {
    out.found = true;
    out.residual = relative_frobenius_error(dec.resum(n, m).flat(), a.flat());
    out.decomposition = std::move(dec);
    return out;
  };
  if (a.dim() == 0 || a.flat().max_abs() == 0.0) return finish({});
  if (auto dec = structural_decomposition(a)) return finish(std::move(*dec));

  const auto filter = local_filter(a);
  DecompositionResult inner;
  if (auto dec = structural_decomposition(filter.filtered)) {
    inner.found = true;
    inner.decomposition = std::move(*dec);
  } else {
    inner = search_decomposition(filter.filtered, budget);
  }
  for (auto& t : inner.decomposition.terms) {
    t.a = hermitian_part(filter.g1 * t.a * filter.g1.adjoint());
    t.v = hermitian_part(filter.g2 * t.v * filter.g2.adjoint());
  }
  out.iterations = inner.iterations;
  out.decomposition = std::move(inner.decomposition);
  out.residual = relative_frobenius_error(out.decomposition.resum(n, m).flat(), a.flat());
  out.found = inner.found && out.residual * out.residual <= budget.tol;
  return out;
}

// ---------------------------------------------------------------------------
// Maximal cone

ConeVerdict max_cone_test(const BlockElement& a, const SearchBudget& budget) {
  require_hermitian(a.flat(), "max_cone_test");
  const std::size_t n = a.n(), m = a.m();
  ConeVerdict out;
  out.ppt_sufficient = ppt_decides(n, m);
  if (a.dim() == 0) {
    out.status = ConeStatus::Member;
    out.certificate = SeparableDecomposition{};
    return out;
  }

  const auto sp = eig_hermitian(a.flat());
  const double scale = 1.0 + spectral_scale(sp.eigenvalues);
  if (sp.eigenvalues.front() < -budget.psd_tol * scale) {
    out.status = ConeStatus::NotMember;
    out.margin = sp.eigenvalues.front();
    out.certificate = WitnessFunctional{sp.eigenvectors.col(0), false, sp.eigenvalues.front()};
    return out;
  }
  const auto pt = partial_transpose(a);
  const auto spt = eig_hermitian(pt.flat());
  if (spt.eigenvalues.front() < -budget.psd_tol * scale) {
    out.status = ConeStatus::NotMember;
    out.margin = spt.eigenvalues.front();
    out.certificate = PptViolation{spt.eigenvalues.front(), spt.eigenvectors.col(0)};
    return out;
  }
  out.margin = std::min(sp.eigenvalues.front(), spt.eigenvalues.front());

  const SufficiencyTag tag{"ppt-sufficiency",
                           "PSD and PPT imply separability for 1xk, 2x2 and 2x3 blocks "
                           "(external fact, not a construction)"};
  if (budget.prefer_sufficiency && out.ppt_sufficient) {
    out.status = ConeStatus::Member;
    out.certificate = tag;
    return out;
  }

  auto search = decompose_separable(a, budget);
  if (search.found && search.residual <= 1e-8) {
    out.status = ConeStatus::Member;
    out.certificate = std::move(search.decomposition);
    return out;
  }
  if (out.ppt_sufficient) {
    out.status = ConeStatus::Member;
    out.certificate = tag;
    return out;
  }
  out.status = ConeStatus::Undetermined;
  out.certificate = BudgetReport{0.0, budget.oracle_restarts, search.iterations, search.residual};
  return out;
}

// ---------------------------------------------------------------------------
// Sampling and alternative forms

DmaxSample sample_dmax(std::size_t n, std::size_t m, std::size_t terms, std::uint64_t seed) {
  if (terms == 0) throw Error(ErrorCode::InvalidInput, "sample_dmax needs at least one term");
  Rng rng(seed, 0x5eed);
  DmaxSample out;
  for (std::size_t l = 0; l < terms; ++l) {
    auto a = rng.wishart(n, n);
    a *= rng.uniform(0.2, 1.0);
    out.decomposition.terms.push_back({std::move(a), rng.wishart(m, m)});
  }
  out.element = out.decomposition.resum(n, m);
  out.element.flat() = hermitian_part(out.element.flat());
  return out;
}

BlockElement sample_decomposable(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed, 0xdec0);
  auto p = rng.wishart(n * m, n * m);
  p *= rng.uniform(0.0, 0.5);
  const auto z = rng.unit_vector(n * m);
  BlockElement out = partial_transpose(BlockElement(n, m, ComplexMatrix::outer(z)));
  out.flat() += p;
  out.flat() = hermitian_part(out.flat());
  return out;
}

AlphaDiagForm to_alpha_diag(const SeparableDecomposition& dec, std::size_t n) {
  std::vector<std::vector<cplx>> cols;
  AlphaDiagForm out;
  for (const auto& t : dec.terms) {
    const auto sp = eig_hermitian(hermitian_part(t.a));
    const double top = sp.eigenvalues.empty() ? 0.0 : sp.eigenvalues.back();
    for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
      const double lam = sp.eigenvalues[k];
      if (lam <= 1e-14 * top) continue;
      auto c = sp.eigenvectors.col(k);
      for (auto& z : c) z *= std::sqrt(lam);
      cols.push_back(std::move(c));
      out.v.push_back(t.v);
    }
  }
  out.alpha = ComplexMatrix(n, cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) out.alpha(i, k) = cols[k][i];
  return out;
}

BlockElement from_alpha_diag(const AlphaDiagForm& form) {
  const std::size_t n = form.alpha.rows();
  const std::size_t m = form.v.empty() ? 0 : form.v.front().rows();
  BlockElement out(n, m);
  // (alpha diag(v) alpha^*)_ij = sum_k alpha_ik conj(alpha_jk) v_k
  for (std::size_t k = 0; k < form.v.size(); ++k) {
    const auto col = form.alpha.col(k);
    out.flat() += kron(ComplexMatrix::outer(col), form.v[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

CertificateCheck check(bool ok, double deviation, std::string detail) {
  return {ok, deviation, std::move(detail)};
}

double unit_deviation(std::span<const cplx> v) { return std::abs(norm(v) - 1.0); }

}  // namespace

CertificateCheck verify_min_verdict(const BlockElement& a, const ConeVerdict& v, double tol) {
  const auto ev = eigvalsh(a.flat());
  const double scale = 1.0 + spectral_scale(ev);
  if (v.status == ConeStatus::Undetermined) return check(true, 0.0, "undetermined: nothing to verify");
  if (v.status == ConeStatus::Member) {
    if (const auto* c = std::get_if<PsdCertificate>(&v.certificate)) {
      const double lmin = ev.empty() ? 0.0 : ev.front();
      return check(lmin >= -tol * scale, std::abs(lmin - c->min_eigenvalue), "flat PSD");
    }
    if (const auto* c = std::get_if<DecomposableCertificate>(&v.certificate)) {
      const auto rebuilt = c->p + partial_transpose(BlockElement(a.n(), a.m(), c->q)).flat();
      const double dev = relative_frobenius_error(rebuilt, a.flat());
      const bool ok = is_psd(c->p, tol).psd && is_psd(c->q, tol).psd && dev <= 1e-8;
      return check(ok, dev, "P + PT(Q) with P, Q PSD");
    }
    return check(false, 0.0, "member verdict without a min-cone certificate");
  }
  if (const auto* w = std::get_if<ProductWitness>(&v.certificate)) {
    const double value = a.product_value(w->x, w->y).real();
    const double dev = std::abs(value - w->value);
    const bool ok = unit_deviation(w->x) <= 1e-10 && unit_deviation(w->y) <= 1e-10 && dev <= 1e-10 * scale &&
                    value < -tol * scale;
    return check(ok, dev, "product vector with negative value");
  }
  return check(false, 0.0, "non-member verdict without a product witness");
}

CertificateCheck verify_max_verdict(const BlockElement& a, const ConeVerdict& v, double tol) {
  const std::size_t n = a.n(), m = a.m();
  if (v.status == ConeStatus::Undetermined) return check(true, 0.0, "undetermined: nothing to verify");
  const auto ev = eigvalsh(a.flat());
  const double scale = 1.0 + spectral_scale(ev);
  if (v.status == ConeStatus::Member) {
    if (const auto* dec = std::get_if<SeparableDecomposition>(&v.certificate)) {
      bool ok = true;
      for (const auto& t : dec->terms) ok = ok && is_psd(t.a, tol).psd && is_psd(t.v, tol).psd;
      const double dev = relative_frobenius_error(dec->resum(n, m).flat(), a.flat());
      return check(ok && dev <= 1e-8, dev, "separable terms re-sum to the input");
    }
    if (std::get_if<SufficiencyTag>(&v.certificate)) {
      const bool psd = is_psd(a.flat(), tol).psd;
      const bool ppt = is_psd(partial_transpose(a).flat(), tol).psd;
      return check(psd && ppt && ppt_decides(n, m), 0.0, "PSD and PPT in a dimension where PPT decides");
    }
    return check(false, 0.0, "member verdict without a max-cone certificate");
  }
  if (const auto* p = std::get_if<PptViolation>(&v.certificate)) {
    const double nv = norm(p->eigenvector);
    const double value = quadratic_form(partial_transpose(a).flat(), p->eigenvector).real() / (nv * nv);
    const double dev = std::abs(value - p->eigenvalue);
    return check(dev <= 1e-10 * scale && value < -tol * scale, dev, "negative eigenvalue of the partial transpose");
  }
  if (const auto* w = std::get_if<WitnessFunctional>(&v.certificate)) {
    const auto& target = w->partial_transposed ? partial_transpose(a).flat() : a.flat();
    const double value = quadratic_form(target, w->vector).real();
    const double dev = std::abs(value - w->value);
    return check(dev <= 1e-10 * scale && value < -tol * scale, dev, "block-positive functional with negative pairing");
  }
  return check(false, 0.0, "non-member verdict without a max-cone certificate");
}

}  // namespace omaxcones
