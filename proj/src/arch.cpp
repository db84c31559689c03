#include "omaxcones/arch.hpp"

#include <algorithm>
#include <cmath>

#include "omaxcones/errors.hpp"
#include "omaxcones/lp.hpp"
#include "omaxcones/random.hpp"

namespace omaxcones {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

RealVector axpy(std::span<const double> x, double r, std::span<const double> e) {
  RealVector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += r * e[i];
  return out;
}

RealVector gaussian(Rng& rng, std::size_t n) {
  RealVector v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Gram-Schmidt against an orthonormal list; returns false when nothing is left.
bool orthonormalize_into(std::vector<RealVector>& basis, RealVector v, double drop = 1e-8) {
  const double start = std::sqrt(dot(v, v));
  if (start == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      const double c = dot(b, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  const double nv = std::sqrt(dot(v, v));
  if (nv <= drop * start) return false;
  for (auto& x : v) x /= nv;
  basis.push_back(std::move(v));
  return true;
}

}  // namespace

RealVector hermitian_coords(const ComplexMatrix& h) {
  const std::size_t n = h.rows();
  RealVector c;
  c.reserve(n * n);
  const double rt2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) c.push_back(h(i, i).real());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      c.push_back(rt2 * h(i, j).real());
      c.push_back(rt2 * h(i, j).imag());
    }
  return c;
}

ComplexMatrix from_hermitian_coords(std::span<const double> c, std::size_t n) {
  if (c.size() != n * n) throw Error(ErrorCode::ShapeMismatch, "hermitian coordinates need n^2 entries");
  ComplexMatrix h(n, n);
  const double inv = 1.0 / std::sqrt(2.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) h(i, i) = c[k++];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx z(c[k] * inv, c[k + 1] * inv);
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

std::vector<std::vector<cplx>> spanning_pure_states(std::size_t n) {
  std::vector<std::vector<cplx>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<cplx> e(n);
    e[i] = 1.0;
    out.push_back(std::move(e));
  }
  const double inv = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (cplx phase : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
        std::vector<cplx> v(n);
        v[i] = inv;
        v[j] = inv * phase;
        out.push_back(std::move(v));
      }
  return out;
}

GeneratedCone lexicographic_cone() {
  GeneratedCone c;
  c.dim = 2;
  c.oracle_name = "lexicographic2";
  c.oracle = [](std::span<const double> x) { return x[1] > 0.0 || (x[1] == 0.0 && x[0] >= 0.0); };
  c.unit = {0.0, 1.0};
  return c;
}

GeneratedCone psd_cone(std::size_t n, bool as_oracle) {
  GeneratedCone c;
  c.dim = n * n;
  c.unit = hermitian_coords(ComplexMatrix::identity(n));
  c.oracle_name = "psd" + std::to_string(n);
  if (as_oracle) {
    c.oracle = [n](std::span<const double> x) { return is_psd(from_hermitian_coords(x, n)).psd; };
    return c;
  }
  // Pure states: the spanning set plus a reproducible random sample.
  for (const auto& p : spanning_pure_states(n)) c.generators.push_back(hermitian_coords(ComplexMatrix::outer(p)));
  Rng rng(0x9d5, n);
  for (std::size_t k = 0; k < 256 * n * n; ++k) c.generators.push_back(hermitian_coords(ComplexMatrix::outer(rng.unit_vector(n))));
  return c;
}

GeneratedCone builtin_cone(const std::string& name) {
  if (name == "lexicographic2") return lexicographic_cone();
  if (name.rfind("psd", 0) == 0 && name.size() > 3) {
    const std::string digits = name.substr(3);
    if (std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const auto n = static_cast<std::size_t>(std::stoul(digits));
      if (n >= 1 && n <= 6) return psd_cone(n, true);
    }
  }
  throw Error(ErrorCode::InvalidInput, "unknown builtin cone '" + name + "'");
}

bool cone_contains(const GeneratedCone& c, std::span<const double> x, double tol) {
  if (c.has_oracle()) return c.oracle(x);
  const double slack = tol * (1.0 + max_abs(x));
  const std::size_t k = c.generators.size();
  if (k == 0) return max_abs(x) <= slack;
  lp::Mat a;
  lp::Vec b;
  for (std::size_t i = 0; i < c.dim; ++i) {
    lp::Vec row(k), neg(k);
    for (std::size_t l = 0; l < k; ++l) {
      row[l] = c.generators[l][i];
      neg[l] = -row[l];
    }
    a.push_back(std::move(row));
    b.push_back(x[i] + slack);
    a.push_back(std::move(neg));
    b.push_back(-x[i] + slack);
  }
  return lp::simplex(a, b, lp::Vec(k, 0.0)).status == lp::LpStatus::Optimal;
}

std::vector<RealVector> working_generators(const GeneratedCone& c, std::uint64_t seed) {
  if (!c.has_oracle()) return c.generators;
  std::vector<RealVector> directions;
  for (std::size_t i = 0; i < c.dim; ++i)
    for (double s : {1.0, -1.0}) {
      RealVector u(c.dim, 0.0);
      u[i] = s;
      directions.push_back(std::move(u));
    }
  Rng rng(seed, 0xb0d);
  for (std::size_t k = 0; k < 16 * c.dim; ++k) directions.push_back(gaussian(rng, c.dim));

  // Boundary points alone can miss the interior (the lexicographic cone's
  // boundary is a line), so the unit goes in first.
  std::vector<RealVector> out;
  if (c.oracle(c.unit)) out.push_back(c.unit);
  for (const auto& u : directions) {
    auto inside = [&](double r) { return c.oracle(axpy(u, r, c.unit)); };
    double hi = 1.0;
    int guard = 0;
    while (!inside(hi) && guard++ < 60) hi *= 2.0;
    if (!inside(hi)) continue;
    double lo = hi - 1.0;
    guard = 0;
    while (inside(lo) && guard++ < 60) lo = hi - 2.0 * (hi - lo);
    if (inside(lo)) continue;  // a whole line along e: not a proper cone
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (inside(mid) ? hi : lo) = mid;
    }
    auto g = axpy(u, hi, c.unit);
    if (max_abs(g) > 1e-12) out.push_back(std::move(g));
  }
  return out;
}

bool is_pointed(const GeneratedCone& c) {
  const auto gens = working_generators(c, 0);
  if (c.has_oracle()) {
    for (const auto& g : gens) {
      if (max_abs(g) == 0.0) continue;
      RealVector neg(g);
      for (auto& v : neg) v = -v;
      if (c.oracle(neg)) return false;
    }
    return true;
  }
  // Feasibility of lambda >= 0, sum lambda = 1, G lambda = 0 on normalized generators.
  const std::size_t k = gens.size();
  if (k == 0) return true;
  lp::Mat a;
  lp::Vec b;
  std::vector<RealVector> unit_gens;
  for (const auto& g : gens) {
    const double ng = std::sqrt(dot(g, g));
    RealVector u(g);
    if (ng > 0.0)
      for (auto& v : u) v /= ng;
    unit_gens.push_back(std::move(u));
  }
  for (std::size_t i = 0; i < c.dim; ++i) {
    lp::Vec row(k), neg(k);
    for (std::size_t l = 0; l < k; ++l) {
      row[l] = unit_gens[l][i];
      neg[l] = -row[l];
    }
    a.push_back(std::move(row));
    b.push_back(1e-9);
    a.push_back(std::move(neg));
    b.push_back(1e-9);
  }
  a.push_back(lp::Vec(k, 1.0));
  b.push_back(1.0);
  a.push_back(lp::Vec(k, -1.0));
  b.push_back(-1.0);
  return lp::simplex(a, b, lp::Vec(k, 0.0)).status != lp::LpStatus::Optimal;
}

bool order_unit_check(const GeneratedCone& c, int samples, std::uint64_t seed) {
  Rng rng(seed, 0x0e);
  for (int s = 0; s < samples; ++s) {
    const auto v = gaussian(rng, c.dim);
    bool found = false;
    for (int k = 0; k <= 40 && !found; ++k) {
      RealVector x(c.dim);
      const double r = std::ldexp(1.0, k);
      for (std::size_t i = 0; i < c.dim; ++i) x[i] = r * c.unit[i] - v[i];
      found = cone_contains(c, x);
    }
    if (!found) return false;
  }
  return true;
}

std::vector<RealVector> compute_states(const GeneratedCone& c, std::size_t samples, std::uint64_t seed) {
  if (c.unit.size() != c.dim) throw Error(ErrorCode::ShapeMismatch, "unit has the wrong dimension");
  if (samples == 0) samples = 64 * c.dim;
  const auto gens = working_generators(c, seed);
  const std::size_t d = c.dim;
  // s = p - q with p, q >= 0.
  lp::Mat a;
  lp::Vec b;
  auto split_row = [d](std::span<const double> w, double sign) {
    lp::Vec row(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
      row[i] = sign * w[i];
      row[d + i] = -sign * w[i];
    }
    return row;
  };
  a.push_back(split_row(c.unit, 1.0));
  b.push_back(1.0);
  a.push_back(split_row(c.unit, -1.0));
  b.push_back(-1.0);
  for (const auto& g : gens) {
    a.push_back(split_row(g, -1.0));
    b.push_back(0.0);
  }
  std::vector<RealVector> states;
  bool feasible = false;
  for (std::size_t k = 0; k < samples; ++k) {
    Rng rng(seed, 0x5a7e + k);
    const auto dir = gaussian(rng, d);
    lp::Vec obj(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
      obj[i] = dir[i];
      obj[d + i] = -dir[i];
    }
    const auto res = lp::simplex(a, b, obj);
    if (res.status == lp::LpStatus::Infeasible) break;
    feasible = true;
    if (res.status != lp::LpStatus::Optimal) continue;
    RealVector s(d);
    for (std::size_t i = 0; i < d; ++i) s[i] = res.x[i] - res.x[d + i];
    const bool seen = std::any_of(states.begin(), states.end(), [&](const RealVector& t) {
      double diff = 0.0;
      for (std::size_t i = 0; i < d; ++i) diff = std::max(diff, std::abs(t[i] - s[i]));
      return diff <= 1e-9;
    });
    if (!seen) states.push_back(std::move(s));
  }
  if (!feasible) throw Error(ErrorCode::EmptyStateSpace, "no functional with s(e) = 1 is positive on the cone");
  return states;
}

std::vector<RealVector> null_space(const std::vector<RealVector>& rows, std::size_t dim, double rel_tol) {
  ComplexMatrix gram(dim, dim);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) gram(i, j) += r[i] * r[j];
  std::vector<RealVector> basis;
  if (dim == 0) return basis;
  const auto sp = eig_hermitian(gram);
  const double top = std::max(0.0, sp.eigenvalues.back());
  // Eigenvectors of a real symmetric matrix may carry complex phases; their
  // real and imaginary parts span the same real eigenspace.
  std::size_t count = 0;
  for (std::size_t k = 0; k < dim; ++k) {
    if (sp.eigenvalues[k] > rel_tol * top && top > 0.0) break;
    ++count;
  }
  for (std::size_t k = 0; k < count && basis.size() < count; ++k) {
    const auto col = sp.eigenvectors.col(k);
    RealVector re(dim), im(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      re[i] = col[i].real();
      im[i] = col[i].imag();
    }
    orthonormalize_into(basis, std::move(re));
    if (basis.size() < count) orthonormalize_into(basis, std::move(im));
  }
  return basis;
}

std::vector<RealVector> compute_N(const GeneratedCone& c, std::size_t samples, std::uint64_t seed) {
  return null_space(compute_states(c, samples, seed), c.dim);
}

RealVector level_vector(std::span<const double> a, std::span<const double> v) {
  RealVector out;
  out.reserve(a.size() * v.size());
  for (double x : a)
    for (double y : v) out.push_back(x * y);
  return out;
}

GeneratedCone level_cone(const GeneratedCone& c, std::size_t n, std::uint64_t seed) {
  GeneratedCone out;
  out.dim = n * n * c.dim;
  out.unit = level_vector(hermitian_coords(ComplexMatrix::identity(n)), c.unit);
  const auto gens = working_generators(c, seed);
  for (const auto& p : spanning_pure_states(n)) {
    const auto pc = hermitian_coords(ComplexMatrix::outer(p));
    for (const auto& g : gens) out.generators.push_back(level_vector(pc, g));
  }
  return out;
}

LevelCheck check_level(const GeneratedCone& c, const std::vector<RealVector>& n_basis, std::size_t level,
                       std::uint64_t seed) {
  LevelCheck out;
  out.level = level;
  const auto lc = level_cone(c, level, seed);
  const auto states = compute_states(lc, 8 * lc.dim, seed);
  out.null_dim = null_space(states, lc.dim).size();
  out.expected_dim = level * level * n_basis.size();
  for (std::size_t k = 0; k < level * level; ++k) {
    RealVector ek(level * level, 0.0);
    ek[k] = 1.0;
    for (const auto& nb : n_basis) {
      const auto x = level_vector(ek, nb);
      for (const auto& s : states) out.max_annihilation = std::max(out.max_annihilation, std::abs(dot(s, x)));
    }
  }
  out.ok = out.null_dim == out.expected_dim && out.max_annihilation <= 1e-9;
  return out;
}

std::vector<double> default_r_schedule() {
  std::vector<double> r;
  for (int k = 0; k <= 20; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

ClosureTest arch_closure_test(std::span<const double> a, const GeneratedCone& c, std::span<const double> schedule) {
  const auto fallback = default_r_schedule();
  if (schedule.empty()) schedule = fallback;
  ClosureTest out;
  for (double r : schedule) {
    if (!cone_contains(c, axpy(a, r, c.unit))) {
      out.first_failure = r;
      return out;
    }
  }
  out.passed = true;
  return out;
}

RealVector ArchResult::project(std::span<const double> x) const {
  RealVector y;
  for (const auto& b : complement) y.push_back(dot(b, x));
  return y;
}

RealVector ArchResult::lift(std::span<const double> y) const {
  RealVector x(complement.empty() ? 0 : complement.front().size(), 0.0);
  for (std::size_t k = 0; k < complement.size(); ++k)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[k] * complement[k][i];
  return x;
}

ArchResult archimedeanize(const GeneratedCone& c, std::uint64_t seed, std::size_t samples) {
  ArchResult out;
  GeneratedCone sampled = c;
  sampled.generators = working_generators(c, seed);
  sampled.oracle = nullptr;

  out.states = compute_states(sampled, samples, seed);
  out.n_basis = null_space(out.states, c.dim);
  for (const auto& s : out.states)
    for (const auto& nb : out.n_basis) out.max_state_on_n = std::max(out.max_state_on_n, std::abs(dot(s, nb)));

  std::vector<RealVector> full = out.n_basis;
  for (std::size_t i = 0; i < c.dim && full.size() < c.dim; ++i) {
    RealVector e(c.dim, 0.0);
    e[i] = 1.0;
    if (orthonormalize_into(full, std::move(e))) out.complement.push_back(full.back());
  }
  out.quotient_dim = out.complement.size();
  out.quotient_unit = out.project(c.unit);

  auto& q = out.quotient_cone;
  q.dim = out.quotient_dim;
  q.unit = out.quotient_unit;
  q.oracle_name = c.oracle_name.empty() ? std::string() : "quotient:" + c.oracle_name;
  for (const auto& g : c.generators) q.generators.push_back(out.project(g));
  // Membership of a class is the closure test of any lift.
  q.oracle = [cone = c, complement = out.complement](std::span<const double> y) {
    RealVector x(cone.dim, 0.0);
    for (std::size_t k = 0; k < complement.size(); ++k)
      for (std::size_t i = 0; i < cone.dim; ++i) x[i] += y[k] * complement[k][i];
    return arch_closure_test(x, cone).passed;
  };

  // Unital positive maps into (M_2, PSD, I): phi(v) = sum_l s_l(v) P_l with a POVM {P_l}.
  Rng rng(seed, 0x0a1);
  for (int trial = 0; trial < 6 && !out.states.empty(); ++trial) {
    const std::size_t terms = 1 + rng.index(3);
    std::vector<const RealVector*> chosen;
    std::vector<ComplexMatrix> povm;
    ComplexMatrix total(2, 2);
    for (std::size_t l = 0; l < terms; ++l) {
      chosen.push_back(&out.states[rng.index(out.states.size())]);
      povm.push_back(rng.wishart(2, 2));
      total += povm.back();
    }
    const auto sp = eig_hermitian(total);
    ComplexMatrix inv_sqrt(2, 2);
    for (std::size_t k = 0; k < 2; ++k)
      inv_sqrt.add_scaled(1.0 / std::sqrt(sp.eigenvalues[k]), ComplexMatrix::outer(sp.eigenvectors.col(k)));
    for (auto& p : povm) p = hermitian_part(inv_sqrt * p * inv_sqrt);
    auto phi = [&](std::span<const double> v) {
      ComplexMatrix r(2, 2);
      for (std::size_t l = 0; l < terms; ++l) r.add_scaled(dot(*chosen[l], v), povm[l]);
      return r;
    };
    out.universal_deviation = std::max(out.universal_deviation, max_abs_diff(phi(c.unit), ComplexMatrix::identity(2)));
    for (int k = 0; k < 8; ++k) {
      const auto v = gaussian(rng, c.dim);
      const auto image = phi(v);
      out.universal_deviation = std::max(out.universal_deviation, max_abs_diff(image, phi(out.lift(out.project(v)))));
      for (const auto& nb : out.n_basis)
        out.universal_deviation = std::max(out.universal_deviation, max_abs_diff(image, phi(axpy(v, rng.normal(), nb))));
    }
  }

  out.levels.push_back(check_level(sampled, out.n_basis, 1, seed));
  out.levels.push_back(check_level(sampled, out.n_basis, 2, seed));
  return out;
}

}  // namespace omaxcones
