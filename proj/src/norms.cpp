#include "omaxcones/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

#include "omaxcones/errors.hpp"

namespace omaxcones {

const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::Spectral: return "spectral";
    case NormMethod::NumericalRadius: return "numerical-radius";
    case NormMethod::Bisection: return "bisection";
  }
  return "spectral";
}

NormReport order_norm(const ComplexMatrix& h) {
  require_hermitian(h, "order_norm");
  NormReport r;
  r.method = NormMethod::Spectral;
  r.iterations = 1;
  const auto ev = eigvalsh(hermitian_part(h));
  if (!ev.empty()) r.value = std::max(std::abs(ev.front()), std::abs(ev.back()));
  r.lower = r.upper = r.value;
  return r;
}

namespace {

struct SupportLine {
  double angle;   // in [0, 2 pi)
  double offset;  // Re(e^{-i angle} z) <= offset on the numerical range
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Nearly parallel neighbours give ill-conditioned vertices; dropping a
// support line only loosens the enclosure.
constexpr double kMinSeparation = 1e-5;

class RangeEnclosure {
 public:
  explicit RangeEnclosure(const ComplexMatrix& v) : v_(v), vs_(v.adjoint()) {}

  // Support lines in directions phi and phi + pi; returns lambda_max for phi.
  double probe(double phi) {
    ++evaluations_;
    const cplx w = std::polar(1.0, -phi);
    ComplexMatrix h = w * v_;
    h.add_scaled(std::conj(w), vs_);
    h *= 0.5;
    const auto sp = eig_hermitian(hermitian_part(h));
    const std::size_t n = v_.rows();
    last_inserted_ = add(phi, sp.eigenvalues.back(), sp.eigenvectors.col(n - 1));
    add(phi + std::numbers::pi, -sp.eigenvalues.front(), sp.eigenvectors.col(0));
    return sp.eigenvalues.back();
  }

  bool last_inserted() const { return last_inserted_; }

  double lower() const { return lower_; }
  int evaluations() const { return evaluations_; }

  // Switches from collecting to maintaining the polygon incrementally.
  void build() {
    auto pending = std::move(pending_);
    pending_.clear();
    std::sort(pending.begin(), pending.end(), [](const SupportLine& a, const SupportLine& b) { return a.angle < b.angle; });
    for (const auto& l : pending)
      if (lines_.empty() || l.angle - lines_.back().angle > kMinSeparation) lines_.push_back(l);
    while (lines_.size() > 1 && lines_.back().angle - lines_.front().angle > kTwoPi - kMinSeparation) lines_.pop_back();
    built_ = true;
    for (std::size_t i = 0; i < lines_.size(); ++i) push_vertex(i);
  }

  // Largest vertex modulus and its direction; infinite while unbounded.
  std::pair<double, double> upper() {
    while (!heap_.empty()) {
      const auto top = heap_.top();
      if (adjacent(top.left, top.right)) return {top.radius, top.direction};
      heap_.pop();
    }
    return {std::numeric_limits<double>::infinity(), 0.0};
  }

  // Drops the current top vertex when its direction cannot be refined.
  void discard_top() {
    if (!heap_.empty()) heap_.pop();
  }

 private:
  struct Vertex {
    double radius, direction, left, right;
    bool operator<(const Vertex& o) const { return radius < o.radius; }
  };

  std::size_t index_of(double angle) const {
    return static_cast<std::size_t>(std::lower_bound(lines_.begin(), lines_.end(), angle,
                                                     [](const SupportLine& l, double a) { return l.angle < a; }) -
                                    lines_.begin());
  }

  bool adjacent(double left, double right) const {
    const std::size_t i = index_of(left);
    if (i >= lines_.size() || lines_[i].angle != left) return false;
    return lines_[(i + 1) % lines_.size()].angle == right;
  }

  void push_vertex(std::size_t i) {
    const std::size_t k = lines_.size();
    if (k < 2) return;
    const auto& a = lines_[i];
    const auto& b = lines_[(i + 1) % k];
    double gap = b.angle - a.angle;
    if (gap <= 0.0) gap += kTwoPi;
    if (gap >= std::numbers::pi) {
      heap_.push({std::numeric_limits<double>::infinity(), a.angle + 0.5 * gap, a.angle, b.angle});
      return;
    }
    const double det = std::sin(b.angle - a.angle);
    const double x = (a.offset * std::sin(b.angle) - b.offset * std::sin(a.angle)) / det;
    const double y = (b.offset * std::cos(a.angle) - a.offset * std::cos(b.angle)) / det;
    heap_.push({std::hypot(x, y), std::atan2(y, x), a.angle, b.angle});
  }

  bool add(double phi, double offset, const std::vector<cplx>& x) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    lower_ = std::max(lower_, std::abs(quadratic_form(v_, x)));
    if (!built_) {
      pending_.push_back({phi, offset});
      return true;
    }
    const std::size_t k = lines_.size();
    const std::size_t i = index_of(phi);
    const double prev = lines_[(i + k - 1) % k].angle, next = lines_[i % k].angle;
    auto dist = [](double a, double b) {
      const double d = std::abs(a - b);
      return std::min(d, kTwoPi - d);
    };
    if (dist(prev, phi) <= kMinSeparation || dist(next, phi) <= kMinSeparation) return false;
    lines_.insert(lines_.begin() + static_cast<long>(i), SupportLine{phi, offset});
    push_vertex(i == 0 ? k : i - 1);
    push_vertex(i);
    return true;
  }

  const ComplexMatrix& v_;
  ComplexMatrix vs_;
  std::vector<SupportLine> pending_, lines_;
  std::priority_queue<Vertex> heap_;
  bool built_ = false;
  bool last_inserted_ = false;
  double lower_ = 0.0;
  int evaluations_ = 0;
};

}  // namespace

NormReport min_norm(const ComplexMatrix& v, double tol) {
  if (v.rows() != v.cols()) throw Error(ErrorCode::ShapeMismatch, "min_norm needs a square matrix");
  NormReport r;
  r.method = NormMethod::NumericalRadius;
  if (v.rows() == 0 || v.max_abs() == 0.0) return r;

  RangeEnclosure enc(v);
  constexpr int grid = 256;
  const double step = std::numbers::pi / grid;
  int best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    enc.probe(k * step);
    if (enc.lower() > best) {
      best = enc.lower();
      best_k = k;
    }
  }
  // Golden-section refinement of max_phi lambda_max(Re(e^{-i phi} v)) around
  // the best grid direction, in both orientations.
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (double base : {best_k * step, best_k * step + std::numbers::pi}) {
    double lo = base - step, hi = base + step;
    double c = hi - golden * (hi - lo), d = lo + golden * (hi - lo);
    double fc = enc.probe(c), fd = enc.probe(d);
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
      if (fc < fd) {
        lo = c;
        c = d;
        fc = fd;
        d = lo + golden * (hi - lo);
        fd = enc.probe(d);
      } else {
        hi = d;
        d = c;
        fd = fc;
        c = hi - golden * (hi - lo);
        fc = enc.probe(c);
      }
    }
  }
  enc.build();
  const double scale = v.max_abs() * static_cast<double>(v.rows());
  const double target = std::max(tol, 1e-14 * (1.0 + scale));
  // Round numerical ranges (E_12 gives a disk) need many directions, so the
  // certified bracket can stay wider than tol while the value is exact.
  auto [upper, direction] = enc.upper();
  for (int it = 0; it < 4000 && upper - enc.lower() > target; ++it) {
    enc.probe(direction);
    if (!enc.last_inserted()) enc.discard_top();
    std::tie(upper, direction) = enc.upper();
  }
  r.lower = enc.lower();
  r.upper = std::max(upper, r.lower);
  r.value = r.lower;
  r.iterations = enc.evaluations();
  return r;
}

BlockElement dec_norm_element(const ComplexMatrix& v, double t) {
  const std::size_t n = v.rows();
  ComplexMatrix flat(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    flat(i, i) = 1.0;
    flat(n + i, n + i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      flat(i, n + j) = v(i, j) / t;
      flat(n + i, j) = std::conj(v(j, i)) / t;
    }
  }
  return BlockElement(2, n, std::move(flat));
}

NormReport dec_norm(const ComplexMatrix& v, double tol, SearchBudget budget) {
  if (v.rows() != v.cols()) throw Error(ErrorCode::ShapeMismatch, "dec_norm needs a square matrix");
  NormReport r;
  r.method = NormMethod::Bisection;
  const auto m = min_norm(v, std::min(tol, 1e-10));
  if (m.upper == 0.0) return r;
  budget.prefer_sufficiency = true;
  budget.psd_tol = std::min(budget.psd_tol, 1e-12);

  // ||v||_m <= ||v||_dec <= 2 ||v||_m.
  double lo = m.lower, hi = 2.0 * m.upper;
  auto decide = [&](double t) {
    ++r.iterations;
    return max_cone_test(dec_norm_element(v, t), budget).status;
  };
  while (hi - lo > tol && r.iterations < 400) {
    bool moved = false;
    for (double frac : {0.5, 0.75, 0.25}) {
      const double t = lo + frac * (hi - lo);
      const auto s = decide(t);
      if (s == ConeStatus::Undetermined) {
        ++r.undetermined_steps;
        continue;
      }
      (s == ConeStatus::Member ? hi : lo) = t;
      moved = true;
      break;
    }
    if (!moved) break;
  }
  r.lower = lo;
  r.upper = hi;
  r.value = 0.5 * (lo + hi);
  return r;
}

}  // namespace omaxcones
