#include "omaxcones/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omaxcones/random.hpp"

namespace omaxcones {

namespace {

ComplexMatrix max_entangled(std::size_t d) {
  ComplexMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i * d + i, j * d + j) = 1.0;
  return s;
}

ComplexMatrix swap_operator(std::size_t d) {
  ComplexMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

bool has(const std::vector<std::string>& v, const char* s) { return std::find(v.begin(), v.end(), s) != v.end(); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

CriterionResult make(int id, const char* name) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.details = io::Json::object();
  return r;
}

}  // namespace

CriterionResult criterion_eb_ground_truth(const SelftestOptions&) {
  auto r = make(1, "eb-classifier-ground-truth");
  bool ok = true;

  const auto id = classify(MatrixMap::identity(2));
  double ppt = std::nan("");
  if (const auto* p = std::get_if<PptViolation>(&id.choi_cone.certificate)) ppt = p->eigenvalue;
  const bool id_ok = id.status == EBStatus::CPNotEB && std::abs(ppt + 1.0) <= 1e-9;
  r.details["identity"] = {{"status", to_string(id.status)}, {"ppt_eigenvalue", ppt}, {"ok", id_ok}};
  ok = ok && id_ok;

  const std::pair<const char*, MatrixMap> eb_maps[] = {{"depolarizing", MatrixMap::depolarizing(2, 2)},
                                                       {"dephasing", MatrixMap::dephasing(2)}};
  for (const auto& [name, phi] : eb_maps) {
    const auto v = classify(phi);
    double worst = 0.0;
    for (const auto& c : v.cross_checks) worst = std::max(worst, c.deviation);
    const auto certs = v.certificates();
    const bool forms = has(certs, "separable-choi") && has(certs, "holevo") && has(certs, "rank-one-kraus");
    const bool map_ok = v.status == EBStatus::EB && forms && !v.cross_checks.empty() && worst <= 1e-8;
    r.details[name] = {{"status", to_string(v.status)}, {"max_cross_check_deviation", worst}, {"ok", map_ok}};
    ok = ok && map_ok;
  }
  r.passed = ok;
  r.summary = "identity CPNotEB (PPT eigenvalue " + fmt(ppt) + "), depolarizing/dephasing EB";
  return r;
}

CriterionResult criterion_flat_adjoint(const SelftestOptions& opt) {
  auto r = make(2, "flat-adjoint-formula");
  Rng rng(opt.seed, 2);
  const int trials = opt.quick ? 20 : 100;
  double formula = 0.0, involution = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t k = 1 + t % 4, m = 1 + (t / 4) % 4;
    const auto a = rng.ginibre(m, k);
    const auto b = rng.ginibre(k, m);
    const auto phi = MatrixMap::sandwich(a, b);
    const auto flat = flat_adjoint(phi);
    formula = std::max(formula, basis_deviation(flat, MatrixMap::sandwich(a.transpose(), b.transpose())));
    involution = std::max(involution, basis_deviation(flat_adjoint(flat), phi));
  }
  r.passed = formula <= 1e-12 && involution <= 1e-12;
  r.details = {{"trials", trials}, {"max_formula_deviation", formula}, {"max_involution_deviation", involution}};
  r.summary = std::to_string(trials) + " sandwiches, formula dev " + fmt(formula) + ", involution dev " + fmt(involution);
  return r;
}

CriterionResult criterion_duality(const SelftestOptions& opt) {
  auto r = make(3, "duality-sampling");
  const std::size_t pairs = opt.quick ? 60 : 500;
  // Split across small shapes; each sample yields one separable/block-positive pair.
  const std::pair<std::size_t, std::size_t> shapes[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};
  double min_pairing = std::numeric_limits<double>::infinity();
  std::size_t total = 0, violations = 0;
  for (std::size_t s = 0; s < 4; ++s) {
    const std::size_t count = pairs / 4 + (s < pairs % 4 ? 1 : 0);
    const auto rep = dual_cone_check(shapes[s].first, shapes[s].second, count, split_seed(opt.seed, 30 + s));
    total += rep.pairs;
    violations += rep.violations.size();
    if (rep.pairs > 0) min_pairing = std::min(min_pairing, rep.min_pairing);
  }
  const BlockElement me(2, 2, max_entangled(2));
  const double literal_swap = pair(BlockElement(2, 2, swap_operator(2)), me).real();
  const BlockElement flip(2, 2, ComplexMatrix::identity(4) - max_entangled(2));
  const double flip_pairing = pair(flip, me).real();
  const bool flip_block_positive = min_cone_test(flip).status == ConeStatus::Member;
  r.passed = violations == 0 && total >= pairs && min_pairing >= -1e-9 && flip_pairing < -0.5 && flip_block_positive;
  r.details = {{"pairs", total},
               {"violations", violations},
               {"min_pairing", min_pairing},
               {"swap_witness_pairing", flip_pairing},
               {"swap_witness_block_positive", flip_block_positive},
               {"literal_swap_pairing", literal_swap}};
  r.summary = std::to_string(total) + " pairs, min pairing " + fmt(min_pairing) + ", PT(I - swap) vs ME " +
              fmt(flip_pairing);
  return r;
}

CriterionResult criterion_diagonal_collapse(const SelftestOptions& opt) {
  auto r = make(4, "diagonal-collapse");
  Rng rng(opt.seed, 4);
  const int trials = opt.quick ? 40 : 200;
  int disagreements = 0, positive = 0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 1 + t % 4, m = 1 + (t / 4) % 4;
    BlockElement a(n, m);
    bool pointwise = true;
    for (std::size_t s = 0; s < m; ++s) {
      const auto slot = (t + s) % 3 == 0 ? rng.hermitian(n) : rng.wishart(n, 1 + rng.index(n));
      pointwise = pointwise && is_psd(slot).psd;
      a.flat() += kron(slot, ComplexMatrix::unit(m, m, s, s));
    }
    positive += pointwise;
    const auto vmin = min_cone_test(a).status;
    const auto vmax = max_cone_test(a).status;
    const auto expect = pointwise ? ConeStatus::Member : ConeStatus::NotMember;
    if (vmin != expect || vmax != expect) ++disagreements;
  }
  r.passed = disagreements == 0;
  r.details = {{"instances", trials}, {"pointwise_psd", positive}, {"disagreements", disagreements}};
  r.summary = std::to_string(trials) + " instances (" + std::to_string(positive) + " positive), " +
              std::to_string(disagreements) + " disagreements";
  return r;
}

CriterionResult criterion_norm_chain(const SelftestOptions& opt) {
  auto r = make(5, "norm-chain");
  Rng rng(opt.seed, 5);
  const int trials = opt.quick ? 40 : 300;
  int chain_failures = 0, hermitian_failures = 0, hermitian_count = 0, undetermined = 0;
  double worst_chain = 0.0, worst_hermitian = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 2 + t % 2;
    const bool herm = t % 5 == 0;
    const auto v = herm ? rng.hermitian(n) : rng.ginibre(n, n);
    const auto mn = min_norm(v, 1e-10);
    const auto dn = dec_norm(v, 1e-9);
    undetermined += dn.undetermined_steps;
    // Slack is the amount by which the chain is violated.
    const double slack = std::max(mn.value - dn.value, dn.value - 2.0 * mn.value);
    worst_chain = std::max(worst_chain, slack);
    if (slack > 1e-6) ++chain_failures;
    if (herm) {
      ++hermitian_count;
      const double spectral = order_norm(v).value;
      const double dev = std::max({std::abs(mn.value - spectral), std::abs(dn.value - spectral)});
      worst_hermitian = std::max(worst_hermitian, dev);
      if (dev > 1e-8) ++hermitian_failures;
    }
  }
  const double e12 = min_norm(ComplexMatrix::unit(2, 2, 0, 1)).value;
  const bool e12_ok = std::abs(e12 - 0.5) <= 1e-6;
  r.passed = chain_failures == 0 && hermitian_failures == 0 && e12_ok;
  r.details = {{"matrices", trials},
               {"chain_failures", chain_failures},
               {"max_chain_violation", worst_chain},
               {"hermitian", hermitian_count},
               {"hermitian_failures", hermitian_failures},
               {"max_hermitian_deviation", worst_hermitian},
               {"undetermined_steps", undetermined},
               {"e12_min_norm", e12}};
  r.summary = std::to_string(trials) + " matrices, chain violation " + fmt(worst_chain) + ", hermitian dev " +
              fmt(worst_hermitian) + ", ||E12||_m = " + fmt(e12);
  return r;
}

CriterionResult criterion_separable_soundness(const SelftestOptions& opt) {
  auto r = make(6, "separable-decomposition-soundness");

  // Every sample_dmax output is re-certified with a decomposition.
  const int dmax_count = opt.quick ? 8 : 40;
  int dmax_ok = 0;
  double worst_residual = 0.0;
  for (int t = 0; t < dmax_count; ++t) {
    const std::size_t n = 2 + t % 2, terms = 1 + t % 8;
    const auto s = sample_dmax(n, n, terms, split_seed(opt.seed, 600 + t));
    const auto v = max_cone_test(s.element);
    double residual = std::numeric_limits<double>::infinity();
    if (const auto* d = std::get_if<SeparableDecomposition>(&v.certificate))
      residual = relative_frobenius_error(d->resum(n, n).flat(), s.element.flat());
    worst_residual = std::max(worst_residual, residual);
    if (v.status == ConeStatus::Member && residual < 1e-8 && verify_max_verdict(s.element, v).ok) ++dmax_ok;
  }

  // PPT-violating instances: random pure states and Werner states above 1/3.
  Rng rng(opt.seed, 6);
  const int violating_target = opt.quick ? 8 : 40;
  int violating = 0, violating_ok = 0;
  for (int t = 0; violating < violating_target && t < 10 * violating_target; ++t) {
    const std::size_t n = 2 + t % 2, m = 2 + (t / 2) % 2;
    ComplexMatrix flat;
    if (t % 4 == 3) {
      const double p = 0.34 + 0.6 * rng.uniform();
      flat = ComplexMatrix::identity(4);
      flat *= (1.0 - p) / 4.0;
      flat.add_scaled(p / 2.0, max_entangled(2));
    } else {
      flat = ComplexMatrix::outer(rng.unit_vector(n * m));
    }
    const BlockElement a = t % 4 == 3 ? BlockElement(2, 2, flat) : BlockElement(n, m, flat);
    if (is_psd(partial_transpose(a).flat(), 1e-7).psd) continue;
    ++violating;
    const auto v = max_cone_test(a);
    if (v.status == ConeStatus::NotMember && verify_max_verdict(a, v).ok) ++violating_ok;
  }

  // PPT-satisfying PSD instances on 2x2 and 2x3.
  const int ppt_target = opt.quick ? 10 : 60;
  int ppt = 0, ppt_member = 0, confirmed = 0;
  SearchBudget sufficiency;
  sufficiency.prefer_sufficiency = true;
  for (int t = 0; ppt < ppt_target && t < 50 * ppt_target; ++t) {
    const std::size_t m = 2 + t % 2;
    const auto flat = rng.wishart(2 * m, 2 * m);
    const BlockElement a(2, m, flat);
    if (!is_psd(partial_transpose(a).flat()).psd) continue;
    ++ppt;
    if (max_cone_test(a, sufficiency).status == ConeStatus::Member) ++ppt_member;
    SearchBudget search;
    search.seed = split_seed(opt.seed, 700 + t);
    const auto d = decompose_separable(a, search);
    if (d.found && d.residual < 1e-8) ++confirmed;
  }
  const double confirm_rate = ppt > 0 ? static_cast<double>(confirmed) / ppt : 0.0;

  r.passed = dmax_ok == dmax_count && violating == violating_target && violating_ok == violating &&
             ppt == ppt_target && ppt_member == ppt && confirm_rate >= 0.95;
  r.details = {{"dmax_samples", dmax_count},
               {"dmax_recertified", dmax_ok},
               {"max_dmax_residual", worst_residual},
               {"ppt_violating", violating},
               {"ppt_violating_rejected", violating_ok},
               {"ppt_instances", ppt},
               {"ppt_decided_member", ppt_member},
               {"search_confirmed", confirmed},
               {"confirm_rate", confirm_rate}};
  r.summary = std::to_string(dmax_ok) + "/" + std::to_string(dmax_count) + " dmax re-certified (residual " +
              fmt(worst_residual) + "), " + std::to_string(violating_ok) + "/" + std::to_string(violating) +
              " PPT violations rejected, " + std::to_string(confirmed) + "/" + std::to_string(ppt) +
              " PPT instances confirmed by search";
  return r;
}

CriterionResult criterion_arch(const SelftestOptions& opt) {
  auto r = make(7, "archimedeanization");
  const auto lex = archimedeanize(lexicographic_cone(), opt.seed);
  bool n_ok = lex.n_basis.size() == 1 && std::abs(std::abs(lex.n_basis[0][0]) - 1.0) <= 1e-12 &&
              std::abs(lex.n_basis[0][1]) <= 1e-12;
  bool quotient_ok = lex.quotient_dim == 1;
  if (quotient_ok) {
    // R^+ in the direction of the quotient unit.
    const double u = lex.quotient_unit[0];
    const auto& q = lex.quotient_cone;
    quotient_ok = std::abs(std::abs(u) - 1.0) <= 1e-12 && q.oracle(RealVector{u}) && q.oracle(RealVector{0.0}) &&
                  !q.oracle(RealVector{-1e-3 * u}) && q.oracle(lex.project(RealVector{-5.0, 0.0}));
  }
  bool level_ok = lex.levels.size() == 2 && lex.levels[1].null_dim == 4 && lex.levels[1].ok && lex.levels[0].ok;

  const auto psd_cone2 = builtin_cone("psd2");
  const auto psd = archimedeanize(psd_cone2, opt.seed);
  Rng rng(opt.seed, 7);
  int agree = 0;
  const int samples = opt.quick ? 20 : 100;
  for (int t = 0; t < samples; ++t) {
    const auto h = t % 3 == 0 ? rng.wishart(2, 1) : rng.hermitian(2);
    const auto x = hermitian_coords(h);
    if (psd.quotient_cone.oracle(psd.project(x)) == cone_contains(psd_cone2, x)) ++agree;
  }
  const bool fixed = psd.n_basis.empty() && psd.quotient_dim == 4 && agree == samples &&
                     psd.universal_deviation < 1e-9 && lex.universal_deviation < 1e-9;

  r.passed = n_ok && quotient_ok && level_ok && fixed;
  r.details = {{"lexicographic", {{"n_dim", lex.n_basis.size()},
                                  {"n_basis", lex.n_basis},
                                  {"quotient_dim", lex.quotient_dim},
                                  {"quotient_is_half_line", quotient_ok},
                                  {"level2_null_dim", lex.levels.size() > 1 ? lex.levels[1].null_dim : 0},
                                  {"universal_deviation", lex.universal_deviation}}},
               {"psd2", {{"n_dim", psd.n_basis.size()},
                         {"quotient_dim", psd.quotient_dim},
                         {"membership_agreement", agree},
                         {"samples", samples},
                         {"universal_deviation", psd.universal_deviation}}}};
  r.summary = "lexicographic N dim " + std::to_string(lex.n_basis.size()) + ", quotient dim " +
              std::to_string(lex.quotient_dim) + ", level-2 N dim " +
              std::to_string(lex.levels.size() > 1 ? lex.levels[1].null_dim : 0) + "; psd2 fixed point " +
              (fixed ? "yes" : "no");
  return r;
}

std::vector<CriterionResult> run_selftest(const SelftestOptions& opt) {
  return {criterion_eb_ground_truth(opt),   criterion_flat_adjoint(opt), criterion_duality(opt),
          criterion_diagonal_collapse(opt), criterion_norm_chain(opt),   criterion_separable_soundness(opt),
          criterion_arch(opt)};
}

io::Json selftest_report(const std::vector<CriterionResult>& results, const SelftestOptions& opt) {
  io::Json criteria = io::Json::array();
  bool all = true;
  for (const auto& c : results) {
    all = all && c.passed;
    criteria.push_back(
        {{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"summary", c.summary}, {"details", c.details}});
  }
  return {{"seed", opt.seed}, {"quick", opt.quick}, {"passed", all}, {"criteria", criteria}};
}

}  // namespace omaxcones
