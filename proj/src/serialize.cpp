#include "omaxcones/serialize.hpp"

#include <type_traits>

#include "omaxcones/errors.hpp"

namespace omaxcones::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object with field '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::size_t count_field(const Json& j, const char* key) {
  const auto& f = field(j, key);
  if (!f.is_number_integer() && !f.is_number_unsigned()) bad(std::string("field '") + key + "' must be an integer");
  const auto v = f.get<long long>();
  if (v < 0) bad(std::string("field '") + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

double number(const Json& j, const char* what) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (x.is_array()) {
      for (const auto& y : x) out.push_back(number(y, what));
    } else {
      out.push_back(number(x, what));
    }
  }
  return out;
}

template <class T, class F>
std::vector<T> list(const Json& j, const char* what, F&& parse_one) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<T> out;
  for (const auto& x : j) out.push_back(parse_one(x));
  return out;
}

Json holevo_json(const std::vector<HolevoTerm>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back({{"s", to_json(t.s.y)}, {"p", to_json(t.p)}});
  return out;
}

std::vector<HolevoTerm> holevo_from(const Json& j) {
  return list<HolevoTerm>(j, "holevo terms", [](const Json& t) {
    return HolevoTerm{gamma(matrix_from_json(field(t, "s"))), matrix_from_json(field(t, "p"))};
  });
}

Json matrices_json(const std::vector<ComplexMatrix>& ms) {
  Json out = Json::array();
  for (const auto& a : ms) out.push_back(to_json(a));
  return out;
}

}  // namespace

Json to_json(std::span<const cplx> v) {
  Json re = Json::array(), im = Json::array();
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"re", re}, {"im", im}};
}

std::vector<cplx> vector_from_json(const Json& j) {
  const auto re = numbers(field(j, "re"), "re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = numbers(j["im"], "im");
  if (im.size() != re.size()) bad("vector re/im lengths differ");
  std::vector<cplx> out(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
  return out;
}

Json to_json(const ComplexMatrix& a) {
  Json re = Json::array(), im = Json::array();
  for (const auto& z : a.data()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const auto rows = count_field(j, "rows"), cols = count_field(j, "cols");
  const auto re = numbers(field(j, "re"), "re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = numbers(j["im"], "im");
  if (re.size() != rows * cols || im.size() != rows * cols)
    throw Error(ErrorCode::ShapeMismatch, "matrix data does not match rows x cols = " + std::to_string(rows) + " x " +
                                              std::to_string(cols));
  std::vector<cplx> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = {re[i], im[i]};
  return ComplexMatrix(rows, cols, std::move(data));
}

Json to_json(const BlockElement& b) { return {{"n", b.n()}, {"m", b.m()}, {"flat", to_json(b.flat())}}; }

BlockElement block_from_json(const Json& j) {
  return BlockElement(count_field(j, "n"), count_field(j, "m"), matrix_from_json(field(j, "flat")));
}

Json to_json(const MatrixMap& phi) {
  Json out{{"k", phi.k()}, {"m", phi.m()}, {"kind", to_string(phi.kind())}};
  switch (phi.kind()) {
    case MapKind::Choi: out["data"] = to_json(phi.choi_data()); break;
    case MapKind::Kraus: out["data"] = matrices_json(phi.kraus()); break;
    case MapKind::Holevo: out["data"] = holevo_json(phi.holevo()); break;
  }
  return out;
}

MatrixMap map_from_json(const Json& j) {
  const auto k = count_field(j, "k"), m = count_field(j, "m");
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "builtin") {
    const auto name = field(j, "name").get<std::string>();
    if (name == "depolarizing") return MatrixMap::depolarizing(k, m);
    if (k != m) throw Error(ErrorCode::ShapeMismatch, "builtin map '" + name + "' needs k = m");
    if (name == "identity") return MatrixMap::identity(k);
    if (name == "transpose") return MatrixMap::transpose(k);
    if (name == "dephasing") return MatrixMap::dephasing(k);
    bad("unknown builtin map '" + name + "'");
  }
  const auto& data = field(j, "data");
  if (kind == "choi") {
    auto c = block_from_json(data);
    if (c.n() != k || c.m() != m) throw Error(ErrorCode::ShapeMismatch, "Choi matrix shape does not match k, m");
    return MatrixMap::from_choi(std::move(c));
  }
  if (kind == "kraus") return MatrixMap::from_kraus(k, m, list<ComplexMatrix>(data, "kraus", matrix_from_json));
  if (kind == "holevo") return MatrixMap::from_holevo(k, m, holevo_from(data));
  bad("unknown map kind '" + kind + "'");
}

Json to_json(const Certificate& c) {
  Json out{{"kind", certificate_kind(c)}};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SeparableDecomposition>) {
          Json terms = Json::array();
          for (const auto& t : x.terms) terms.push_back({{"a", to_json(t.a)}, {"v", to_json(t.v)}});
          out["terms"] = terms;
        } else if constexpr (std::is_same_v<T, ProductWitness>) {
          out["x"] = to_json(x.x);
          out["y"] = to_json(x.y);
          out["value"] = x.value;
        } else if constexpr (std::is_same_v<T, PptViolation>) {
          out["eigenvalue"] = x.eigenvalue;
          out["eigenvector"] = to_json(x.eigenvector);
        } else if constexpr (std::is_same_v<T, WitnessFunctional>) {
          out["vector"] = to_json(x.vector);
          out["partial_transposed"] = x.partial_transposed;
          out["value"] = x.value;
        } else if constexpr (std::is_same_v<T, PsdCertificate>) {
          out["min_eigenvalue"] = x.min_eigenvalue;
        } else if constexpr (std::is_same_v<T, DecomposableCertificate>) {
          out["p"] = to_json(x.p);
          out["q"] = to_json(x.q);
        } else if constexpr (std::is_same_v<T, SufficiencyTag>) {
          out["tag"] = true;
          out["note"] = x.note;
        } else {
          out["best_value"] = x.best_value;
          out["restarts_used"] = x.restarts_used;
          out["iterations_used"] = x.iterations_used;
          out["residual"] = x.residual;
        }
      },
      c);
  return out;
}

Certificate certificate_from_json(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "separable-decomposition") {
    SeparableDecomposition d;
    d.terms = list<TensorTerm>(field(j, "terms"), "terms", [](const Json& t) {
      return TensorTerm{matrix_from_json(field(t, "a")), matrix_from_json(field(t, "v"))};
    });
    return d;
  }
  if (kind == "product-witness")
    return ProductWitness{vector_from_json(field(j, "x")), vector_from_json(field(j, "y")),
                          number(field(j, "value"), "value")};
  if (kind == "ppt-violation")
    return PptViolation{number(field(j, "eigenvalue"), "eigenvalue"), vector_from_json(field(j, "eigenvector"))};
  if (kind == "witness-functional")
    return WitnessFunctional{vector_from_json(field(j, "vector")), field(j, "partial_transposed").get<bool>(),
                             number(field(j, "value"), "value")};
  if (kind == "psd") return PsdCertificate{number(field(j, "min_eigenvalue"), "min_eigenvalue")};
  if (kind == "decomposable")
    return DecomposableCertificate{matrix_from_json(field(j, "p")), matrix_from_json(field(j, "q"))};
  if (kind == "budget-report")
    return BudgetReport{number(field(j, "best_value"), "best_value"), field(j, "restarts_used").get<int>(),
                        field(j, "iterations_used").get<int>(), number(field(j, "residual"), "residual")};
  if (j.value("tag", false)) return SufficiencyTag{kind, j.value("note", std::string())};
  bad("unknown certificate kind '" + kind + "'");
}

ConeStatus cone_status_from_string(const std::string& s) {
  for (auto st : {ConeStatus::Member, ConeStatus::NotMember, ConeStatus::Undetermined})
    if (s == to_string(st)) return st;
  bad("unknown cone status '" + s + "'");
}

EBStatus eb_status_from_string(const std::string& s) {
  for (auto st : {EBStatus::NotCP, EBStatus::CPNotEB, EBStatus::EB, EBStatus::Undetermined})
    if (s == to_string(st)) return st;
  bad("unknown EB status '" + s + "'");
}

Json to_json(const ConeVerdict& v) {
  return {{"status", to_string(v.status)},
          {"certificate", to_json(v.certificate)},
          {"margin", v.margin},
          {"ppt_sufficient", v.ppt_sufficient}};
}

ConeVerdict verdict_from_json(const Json& j) {
  ConeVerdict v;
  v.status = cone_status_from_string(field(j, "status").get<std::string>());
  v.certificate = certificate_from_json(field(j, "certificate"));
  v.margin = j.contains("margin") ? number(j["margin"], "margin") : 0.0;
  v.ppt_sufficient = j.value("ppt_sufficient", false);
  return v;
}

Json to_json(const EBVerdict& v) {
  Json checks = Json::array();
  for (const auto& c : v.cross_checks) checks.push_back({{"forms", c.forms}, {"deviation", c.deviation}});
  Json out{{"status", to_string(v.status)},
           {"certificates", v.certificates()},
           {"choi_min_eigenvalue", v.choi_min_eigenvalue}};
  if (!v.choi_min_eigenvector.empty()) out["choi_min_eigenvector"] = to_json(v.choi_min_eigenvector);
  if (v.status != EBStatus::NotCP) out["choi_cone"] = to_json(v.choi_cone);
  out["holevo"] = holevo_json(v.holevo);
  out["kraus"] = matrices_json(v.kraus);
  out["cross_checks"] = checks;
  out["note"] = v.note;
  return out;
}

EBVerdict eb_verdict_from_json(const Json& j) {
  EBVerdict v;
  v.status = eb_status_from_string(field(j, "status").get<std::string>());
  v.choi_min_eigenvalue = j.contains("choi_min_eigenvalue") ? number(j["choi_min_eigenvalue"], "eigenvalue") : 0.0;
  if (j.contains("choi_min_eigenvector")) v.choi_min_eigenvector = vector_from_json(j["choi_min_eigenvector"]);
  if (j.contains("choi_cone")) v.choi_cone = verdict_from_json(j["choi_cone"]);
  if (j.contains("holevo")) v.holevo = holevo_from(j["holevo"]);
  if (j.contains("kraus")) v.kraus = list<ComplexMatrix>(j["kraus"], "kraus", matrix_from_json);
  v.note = j.value("note", std::string());
  return v;
}

Json to_json(const NormReport& r) {
  return {{"value", r.value},         {"method", to_string(r.method)}, {"lower", r.lower},
          {"upper", r.upper},         {"iterations", r.iterations},     {"undetermined_steps", r.undetermined_steps}};
}

Json to_json(const CertificateCheck& c) {
  return {{"ok", c.ok}, {"deviation", c.deviation}, {"detail", c.detail}};
}

Json to_json(const DualityReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"kind", v.kind},
                          {"index", v.index},
                          {"value", v.value},
                          {"functional", to_json(v.functional)},
                          {"element", to_json(v.element)}});
  return {{"ok", r.ok()},
          {"pairs", r.pairs},
          {"min_pairing", r.min_pairing},
          {"evaluations", r.evaluations},
          {"min_evaluation_eigenvalue", r.min_evaluation_eigenvalue},
          {"violations", violations}};
}

Json to_json(const FalsifyReport& r) {
  Json out{{"not_cp", r.not_cp},
           {"checked", r.checked},
           {"counterexample_found", r.counterexample_found},
           {"classified", to_string(r.classified)},
           {"consistent", r.consistent},
           {"note", r.note}};
  if (r.counterexample_found) {
    out["counterexample"] = to_json(r.counterexample);
    out["image_min_eigenvalue"] = r.image_min_eigenvalue;
  }
  return out;
}

Json to_json(const CoEBReport& r) {
  return {{"phi", to_string(r.phi)}, {"flat", to_string(r.flat)}, {"consistent", r.consistent}};
}

Json to_json(const GeneratedCone& c) {
  Json out{{"dim", c.dim}};
  if (c.has_oracle() && !c.oracle_name.empty()) out["oracle"] = "builtin:" + c.oracle_name;
  if (!c.generators.empty() || !c.has_oracle()) out["generators"] = c.generators;
  out["unit"] = c.unit;
  return out;
}

GeneratedCone cone_from_json(const Json& j) {
  const auto dim = count_field(j, "dim");
  GeneratedCone c;
  if (j.contains("oracle")) {
    const auto name = j["oracle"].get<std::string>();
    if (name.rfind("builtin:", 0) != 0) bad("oracle must be 'builtin:<name>'");
    c = builtin_cone(name.substr(8));
    if (c.dim != dim) throw Error(ErrorCode::ShapeMismatch, "dim does not match the builtin oracle");
  } else {
    c.dim = dim;
    c.generators = list<RealVector>(field(j, "generators"), "generators", [&](const Json& g) {
      auto v = numbers(g, "generator");
      if (v.size() != dim) throw Error(ErrorCode::ShapeMismatch, "generator length differs from dim");
      return v;
    });
  }
  if (j.contains("unit")) c.unit = numbers(j["unit"], "unit");
  if (c.unit.size() != dim) throw Error(ErrorCode::ShapeMismatch, "unit length differs from dim");
  return c;
}

Json to_json(const ArchResult& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"level", l.level},
                      {"null_dim", l.null_dim},
                      {"expected_dim", l.expected_dim},
                      {"max_annihilation", l.max_annihilation},
                      {"ok", l.ok}});
  Json q{{"dim", r.quotient_cone.dim}, {"generators", r.quotient_cone.generators}, {"unit", r.quotient_unit},
         {"membership", "arch-closure-of-lift"}};
  return {{"n_basis", r.n_basis},
          {"quotient_dim", r.quotient_dim},
          {"quotient_unit", r.quotient_unit},
          {"quotient_cone", q},
          {"complement", r.complement},
          {"states_sampled", r.states.size()},
          {"max_state_on_n", r.max_state_on_n},
          {"universal_deviation", r.universal_deviation},
          {"levels", levels}};
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const Json& j, bool pretty) { return pretty ? j.dump(2) : j.dump(); }

}  // namespace omaxcones::io
