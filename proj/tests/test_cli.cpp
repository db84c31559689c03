#include "doctest.h"

#include <sstream>

#include "omaxcones/cli.hpp"
#include "omaxcones/random.hpp"

using namespace omaxcones;
using namespace omaxcones::cli;
using io::Json;

namespace {

Json builtin_map(const char* name, std::size_t k = 2, std::size_t m = 2) {
  return {{"k", k}, {"m", m}, {"kind", "builtin"}, {"name", name}};
}

Json emitted(const std::string& command, const Json& input, const JobResult& r) {
  return {{"command", command}, {"input", input}, {"result", r.output}};
}

int run(std::vector<std::string> args, std::string& out, std::string& err) {
  std::vector<const char*> argv{"omaxcones"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  err = e.str();
  return code;
}

}  // namespace

TEST_CASE("serialization round trips") {
  Rng rng(1);
  const auto a = rng.ginibre(2, 3);
  CHECK(io::matrix_from_json(io::to_json(a)) == a);
  const BlockElement b(2, 2, rng.hermitian(4));
  CHECK(io::block_from_json(io::to_json(b)) == b);
  // Nested rows and a missing imaginary part are accepted.
  const Json nested{{"rows", 2}, {"cols", 2}, {"re", {{1, 2}, {3, 4}}}};
  CHECK(io::matrix_from_json(nested)(1, 0) == cplx(3, 0));
  CHECK_THROWS_AS(io::matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"re", {1, 2, 3}}}), Error);

  for (const auto& phi : {MatrixMap::depolarizing(2, 3), MatrixMap::from_kraus(2, 2, {rng.ginibre(2, 2)}),
                          MatrixMap::from_holevo(2, 2, {{gamma(rng.wishart(2, 1)), rng.wishart(2, 2)}})}) {
    const auto back = io::map_from_json(io::to_json(phi));
    CHECK(back.kind() == phi.kind());
    CHECK(basis_deviation(back, phi) < 1e-15);
  }

  const auto v = max_cone_test(sample_dmax(2, 2, 3, 4).element);
  const auto parsed = io::verdict_from_json(io::to_json(v));
  CHECK(parsed.status == v.status);
  CHECK(certificate_kind(parsed.certificate) == certificate_kind(v.certificate));
  CHECK(io::to_json(parsed) == io::to_json(v));

  const auto cone = io::cone_from_json(Json{{"dim", 2}, {"oracle", "builtin:lexicographic2"}, {"unit", {0, 1}}});
  CHECK(cone.has_oracle());
  CHECK(io::to_json(cone)["oracle"] == "builtin:lexicographic2");
  CHECK_THROWS_AS(io::cone_from_json(Json{{"dim", 3}, {"oracle", "builtin:lexicographic2"}}), Error);
}

TEST_CASE("run_command: verdicts and exit codes") {
  const RunConfig cfg;
  const auto dep = run_command("classify", builtin_map("depolarizing"), Json::object(), cfg);
  CHECK(dep.exit_code == kExitOk);
  CHECK(dep.output["status"] == "EB");

  Json me{{"n", 2}, {"m", 2}, {"flat", io::to_json(choi(MatrixMap::identity(2)).flat())}};
  const auto max = run_command("cone-max-test", me, Json::object(), cfg);
  CHECK(max.exit_code == kExitOk);
  CHECK(max.output["status"] == "NotMember");
  CHECK(max.output["certificate"]["kind"] == "ppt-violation");

  const auto bad = run_command("classify", Json{{"k", 2}}, Json::object(), cfg);
  CHECK(bad.exit_code == kExitError);
  CHECK_FALSE(bad.error.empty());
  CHECK(run_command("nope", Json(), Json::object(), cfg).exit_code == kExitError);

  const auto norm = run_command("norm", io::to_json(ComplexMatrix::unit(2, 2, 0, 1)), Json{{"kind", "min"}}, cfg);
  CHECK(norm.output["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));

  // A separable 3x3 element with a starved search budget stays undecided.
  RunConfig starved;
  starved.iterations = 1;
  starved.restarts = 1;
  const auto s = sample_dmax(3, 3, 6, 11).element;
  const auto und = run_command("cone-max-test", io::to_json(s), Json::object(), starved);
  CHECK(und.output["status"] == "Undetermined");
  CHECK(und.exit_code == kExitUndetermined);
}

TEST_CASE("emitted certificates re-verify and tampering is detected") {
  const RunConfig cfg;
  for (const char* name : {"depolarizing", "identity", "transpose", "dephasing"}) {
    const auto input = builtin_map(name);
    const auto r = run_command("classify", input, Json::object(), cfg);
    CHECK_MESSAGE(verify_emitted(emitted("classify", input, r))["ok"].get<bool>(), name);
  }

  auto input = builtin_map("depolarizing");
  auto r = run_command("classify", input, Json::object(), cfg);
  auto doc = emitted("classify", input, r);
  doc["result"]["holevo"][0]["p"]["re"][0] = 3.0;
  CHECK_FALSE(verify_emitted(doc)["ok"].get<bool>());

  const auto elem = io::to_json(BlockElement(2, 2, choi(MatrixMap::identity(2)).flat()));
  r = run_command("cone-max-test", elem, Json::object(), cfg);
  doc = emitted("cone-max-test", elem, r);
  CHECK(verify_emitted(doc)["ok"].get<bool>());
  doc["result"]["certificate"]["eigenvalue"] = -5.0;
  CHECK_FALSE(verify_emitted(doc)["ok"].get<bool>());
}

TEST_CASE("batch: counts, order and thread independence") {
  RunConfig cfg;
  cfg.seed = 9;
  const Json manifest = Json::array(
      {{{"command", "classify"}, {"input", builtin_map("depolarizing")}},
       {{"command", "classify"}, {"input", builtin_map("identity")}},
       {{"command", "classify"}, {"input", {{"k", 2}, {"m", 2}, {"kind", "choi"}, {"data", {{"n", 2}}}}}},
       {{"command", "norm"}, {"input", io::to_json(ComplexMatrix::identity(2))}, {"options", {{"kind", "dec"}}}},
       Json("not a job")});
  const auto one = run_batch(manifest, cfg, 1);
  const auto three = run_batch(manifest, cfg, 3);
  CHECK(io::dump(one) == io::dump(three));
  CHECK(one["counts"]["ok"] == 3);
  CHECK(one["counts"]["error"] == 2);
  for (std::size_t i = 0; i < manifest.size(); ++i) CHECK(one["results"][i]["index"] == i);
  CHECK(one["results"][1]["output"]["status"] == "CPNotEB");

  const auto empty = run_batch(Json::array(), cfg, 4);
  CHECK(empty["counts"]["jobs"] == 0);
  CHECK(empty["results"].empty());
  CHECK_THROWS_AS(run_batch(Json::object(), cfg, 1), Error);
}

TEST_CASE("dispatch: usage errors, batch seed and text output") {
  std::string out, err;
  CHECK(run({}, out, err) == kExitError);
  CHECK(run({"frobnicate"}, out, err) == kExitError);
  CHECK(run({"--help"}, out, err) == kExitOk);
  CHECK(run({"norm", "--kind", "max", "x.json"}, out, err) == kExitError);
  CHECK(run({"classify", "/nonexistent/file.json"}, out, err) == kExitError);
  CHECK(err.find("cannot read") != std::string::npos);
  CHECK(run({"batch", "/nonexistent/file.json"}, out, err) == kExitError);
  CHECK(err.find("--seed") != std::string::npos);

  const auto text = render_text(Json{{"status", "EB"}, {"nested", {{"a", 1}}}, {"list", {1, 2}}});
  CHECK(text == "status: EB\nnested:\n  a: 1\nlist: [1,2]\n");
}

TEST_CASE("selftest output is deterministic") {
  RunConfig cfg;
  cfg.seed = 5;
  const auto a = run_command("selftest", Json(), Json{{"quick", true}}, cfg);
  const auto b = run_command("selftest", Json(), Json{{"quick", true}}, cfg);
  CHECK(a.exit_code == kExitOk);
  CHECK(io::dump(a.output) == io::dump(b.output));
}
