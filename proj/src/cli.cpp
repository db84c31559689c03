#include "omaxcones/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "omaxcones/errors.hpp"
#include "omaxcones/selftest.hpp"

namespace omaxcones::cli {

namespace {

const char* const kCommands[] = {"cone-min-test", "cone-max-test", "classify", "norm",
                                 "flat",          "dual-verify",   "arch",     "selftest"};

SearchBudget make_budget(const RunConfig& cfg) {
  SearchBudget b;
  b.seed = cfg.seed;
  if (cfg.restarts) b.restarts = *cfg.restarts;
  if (cfg.iterations) b.iterations = *cfg.iterations;
  if (cfg.tol) b.tol = *cfg.tol;
  return b;
}

// Accepts either the bare object or one wrapped under `key`.
const io::Json& unwrap(const io::Json& input, const char* key) {
  if (input.is_object() && input.contains(key)) return input[key];
  return input;
}

io::Json with_command(const std::string& command, const io::Json& body) {
  io::Json out{{"command", command}};
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  return out;
}

int exit_for(ConeStatus s) { return s == ConeStatus::Undetermined ? kExitUndetermined : kExitOk; }

io::Json check_json(const std::string& what, const CertificateCheck& c) {
  return {{"what", what}, {"ok", c.ok}, {"deviation", c.deviation}, {"detail", c.detail}};
}

io::Json check_json(const std::string& what, bool ok, double deviation, const std::string& detail = {}) {
  return check_json(what, CertificateCheck{ok, deviation, detail});
}

io::Json verify_classify(const io::Json& input, const io::Json& result) {
  const auto phi = io::map_from_json(unwrap(input, "map"));
  const auto c = choi(phi);
  const auto v = io::eb_verdict_from_json(result);
  io::Json checks = io::Json::array();
  switch (v.status) {
    case EBStatus::NotCP: {
      const double nv = norm(v.choi_min_eigenvector);
      const double val = nv > 0.0 ? quadratic_form(c.flat(), v.choi_min_eigenvector).real() / (nv * nv) : 0.0;
      const double dev = std::abs(val - v.choi_min_eigenvalue);
      checks.push_back(check_json("choi-eigenvector", val < 0.0 && dev <= 1e-8, dev,
                                  "<x, C x> / <x, x> = " + std::to_string(val)));
      break;
    }
    case EBStatus::CPNotEB: {
      const auto psd = is_psd(c.flat());
      checks.push_back(check_json("choi-psd", psd.psd, std::max(0.0, -psd.min_eigenvalue)));
      auto cone = verify_max_verdict(c, v.choi_cone);
      cone.ok = cone.ok && v.choi_cone.status == ConeStatus::NotMember;
      checks.push_back(check_json("choi-not-separable", cone));
      break;
    }
    case EBStatus::EB: {
      auto cone = verify_max_verdict(c, v.choi_cone);
      cone.ok = cone.ok && v.choi_cone.status == ConeStatus::Member;
      checks.push_back(check_json("separable-choi", cone));
      bool positive = true;
      for (const auto& t : v.holevo) positive = positive && t.s.positive() && is_psd(t.p).psd;
      const double hol = max_abs_diff(choi(MatrixMap::from_holevo(phi.k(), phi.m(), v.holevo)).flat(), c.flat());
      checks.push_back(check_json("holevo", positive && !v.holevo.empty() && hol <= 1e-8, hol));
      bool rank_one = !v.kraus.empty();
      try {
        holevo_from_kraus(v.kraus);
      } catch (const Error&) {
        rank_one = false;
      }
      const double kr = max_abs_diff(choi(MatrixMap::from_kraus(phi.k(), phi.m(), v.kraus)).flat(), c.flat());
      checks.push_back(check_json("rank-one-kraus", rank_one && kr <= 1e-8, kr));
      break;
    }
    case EBStatus::Undetermined:
      checks.push_back(check_json("undetermined", true, 0.0, "nothing certified"));
      break;
  }
  return checks;
}

io::Json verify_dual(const io::Json& input, const io::Json& result) {
  io::Json checks = io::Json::array();
  if (input.is_object() && input.contains("functional") && input.contains("element")) {
    const auto f = io::block_from_json(input["functional"]);
    const auto a = io::block_from_json(input["element"]);
    const double p = pair(f, a).real();
    const double reported = result.at("pairing").get<double>();
    checks.push_back(check_json("pairing", std::abs(p - reported) <= 1e-9 * (1.0 + std::abs(p)), std::abs(p - reported)));
    checks.push_back(check_json("functional", verify_min_verdict(f, io::verdict_from_json(result.at("functional_verdict")))));
    checks.push_back(check_json("element", verify_max_verdict(a, io::verdict_from_json(result.at("element_verdict")))));
    return checks;
  }
  for (const auto& viol : result.value("violations", io::Json::array())) {
    const auto f = io::block_from_json(viol.at("functional"));
    const auto a = io::block_from_json(viol.at("element"));
    const double reported = viol.at("value").get<double>();
    const std::string kind = viol.at("kind").get<std::string>();
    double value = pair(f, a).real();
    if (kind == "qmax-evaluation") value = reported;  // eigenvalue record, re-evaluated below
    checks.push_back(check_json("violation-" + kind, std::abs(value - reported) <= 1e-9 * (1.0 + std::abs(value)),
                                std::abs(value - reported)));
  }
  if (checks.empty()) checks.push_back(check_json("violations", true, 0.0, "no violations reported"));
  return checks;
}

io::Json verify_one(const io::Json& emitted) {
  const auto command = emitted.at("command").get<std::string>();
  const auto& input = emitted.at("input");
  const auto& result = emitted.at("result");
  io::Json checks = io::Json::array();
  if (command == "cone-min-test") {
    checks.push_back(check_json("min-cone", verify_min_verdict(io::block_from_json(unwrap(input, "element")),
                                                               io::verdict_from_json(result))));
  } else if (command == "cone-max-test") {
    checks.push_back(check_json("max-cone", verify_max_verdict(io::block_from_json(unwrap(input, "element")),
                                                               io::verdict_from_json(result))));
  } else if (command == "classify") {
    checks = verify_classify(input, result);
  } else if (command == "dual-verify") {
    checks = verify_dual(input, result);
  } else {
    checks.push_back(check_json(command, true, 0.0, "no certificate to verify"));
  }
  bool ok = true;
  for (const auto& c : checks) ok = ok && c.at("ok").get<bool>();
  return {{"command", command}, {"ok", ok}, {"checks", checks}};
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::Json read_json(const std::string& path) {
  const auto text = read_file(path);
  try {
    return io::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": malformed JSON: " + e.what());
  }
}

void render(const io::Json& j, const std::string& indent, std::ostream& os) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    if (v.is_object()) {
      os << indent << it.key() << ":\n";
      render(v, indent + "  ", os);
    } else if (v.is_array()) {
      const auto compact = v.dump();
      if (compact.size() <= 120)
        os << indent << it.key() << ": " << compact << "\n";
      else
        os << indent << it.key() << ": [" << v.size() << " items]\n";
    } else if (v.is_string()) {
      os << indent << it.key() << ": " << v.get<std::string>() << "\n";
    } else {
      os << indent << it.key() << ": " << v.dump() << "\n";
    }
  }
}

}  // namespace

JobResult run_command(const std::string& command, const io::Json& input, const io::Json& options,
                      const RunConfig& cfg) {
  JobResult r;
  try {
    const auto budget = make_budget(cfg);
    if (command == "cone-min-test" || command == "cone-max-test") {
      const auto a = io::block_from_json(unwrap(input, "element"));
      const auto v = command == "cone-min-test" ? min_cone_test(a, budget) : max_cone_test(a, budget);
      r.output = with_command(command, io::to_json(v));
      r.exit_code = exit_for(v.status);
    } else if (command == "classify") {
      const auto v = classify(io::map_from_json(unwrap(input, "map")), budget);
      r.output = with_command(command, io::to_json(v));
      r.exit_code = v.status == EBStatus::Undetermined ? kExitUndetermined : kExitOk;
    } else if (command == "norm") {
      const auto kind = options.value("kind", std::string("min"));
      const auto v = io::matrix_from_json(unwrap(input, "matrix"));
      const double tol = cfg.tol.value_or(1e-10);
      NormReport rep;
      if (kind == "order") {
        rep = order_norm(v);
      } else if (kind == "min") {
        rep = min_norm(v, tol);
      } else if (kind == "dec") {
        rep = dec_norm(v, tol, budget);
        // Stuck bisection (every probe undetermined) leaves a wide bracket.
        if (rep.upper - rep.lower > 2.0 * tol * std::max(1.0, rep.upper)) r.exit_code = kExitUndetermined;
      } else {
        throw Error(ErrorCode::InvalidInput, "unknown norm kind '" + kind + "'");
      }
      io::Json body{{"kind", kind}};
      body.update(io::to_json(rep));
      r.output = with_command(command, body);
    } else if (command == "flat") {
      const auto phi = io::map_from_json(unwrap(input, "map"));
      const bool dagger = options.value("dagger", false);
      r.output = {{"command", command},
                  {"adjoint", dagger ? "hilbert-schmidt" : "flat"},
                  {"map", io::to_json(dagger ? hilbert_schmidt_adjoint(phi) : flat_adjoint(phi))}};
    } else if (command == "dual-verify") {
      if (input.is_object() && input.contains("functional") && input.contains("element")) {
        const auto f = io::block_from_json(input["functional"]);
        const auto a = io::block_from_json(input["element"]);
        const auto fv = min_cone_test(f, budget);
        const auto av = max_cone_test(a, budget);
        const double p = pair(f, a).real();
        const bool both = fv.status == ConeStatus::Member && av.status == ConeStatus::Member;
        r.output = {{"command", command},
                    {"pairing", p},
                    {"functional_verdict", io::to_json(fv)},
                    {"element_verdict", io::to_json(av)},
                    {"consistent", !(both && p < -1e-9)}};
        r.exit_code = fv.status == ConeStatus::Undetermined || av.status == ConeStatus::Undetermined
                          ? kExitUndetermined
                          : kExitOk;
      } else {
        auto get = [&](const char* key, std::size_t fallback) {
          if (options.contains(key)) return options[key].get<std::size_t>();
          if (input.is_object() && input.contains(key)) return input[key].get<std::size_t>();
          return fallback;
        };
        const auto rep = dual_cone_check(get("n", 2), get("m", 2), get("samples", 50), cfg.seed);
        r.output = with_command(command, io::to_json(rep));
      }
    } else if (command == "arch") {
      r.output = with_command(command, io::to_json(archimedeanize(io::cone_from_json(input), cfg.seed)));
    } else if (command == "selftest") {
      SelftestOptions opt;
      opt.seed = cfg.seed;
      opt.quick = options.value("quick", false);
      const auto results = run_selftest(opt);
      r.output = with_command(command, selftest_report(results, opt));
      if (!r.output["passed"].get<bool>()) {
        r.exit_code = kExitError;
        r.error = "selftest: some criteria failed";
      }
    } else {
      throw Error(ErrorCode::InvalidInput, "unknown command '" + command + "'");
    }
  } catch (const Error& e) {
    r = {kExitError, nullptr, e.what()};
  } catch (const nlohmann::json::exception& e) {
    r = {kExitError, nullptr, std::string("invalid input: ") + e.what()};
  }
  return r;
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("OMAXCONES_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

io::Json run_batch(const io::Json& manifest, const RunConfig& cfg, std::size_t threads) {
  if (!manifest.is_array()) throw Error(ErrorCode::InvalidInput, "batch manifest must be a JSON array of jobs");
  const std::size_t n = manifest.size();
  std::vector<io::Json> results(n);
  auto run_one = [&](std::size_t i) {
    const auto& job = manifest[i];
    io::Json out{{"index", i}};
    std::string command;
    JobResult r;
    if (!job.is_object() || !job.contains("command") || !job["command"].is_string()) {
      r = {kExitError, nullptr, "job must be an object with a string 'command'"};
    } else {
      command = job["command"].get<std::string>();
      out["command"] = command;
      if (command == "batch")
        r = {kExitError, nullptr, "nested batch jobs are not allowed"};
      else
        r = run_command(command, job.value("input", io::Json()), job.value("options", io::Json::object()), cfg);
    }
    out["status"] = r.exit_code == kExitOk ? "ok" : r.exit_code == kExitUndetermined ? "undetermined" : "error";
    out["exit_code"] = r.exit_code;
    if (!r.output.is_null()) out["output"] = std::move(r.output);
    if (!r.error.empty()) out["error"] = r.error;
    results[i] = std::move(out);
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) run_one(i);
  };
  const std::size_t pool = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(n, 1));
  std::vector<std::thread> workers;
  for (std::size_t t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  for (auto& w : workers) w.join();

  std::size_t ok = 0, undetermined = 0, errors = 0;
  io::Json list = io::Json::array();
  for (auto& r : results) {
    const int code = r["exit_code"].get<int>();
    if (code == kExitError) {
      ++errors;
    } else {
      ++ok;
      if (code == kExitUndetermined) ++undetermined;
    }
    list.push_back(std::move(r));
  }
  return {{"command", "batch"},
          {"seed", cfg.seed},
          {"counts", {{"jobs", n}, {"ok", ok}, {"undetermined", undetermined}, {"error", errors}}},
          {"results", list}};
}

io::Json verify_emitted(const io::Json& emitted) {
  if (emitted.value("command", std::string()) == "batch") {
    io::Json jobs = io::Json::array();
    bool ok = true;
    for (const auto& job : emitted.at("jobs")) {
      if (!job.contains("result")) continue;
      auto v = verify_one(job);
      ok = ok && v["ok"].get<bool>();
      jobs.push_back(std::move(v));
    }
    return {{"command", "batch"}, {"ok", ok}, {"jobs", jobs}};
  }
  return verify_one(emitted);
}

std::string render_text(const io::Json& j) {
  std::ostringstream os;
  if (j.is_object())
    render(j, "", os);
  else
    os << j.dump(2) << "\n";
  return os.str();
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"omaxcones: operator-system cones, norms and entanglement-breaking maps on matrix algebras"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  RunConfig cfg;
  double tol = 0.0;
  int restarts = 0, iterations = 0;
  std::string emit_path, verify_path;
  auto* seed_opt = app.add_option("--seed", cfg.seed, "Seed for every randomized search");
  auto* tol_opt = app.add_option("--tol", tol, "Tolerance (norm bracket width; decomposition residual for cone tests)");
  auto* restarts_opt = app.add_option("--restarts", restarts, "See-saw restarts")->check(CLI::PositiveNumber);
  auto* iterations_opt = app.add_option("--iterations", iterations, "Decomposition search iterations")
                             ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("-o,--output", cfg.output, "Write the result here instead of stdout");
  app.add_option("--emit-certificates", emit_path, "Write input and result for later --verify");
  app.add_option("--verify", verify_path, "Re-check an emitted certificate file by direct evaluation");

  std::string input_path = "-";
  std::string norm_kind = "min";
  bool dagger = false, quick = false;
  std::size_t dual_n = 2, dual_m = 2, dual_samples = 50;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : kCommands) {
    auto* sub = app.add_subcommand(name);
    subs[name] = sub;
  }
  subs["cone-min-test"]->description("Block-positivity of an element of M_n(M_m)");
  subs["cone-max-test"]->description("Separability of an element of M_n(M_m)");
  subs["classify"]->description("NotCP / CPNotEB / EB classification of a map M_k -> M_m");
  subs["norm"]->description("Order, minimal or decomposition norm of a square matrix");
  subs["flat"]->description("Flat adjoint (or Hilbert-Schmidt adjoint with --dagger) of a map");
  subs["dual-verify"]->description("Duality sampling, or the pairing of a given functional and element");
  subs["arch"]->description("Archimedeanization of a generated cone");
  subs["selftest"]->description("Bundled acceptance suite as a deterministic JSON report");
  for (const char* name : {"cone-min-test", "cone-max-test", "classify", "norm", "flat", "arch"})
    subs[name]->add_option("input", input_path, "Input JSON file ('-' for stdin)")->required();
  subs["norm"]->add_option("--kind", norm_kind, "order, min or dec")->check(CLI::IsMember({"order", "min", "dec"}));
  subs["flat"]->add_flag("--dagger", dagger, "Hilbert-Schmidt adjoint instead of the flat adjoint");
  subs["selftest"]->add_flag("--quick", quick, "Smaller sample counts");
  auto* dual_input = subs["dual-verify"]->add_option("input", input_path, "Optional input JSON file");
  auto* dual_n_opt = subs["dual-verify"]->add_option("--n", dual_n, "Outer size for sampling");
  auto* dual_m_opt = subs["dual-verify"]->add_option("--m", dual_m, "Inner size for sampling");
  auto* dual_s_opt = subs["dual-verify"]->add_option("--samples", dual_samples, "Number of samples");
  auto* batch = app.add_subcommand("batch", "Run a JSON manifest of jobs (requires --seed)");
  batch->add_option("manifest", input_path, "Manifest JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  if (*tol_opt) cfg.tol = tol;
  if (*restarts_opt) cfg.restarts = restarts;
  if (*iterations_opt) cfg.iterations = iterations;

  auto emit = [&](const io::Json& text_target) {
    const std::string body = cfg.format == "text" ? render_text(text_target) : io::dump(text_target) + "\n";
    if (cfg.output.empty()) {
      out << body;
      return true;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    f << body;
    if (!f) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return false;
    }
    return true;
  };
  auto write_certificates = [&](const io::Json& doc) {
    std::ofstream f(emit_path, std::ios::binary);
    f << io::dump(doc) << "\n";
    if (!f) {
      err << "error: cannot write '" << emit_path << "'\n";
      return false;
    }
    return true;
  };

  try {
    if (!verify_path.empty()) {
      const auto report = verify_emitted(read_json(verify_path));
      if (!emit(report)) return kExitError;
      return report["ok"].get<bool>() ? kExitOk : kExitError;
    }
    const auto chosen = app.get_subcommands();
    if (chosen.empty()) {
      err << app.help();
      return kExitError;
    }
    const std::string command = chosen.front()->get_name();

    if (command == "batch") {
      if (!*seed_opt) {
        err << "error: batch mode requires --seed\n";
        return kExitError;
      }
      const auto manifest = read_json(input_path);
      const auto summary = run_batch(manifest, cfg, worker_threads());
      if (!emit(summary)) return kExitError;
      if (!emit_path.empty()) {
        io::Json jobs = io::Json::array();
        for (std::size_t i = 0; i < manifest.size(); ++i) {
          const auto& res = summary["results"][i];
          if (!res.contains("output") || !manifest[i].is_object()) continue;
          jobs.push_back({{"command", res["command"]},
                          {"options", manifest[i].value("options", io::Json::object())},
                          {"input", manifest[i].value("input", io::Json())},
                          {"result", res["output"]}});
        }
        if (!write_certificates({{"command", "batch"}, {"seed", cfg.seed}, {"jobs", jobs}})) return kExitError;
      }
      return kExitOk;
    }

    io::Json options = io::Json::object();
    io::Json input;
    if (command == "norm") options["kind"] = norm_kind;
    if (command == "flat") options["dagger"] = dagger;
    if (command == "selftest") options["quick"] = quick;
    if (command == "dual-verify") {
      if (*dual_n_opt) options["n"] = dual_n;
      if (*dual_m_opt) options["m"] = dual_m;
      if (*dual_s_opt) options["samples"] = dual_samples;
      if (*dual_input) input = read_json(input_path);
    } else if (command != "selftest") {
      input = read_json(input_path);
    }

    const auto result = run_command(command, input, options, cfg);
    if (!result.output.is_null() && !emit(result.output)) return kExitError;
    if (!result.error.empty()) err << "error: " << result.error << "\n";
    if (!emit_path.empty() && !result.output.is_null()) {
      if (!write_certificates(
              {{"command", command}, {"seed", cfg.seed}, {"options", options}, {"input", input}, {"result", result.output}}))
        return kExitError;
    }
    return result.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace omaxcones::cli
