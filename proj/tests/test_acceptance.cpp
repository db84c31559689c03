// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <cstdio>

#include "omaxcones/cli.hpp"
#include "omaxcones/selftest.hpp"

using namespace omaxcones;

int main() {
  cli::RunConfig cfg;
  cfg.seed = 2024;
  const auto first = cli::run_command("selftest", io::Json(), io::Json{{"quick", false}}, cfg);
  const auto second = cli::run_command("selftest", io::Json(), io::Json{{"quick", false}}, cfg);
  if (first.output.is_null()) {
    std::printf("selftest did not run: %s\n", first.error.c_str());
    return 1;
  }

  bool all = true;
  for (const auto& c : first.output["criteria"]) {
    const bool ok = c["passed"].get<bool>();
    all = all && ok;
    std::printf("criterion %d %-36s %s  %s\n", c["id"].get<int>(), c["name"].get<std::string>().c_str(),
                ok ? "PASS" : "FAIL", c["summary"].get<std::string>().c_str());
    if (!ok) std::printf("  details: %s\n", c["details"].dump().c_str());
  }
  const auto a = io::dump(first.output), b = io::dump(second.output);
  const bool same = a == b;
  all = all && same;
  std::printf("criterion 8 %-36s %s  two selftest runs with seed %llu, %zu bytes, %s\n", "determinism",
              same ? "PASS" : "FAIL", static_cast<unsigned long long>(cfg.seed), a.size(),
              same ? "byte-identical" : "outputs differ");
  return all ? 0 : 1;
}
