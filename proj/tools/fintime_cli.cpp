// Command-line front end: parse a scenario config, run its analyses, write
// versioned result documents.  Exit 0 on success, 1 when any analysis
// failed, 2 on config problems.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fintime/detail/parallel.hpp"
#include "fintime/errors.hpp"
#include "fintime/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"finite-time dynamics analysis runner"};
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed_override;

  app.add_option("--config", config_path, "scenario config file (JSON, comments allowed)")
      ->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 = hardware")->default_val(0u);
  app.add_option("--seed-override", seed_override, "replace the config seed");

  CLI11_PARSE(app, argc, argv);

  fintime::set_max_threads(threads);

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config: " << config_path << "\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  fintime::ScenarioConfig cfg;
  try {
    cfg = fintime::parse_scenario(buf.str());
  } catch (const fintime::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  fintime::RunReport report;
  try {
    report = fintime::run_scenario(cfg, out_dir, seed_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  for (const auto& a : report.analyses) {
    std::cout << (a.ok ? "ok  " : "FAIL") << "  [" << a.index << "] " << a.type;
    if (!a.ok) std::cout << "  (" << a.error << ")";
    std::cout << "\n";
    for (const auto& f : a.files) std::cout << "        " << f << "\n";
  }
  std::cout << "manifest: " << report.manifest_path << "\n";
  return report.all_ok ? 0 : 1;
}
