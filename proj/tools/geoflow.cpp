// Command line front end: run scenarios, check them, refine them.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "geoflow/config.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/harness.hpp"
#include "geoflow/output.hpp"

namespace fs = std::filesystem;
using namespace geoflow;

namespace {

struct Outcome {
  std::string name;
  std::optional<ScenarioResult> result;
  std::string error;
  int code = 1;
};

fs::path output_dir(const ScenarioConfig& c, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("GEOFLOW_OUT"); env && *env) return fs::path(env) / c.id;
  return c.output;
}

Outcome run_one(const std::string& name, bool write_series, const std::string& out) {
  Outcome o;
  o.name = name;
  try {
    const auto config = resolve_scenario(name);
    o.name = config.id;
    auto result = run_scenario(config);
    emit_outputs(result, output_dir(config, out), write_series);
    o.code = exit_code(result.report);
    o.result = std::move(result);
  } catch (const std::exception& e) {
    o.error = e.what();
    o.code = 1;
  }
  return o;
}

void print(const Outcome& o) {
  if (!o.result) {
    std::printf("%-28s error: %s\n", o.name.c_str(), o.error.c_str());
    return;
  }
  const auto& r = o.result->report;
  std::printf("%-28s %s (%.2fs)\n", o.name.c_str(), r.all_pass() ? "pass" : "FAIL",
              r.runtime_seconds);
  for (const auto& item : r.items) {
    std::printf("  %-28s %-13s slack %+.3e  tol %.1e", item.name.c_str(), to_string(item.verdict),
                item.worst_slack, item.tolerance);
    for (const auto& h : item.hypotheses)
      if (h.status != "pass") std::printf("  [%s: %s]", h.name.c_str(), h.status.c_str());
    std::printf("\n");
  }
}

int run_many(const std::vector<std::string>& names, int jobs, bool series,
             const std::string& out) {
  if (!out.empty() && names.size() > 1) {
    std::fprintf(stderr, "--out needs exactly one scenario\n");
    return 1;
  }
  std::vector<Outcome> outcomes(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < names.size();)
      outcomes[i] = run_one(names[i], series, out);
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(names.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = 0;
  for (const auto& o : outcomes) {
    print(o);
    if (o.code == 1) code = 1;
    else if (o.code == 2 && code == 0) code = 2;
  }
  return code;
}

int refine(const std::string& name, int levels, const std::string& out) {
  try {
    const auto config = resolve_scenario(name);
    const auto r = refinement_study(config, levels);
    nlohmann::ordered_json j;
    j["id"] = config.id;
    j["exact"] = r.exact;
    j["heat_reference"] = r.heat_closed_form ? "closed-form" : "next-finer-level";
    auto& lv = j["levels"] = nlohmann::ordered_json::array();
    std::printf("%6s %7s %12s %12s %12s %12s %12s %22s\n", "n", "steps", "curvature", "heat",
                "bochner", "f-residual", "volume", "U(t1)");
    for (const auto& l : r.levels) {
      std::printf("%6d %7d %12.4e %12.4e %12.4e %12.4e %12.4e %22.15g\n", l.n, l.steps,
                  l.curvature_error, l.heat_error, l.bochner_defect, l.f_residual,
                  l.volume_residual, l.U_end);
      lv.push_back({{"n", l.n},
                    {"steps", l.steps},
                    {"curvature_error", l.curvature_error},
                    {"heat_error", l.heat_error},
                    {"bochner_defect", l.bochner_defect},
                    {"f_residual", l.f_residual},
                    {"volume_residual", l.volume_residual},
                    {"U_end", l.U_end}});
    }
    if (r.exact) std::printf("orders: exact (closed-form backend)\n");
    auto& ord = j["orders"] = nlohmann::ordered_json::object();
    for (const auto& [key, v] : r.orders) {
      std::printf("order %-12s %.3f\n", key.c_str(), v);
      ord[key] = v;
    }
    const auto dir = output_dir(config, out);
    fs::create_directories(dir);
    std::ofstream(dir / "refinement.json") << j.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric flow frequency laboratory"};
  app.require_subcommand(1);

  std::vector<std::string> names;
  int jobs = 1;
  std::string out;

  auto* run = app.add_subcommand("run", "Run scenarios and write series.csv and report.json");
  run->add_option("scenarios", names, "Config files or bundled scenario names")->required();
  run->add_option("--jobs,-j", jobs, "Scenarios to run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out, "Output directory (single scenario)");

  auto* verify = app.add_subcommand("verify", "Run checks and write report.json only");
  verify->add_option("scenarios", names, "Config files or bundled scenario names")->required();
  verify->add_option("--jobs,-j", jobs, "Scenarios to run concurrently")->check(CLI::PositiveNumber);
  verify->add_option("--out,-o", out, "Output directory (single scenario)");

  std::string refine_name;
  int levels = 3;
  auto* ref = app.add_subcommand("refine", "Grid refinement study");
  ref->add_option("scenario", refine_name, "Config file or bundled scenario name")->required();
  ref->add_option("--levels", levels, "Number of levels (at least 3)")->check(CLI::Range(3, 8));
  ref->add_option("--out,-o", out, "Output directory");

  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) return run_many(names, jobs, true, out);
  if (*verify) return run_many(names, jobs, false, out);
  if (*ref) return refine(refine_name, levels, out);
  if (*list) {
    for (const auto& n : bundled_scenarios()) {
      std::string desc;
      try {
        desc = resolve_scenario(n).description;
      } catch (const Error& e) {
        desc = std::string("(invalid: ") + e.what() + ")";
      }
      std::printf("%-28s %s\n", n.c_str(), desc.c_str());
    }
  }
  return 0;
}
