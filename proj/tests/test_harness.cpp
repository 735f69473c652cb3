#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "geoflow/errors.hpp"
#include "geoflow/harness.hpp"
#include "geoflow/output.hpp"

using namespace geoflow;

namespace {

std::vector<std::pair<double, double>> random_walk(unsigned seed, int n, double sign) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<double, double>> s;
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    s.emplace_back(0.01 * i, v);
    v += sign * U(rng);
  }
  return s;
}

nlohmann::ordered_json without_runtime(const Report& r) {
  auto j = to_json(r);
  j.erase("runtime_seconds");
  return j;
}

}  // namespace

TEST_CASE("monotone verifier") {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    auto up = random_walk(seed, 50, 1.0);
    const auto ok = verify_monotone(up, Direction::nondecreasing, 1e-12);
    CHECK(ok.verdict == Verdict::pass);
    CHECK(ok.worst_slack >= 0.0);
    CHECK(verify_monotone(random_walk(seed, 50, -1.0), Direction::nonincreasing, 1e-12).verdict ==
          Verdict::pass);
    // A dip deeper than the tolerance is caught at its index.
    const int at = 1 + static_cast<int>(seed % 48);
    up[at].second = up[at - 1].second - 1e-6;
    const auto bad = verify_monotone(up, Direction::nondecreasing, 1e-8);
    CHECK(bad.verdict == Verdict::fail);
    CHECK(bad.index == at);
    CHECK(bad.worst_slack == doctest::Approx(-1e-6));
    CHECK(verify_monotone(up, Direction::nondecreasing, 1e-5).verdict == Verdict::pass);
  }
  CHECK_THROWS_AS(verify_monotone({}, Direction::nondecreasing, 0.0), DomainError);
  CHECK(verify_monotone({{0.0, 1.0}}, Direction::nondecreasing, 0.0).verdict == Verdict::pass);
}

TEST_CASE("report verdict logic") {
  Report r;
  CheckItem a;
  a.verdict = Verdict::pass;
  CheckItem b;
  b.verdict = Verdict::not_asserted;
  r.items = {a, b};
  CHECK(r.all_pass());
  CheckItem c;
  c.verdict = Verdict::fail;
  r.items.push_back(c);
  CHECK_FALSE(r.all_pass());
  CHECK(exit_code(r) == 2);
  CHECK(std::string(to_string(Verdict::not_asserted)) == "not-asserted");
  CHECK(Hypothesis{"x", "assumed"}.holds());
  CHECK_FALSE(Hypothesis{"x", "fail"}.holds());
}

TEST_CASE("sphere equality scenario is constant and deterministic") {
  const auto c = resolve_scenario("sphere-equality");
  const auto r1 = run_scenario(c);
  const auto r2 = run_scenario(c);
  CHECK(without_runtime(r1.report) == without_runtime(r2.report));
  CHECK(series_csv(r1.rows) == series_csv(r2.rows));
  const auto* item = r1.report.find("frequency-constant");
  REQUIRE(item != nullptr);
  CHECK(item->verdict == Verdict::pass);
  CHECK(item->worst_slack >= -1e-10);
  CHECK(r1.report.all_pass());
  // Effective window sits on snapshots inside [0.1, 0.35].
  CHECK(r1.rows.front().t >= 0.1 - 1e-12);
  CHECK(r1.rows.back().t == doctest::Approx(0.35));
}

TEST_CASE("forced failure fails and overridden kappa is reported as assumed") {
  const auto r = run_scenario(resolve_scenario("forced-failure"));
  CHECK_FALSE(r.report.all_pass());
  const auto* item = r.report.find("frequency-monotone");
  REQUIRE(item != nullptr);
  CHECK(item->verdict == Verdict::fail);
  REQUIRE(item->hypotheses.size() == 1);
  CHECK(item->hypotheses[0].status == "assumed");
  CHECK(exit_code(r.report) == 2);
}

TEST_CASE("a failed hypothesis never yields pass") {
  const auto r = run_scenario(resolve_scenario("warped-rhf-section4"));
  for (const char* name : {"harnack-frequency-monotone", "li-yau-estimate", "harnack-eigenvalue-monotone"}) {
    const auto* item = r.report.find(name);
    REQUIRE(item != nullptr);
    CHECK(item->verdict == Verdict::not_asserted);
  }
  CHECK(r.report.all_pass());
  CHECK(r.report.diagnostics.contains("gauss_bonnet"));
}

TEST_CASE("checks that need missing inputs are errors") {
  auto c = resolve_scenario("sphere-mixed");
  c.checks = {"hamilton-estimate"};
  CHECK_THROWS_AS(run_scenario(c), Error);
  c.checks = {"alpha-zero-reduction"};
  CHECK_THROWS_AS(run_scenario(c), Error);
}

TEST_CASE("series CSV layout") {
  const auto r = run_scenario(resolve_scenario("sphere-mixed"));
  const auto csv = series_csv(r.rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kSeriesHeader);
  double prev = -1.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
    const double t = std::stod(line.substr(0, line.find(',')));
    CHECK(t > prev);
    prev = t;
    // No U4 or slack columns without a positive solution: those cells are empty.
    CHECK(line.find(",,") != std::string::npos);
    CHECK(line.back() == ',');
  }
  CHECK(rows == r.rows.size());
  // 17 significant digits round-trip exactly.
  const auto first = csv.substr(csv.find('\n') + 1);
  CHECK(std::stod(first.substr(0, first.find(','))) == r.rows.front().t);
}

TEST_CASE("refinement study on the sphere reports exact") {
  const auto res = refinement_study(resolve_scenario("sphere-equality"), 3);
  CHECK(res.exact);
  CHECK(res.orders.empty());
  for (const auto& l : res.levels) {
    CHECK(l.curvature_error <= 1e-14);
    CHECK(l.heat_error <= 1e-9);
  }
  CHECK_THROWS_AS(refinement_study(resolve_scenario("sphere-equality"), 2), DomainError);
}

TEST_CASE("refinement study on a flat grid uses the closed form") {
  auto c = resolve_scenario("flat-static");
  c.backend.n = 16;
  c.t_end = 1e-3;
  c.t0 = 2.5e-4;
  c.checks = {"mass"};
  c.lambda_reference.reset();
  const auto res = refinement_study(c, 3);
  CHECK(res.heat_closed_form);
  REQUIRE(res.levels.size() == 3);
  CHECK(res.levels[2].n == 64);
  CHECK(res.levels[2].steps == 16 * res.levels[0].steps);
  CHECK(res.orders.at("heat") >= 1.8);
}
