#include <doctest.h>

#include <string>

#include "geoflow/config.hpp"
#include "geoflow/errors.hpp"

using namespace geoflow;
using json = nlohmann::ordered_json;

namespace {

json minimal_sphere() {
  return json::parse(R"({
    "id": "t",
    "backend": {"kind": "sphere"},
    "heat": {"u0": {"modes": [[1, 1.0]]}}
  })");
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("bundled scenarios parse and round-trip through JSON") {
  const auto names = bundled_scenarios();
  CHECK(names.size() >= 7);
  for (const char* required : {"sphere-equality", "sphere-mixed", "flat-static", "conformal-rf",
                               "warped-rhf", "sphere-section4", "warped-rhf-section4"})
    CHECK(std::find(names.begin(), names.end(), required) != names.end());
  for (const auto& n : names) {
    CAPTURE(n);
    const auto c = resolve_scenario(n);
    CHECK(c.id == n);
    CHECK(parse_config(to_json(c)) == c);
    CHECK(!c.checks.empty());
  }
}

TEST_CASE("defaults") {
  const auto c = parse_config(minimal_sphere());
  CHECK(c.t_end == 0.01);
  CHECK(c.t0 == doctest::Approx(0.0025));
  CHECK(c.interval_end() == 0.01);
  CHECK(c.tau0 == 1.0);
  CHECK(c.h.kind == HKind::constant);
  CHECK(c.h.c0 == -1.0);
  CHECK(c.backend.band_limit == 32);
  CHECK(c.output == "out/t");
  CHECK(resolved_steps(c) == 256);
  auto doc = minimal_sphere();
  doc["backend"] = json::parse(R"({"kind": "conformal-torus"})");
  doc["heat"]["u0"] = json::parse(R"({"terms": [{"amp": 1, "kx": 1}]})");
  const auto g = parse_config(doc);
  CHECK(g.backend.n == 128);
  const auto s0 = initial_state(g);
  const double dt = g.t_end / resolved_steps(g);
  CHECK(dt * laplacian_spectral_bound(s0) <= kStabilityLimit);
  CHECK(initial_field(g, s0).samples.size() == 128u * 128u);
}

TEST_CASE("schema errors name the offending path") {
  auto doc = minimal_sphere();
  doc["backend"]["bogus"] = 1;
  CHECK(error_path(doc) == "backend.bogus");

  doc = minimal_sphere();
  doc["frequency"] = json::parse(R"({"t0": 0.5})");
  CHECK(error_path(doc) == "frequency.t1");

  doc = minimal_sphere();
  doc["frequency"] = json::parse(R"({"h": {"kind": "linear", "c0": -1, "c1": 200}})");
  CHECK(error_path(doc) == "frequency.h");

  doc = minimal_sphere();
  doc["frequency"] = json::parse(R"({"normalization": "harnack"})");
  CHECK(error_path(doc) == "heat.positive");

  doc = minimal_sphere();
  doc["flow"] = json::parse(R"({"kind": "ricci-harmonic", "alpha": 1})");
  CHECK(error_path(doc) == "flow.kind");

  doc = minimal_sphere();
  doc["flow"] = json::parse(R"({"kind": "ricci", "alpha": 1})");
  CHECK(error_path(doc) == "flow.alpha");

  doc = minimal_sphere();
  doc["checks"] = json::parse(R"(["mass", "no-such-check"])");
  CHECK(error_path(doc) == "checks[1]");

  doc = minimal_sphere();
  doc["heat"]["u0"]["modes"] = json::parse("[[40, 1.0]]");
  CHECK(error_path(doc) == "heat.u0.modes");

  doc = minimal_sphere();
  doc["horizon"] = json::parse(R"({"t_end": -1})");
  CHECK(error_path(doc) == "horizon.t_end");

  doc = minimal_sphere();
  doc["horizon"] = json::parse(R"({"steps": 4})");
  CHECK(error_path(doc) == "horizon.steps");

  doc = minimal_sphere();
  doc.erase("heat");
  CHECK(error_path(doc) == "heat");

  doc = minimal_sphere();
  doc["backend"] = json::parse(R"({"kind": "warped-torus", "a": {"terms": [{"amp": 0.1, "ky": 1}]}})");
  doc["heat"]["u0"] = json::parse(R"({"constant": 1})");
  CHECK(error_path(doc) == "backend.a");

  CHECK_THROWS_AS(parse_config(std::string("{not json")), ConfigError);
  CHECK_THROWS_AS(resolve_scenario("definitely-not-a-scenario"), Error);
}

TEST_CASE("invalid geometry surfaces as a backend error") {
  auto doc = minimal_sphere();
  doc["backend"] = json::parse(R"({"kind": "warped-torus", "n": 16,
                                   "a": {"constant": 0.05, "terms": [{"amp": 0.1, "kx": 1}]}})");
  doc["heat"]["u0"] = json::parse(R"({"constant": 1})");
  const auto c = parse_config(doc);
  try {
    initial_state(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "backend");
  }
}

TEST_CASE("trigonometric series calculus") {
  TrigSeries s;
  s.constant = 0.5;
  s.terms.push_back({2.0, 1, 0, true});
  s.terms.push_back({1.0, 0, 2, false});
  const double x = 0.1, y = 0.3, tp = 2.0 * std::numbers::pi;
  CHECK(s(x, y) == doctest::Approx(0.5 + 2.0 * std::cos(tp * x) + std::sin(2 * tp * y)));
  CHECK(s.dx(x, y) == doctest::Approx(-2.0 * tp * std::sin(tp * x)));
  CHECK(s.dy(x, y) == doctest::Approx(2 * tp * std::cos(2 * tp * y)));
  CHECK(s.flat_laplacian(x, y) ==
        doctest::Approx(-2.0 * tp * tp * std::cos(tp * x) - 4 * tp * tp * std::sin(2 * tp * y)));
}
