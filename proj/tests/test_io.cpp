#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "itecloak/io.hpp"

using namespace itecloak;

TEST_CASE("coefficient vectors round-trip through JSON") {
  CoefficientVector c(3, Basis::Outgoing);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(0.1 * double(i), -1.0 / (1.0 + double(i)));
  const json j = to_json(c);
  CHECK(j["L"] == 3);
  CHECK(j["basis"] == "outgoing");
  CHECK(j["entries"].size() == c.size());
  CHECK(j["entries"][0][2] == "TE");
  const auto back = coefficients_from_json(json::parse(j.dump()));
  CHECK(back.basis() == Basis::Outgoing);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back[i] == c[i]);
  CHECK_THROWS_AS(coefficients_from_json(json{{"L", 2}, {"basis", "weird"}, {"entries", json::array()}}), ConfigError);
  CHECK_THROWS_AS(coefficients_from_json(json::parse(R"({"L": 1, "basis": "regular", "entries": [[2, 0, "TE", 1, 0]]})")),
                  ConfigError);
}

TEST_CASE("kernels round-trip through JSON") {
  HerglotzKernel k = vsh_kernel(sphere_quadrature(4), ModeIndex{2, 1, Polarization::TM}, true);
  const auto back = kernel_from_json(json::parse(to_json(k).dump()));
  REQUIRE(back.size() == k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    CHECK(back.quadrature.nodes[i] == k.quadrature.nodes[i]);
    CHECK(back.quadrature.weights[i] == k.quadrature.weights[i]);
    CHECK(back.g[i] == k.g[i]);
  }
  json bad = to_json(k);
  bad["g"][0] = json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0}), json::array({0.0, 0.0})});
  bad["nodes"][0] = json::array({1.0, 0.0, 0.0});
  CHECK_THROWS_AS(kernel_from_json(bad), ConfigError);
}

TEST_CASE("media round-trip through JSON") {
  const auto j = json::parse(R"({"layers": [{"r": 0.3, "kind": "penetrable", "eps": 2.0, "mu": 1.0, "sigma": 0.1},
                                            {"r": 0.5, "eps": 1e4, "mu": 1e-4, "sigma": 1e4, "lossy": true},
                                            {"r": 1.0, "kind": "penetrable", "eps": 4.0}]})");
  const auto m = medium_from_json(j);
  REQUIRE(m.layers().size() == 3);
  CHECK(m.layers()[0].sigma == 0.1);
  CHECK(m.layers()[1].lossy);
  CHECK(m.layers()[2].mu == 1.0);
  const auto again = medium_from_json(to_json(m));
  CHECK(again.layers()[1].eps == 1e4);
  CHECK(medium_from_json(json::parse(R"({"layers": [{"r": 0.5, "kind": "PEC"}, {"r": 1, "eps": 4}]})")).has_pec_core());
  CHECK_THROWS_AS(medium_from_json(json::parse(R"({"layers": [{"r": 1.0, "eps": 400}]})")), ConfigError);
  CHECK_THROWS_AS(medium_from_json(json::parse(R"({"layers": [{"r": 1.0, "kind": "gold"}]})")), ConfigError);
}

TEST_CASE("scenarios parse and serialize") {
  const auto s = scenario_from_json(json::parse(R"({"device": "three_layer", "R_sigma": 0.3, "R0": 0.5, "R1": 1.0,
      "n": 4.0, "alpha": [1, 2, 3], "tau": 1e-3, "core": {"eps": 5.0, "mu": 1.0, "sigma": 0.0},
      "incident": {"kind": "plane_wave", "direction": [1, 0, 0], "polarization": [[0, 0], [0, 1], 0]}})"));
  CHECK(s.device == DeviceKind::ThreeLayer);
  CHECK(s.medium.layers()[1].eps == doctest::Approx(1e3));
  CHECK(s.medium.layers()[1].mu == doctest::Approx(2e-3));
  CHECK(s.medium.layers()[1].sigma == doctest::Approx(3e3));
  CHECK(s.incident.kind == IncidentKind::PlaneWave);
  CHECK(s.incident.polarization(1) == cplx(0.0, 1.0));
  const auto back = scenario_from_json(to_json(s));
  CHECK(back.lossy.alpha3 == 3.0);
  CHECK(back.core.eps == 5.0);
  CHECK(back.incident.direction == s.incident.direction);

  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"device": "two_layer", "n": 1.0})")), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"device": "blob"})")), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"incident": {"kind": "laser"}})")), ConfigError);
  const auto custom = scenario_from_json(
      json::parse(R"({"device": "custom", "medium": {"layers": [{"r": 1.0, "eps": 1.0}]}, "n": 4.0})"));
  CHECK(custom.medium.contrast_free());
}

TEST_CASE("sweep configs pick the right defaults") {
  const auto eps = sweep_config_from_json(SweepKind::Epsilon, json::object());
  CHECK(eps.scenario.device == DeviceKind::TwoLayer);
  CHECK(eps.epsilons.size() >= 4);
  const auto tau = sweep_config_from_json(SweepKind::Tau, json::parse(R"({"taus": [1e-1, 1e-2], "threads": 2})"));
  CHECK(tau.scenario.device == DeviceKind::ThreeLayer);
  CHECK(tau.taus.size() == 2);
  CHECK(tau.sweep_options.threads == 2);
  const auto core = sweep_config_from_json(SweepKind::Core, json::parse(R"({"cores": [{"eps": 3}]})"));
  CHECK(core.cores.size() == 1);
  CHECK(core.cores[0].eps == 3.0);
  CHECK(core.cores[0].sigma == 0.3);
  CHECK_THROWS_AS(sweep_config_from_json(SweepKind::Tau, json::parse(R"({"scenario": {"device": "two_layer"}})")),
                  ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(SweepKind::Epsilon, json::parse(R"({"degrade": "shake"})")), ConfigError);
}

TEST_CASE("CSV writers") {
  SweepResult r;
  r.parameter_name = "tau";
  SweepRecord a;
  a.parameter = 1e-3;
  a.label = "tau=0.001";
  a.farfield_norm = 0.1;
  a.relative_farfield = 0.2;
  a.modes.push_back({1, Polarization::TM, cplx(1.0, -2.0), 0.5});
  r.records.push_back(a);
  r.slope = fit_loglog({1e-4, 1e-3, 1e-2, 1e-1}, {1e-4, 1e-3, 1e-2, 1e-1});
  const std::string csv = results_csv(r);
  std::istringstream in(csv);
  std::string header, row, summary;
  std::getline(in, header);
  std::getline(in, row);
  std::getline(in, summary);
  CHECK(header.rfind("row,parameter,label,farfield_norm", 0) == 0);
  CHECK(row.find("0.10000000000000001") != std::string::npos);
  CHECK(summary.rfind("summary,", 0) == 0);
  CHECK(summary.find(",1,") != std::string::npos);
  CHECK(modes_csv(r).find("0.001,1,TM,1,-2,0.5") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");

  ScatteringSolution s;
  s.S = {cplx(-0.5, 0.0), cplx(0.0, 0.0)};
  const std::string sm = smatrix_csv(s);
  CHECK(sm.find("l,pol,re_S,im_S,abs_1_plus_2S") == 0);
  CHECK(sm.find("1,TE,-0.5,0,0") != std::string::npos);
  CHECK(sm.find("1,TM,0,0,1") != std::string::npos);
}

TEST_CASE("summary keeps metadata isolated") {
  SweepResult r;
  r.parameter_name = "epsilon";
  r.slope = fit_loglog({1e-4, 1e-3, 1e-2, 1e-1}, {2e-4, 2e-3, 2e-2, 2e-1});
  const auto verdicts = evaluate_sweep(SweepKind::Epsilon, r);
  json a = summary_json(SweepKind::Epsilon, r, verdicts, json{{"generated_at", "x"}});
  json b = summary_json(SweepKind::Epsilon, r, verdicts, json{{"generated_at", "y"}});
  CHECK(a["pass"] == true);
  CHECK(a != b);
  a.erase("metadata");
  b.erase("metadata");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("verdicts follow the sweep rules") {
  SweepResult r;
  r.slope = fit_loglog({1e-6, 1e-5, 1e-4, 1e-3}, {1e-6, 1e-5, 1e-4, 1e-3});
  auto v = evaluate_sweep(SweepKind::Tau, r);
  for (const auto& x : v) CHECK(x.pass);
  r.slope = fit_loglog({1e-6, 1e-5, 1e-4, 1e-3}, {1.0, 1.1, 1.2, 1.3});
  v = evaluate_sweep(SweepKind::Tau, r);
  CHECK(!v[1].pass);
  CoreSweepResult c;
  c.spread = 12.0;
  CHECK(!evaluate_core_sweep(c)[0].pass);
}

TEST_CASE("file helpers report failures") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/config.json"), ConfigError);
  const auto dir = std::filesystem::temp_directory_path() / "itecloak_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "bad.json").string();
  write_text_file(path, "{not json");
  CHECK_THROWS_AS(read_json_file(path), ConfigError);
  write_text_file(path, R"({"a": 1})");
  CHECK(read_json_file(path)["a"] == 1);
}
