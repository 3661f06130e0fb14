#pragma once

// JSON and CSV serialization of coefficient vectors, kernels, media,
// scenarios, sweep configurations and sweep results.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "itecloak/cloak.hpp"

namespace itecloak {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const CoefficientVector& c);
CoefficientVector coefficients_from_json(const json& j);

json to_json(const HerglotzKernel& k);
HerglotzKernel kernel_from_json(const json& j);

json to_json(const LayeredMedium& m);
LayeredMedium medium_from_json(const json& j);

/// Everything but the kernel values, which are large.
json to_json(const FitReport& r);

json to_json(const TransmissionEigenvalue& ev);

/// Scenario description: {"device": "two_layer" | "three_layer" | "custom",
/// "R0", "R1", "n", "R_sigma", "alpha": [a1, a2, a3], "tau",
/// "core": {"eps", "mu", "sigma"}, "window": {"c0", "lambda0"},
/// "medium" (custom only), "incident": {...}, "omega", "L"}.
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& s);

enum class SweepKind { Epsilon, Tau, Core };
std::string to_string(SweepKind kind);

struct SweepConfig {
  SweepKind kind = SweepKind::Epsilon;
  Scenario scenario;
  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  EpsilonSweepOptions epsilon_options;
  std::vector<double> taus{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<CoreMaterial> cores{{0.2, 1.0, 0.0}, {5.0, 1.0, 0.0}, {2.0, 1.0, 1.0}, {1.0, 0.5, 0.2}, {1.0, 1.0, 0.0}};
  SweepOptions sweep_options;
};

/// {"scenario": {...}, "epsilons", "degrade", "seed", "taus", "cores",
/// "threads", "floor"}; a missing "scenario" means the reference device
/// for the sweep kind.
SweepConfig sweep_config_from_json(SweepKind kind, const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// One row per record (parameter, label, farfield_norm, relative_farfield,
/// epsilon, omega, at_floor) then a summary row carrying the slope columns.
/// Numbers are printed with %.17g.
std::string results_csv(const SweepResult& r);
std::string modes_csv(const SweepResult& r);
std::string smatrix_csv(const ScatteringSolution& s);

/// Acceptance verdicts of a sweep, keyed by criterion name.
struct SweepVerdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string rule;
};

std::vector<SweepVerdict> evaluate_sweep(SweepKind kind, const SweepResult& r);
std::vector<SweepVerdict> evaluate_core_sweep(const CoreSweepResult& r);

/// Slopes and verdicts; wall-clock and version data live only under
/// "metadata", which callers can drop to compare runs.
json summary_json(SweepKind kind, const SweepResult& r, const std::vector<SweepVerdict>& verdicts,
                  const json& metadata);

std::string format_double(double v);

}  // namespace itecloak
