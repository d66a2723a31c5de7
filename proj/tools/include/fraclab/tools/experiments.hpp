#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclab/tools/report.hpp"

namespace fraclab::tools {

using Json = nlohmann::json;

enum class ParamKind {
    Order,         // a in (0, 1)
    OrderList,     // a or [a, ...]
    Positive,      // real > 0
    PositiveList,  // real > 0 or [real > 0, ...]
    Real,
    Count,         // integer ≥ 1
    CountList,
    Choice,        // one of `choices`
};

struct ParamSpec {
    std::string name;
    ParamKind kind;
    Json default_value;
    std::string help;
    std::vector<std::string> choices{};
    /// Largest admissible value for Count parameters.
    std::int64_t max_count = 1 << 24;
};

enum class Comparison { AtMost, AtLeast };

struct GateSpec {
    std::string name;
    double threshold;
    Comparison comparison;
    std::string help;
};

struct RunContext {
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

struct ExperimentOutput {
    Table table;
    /// Measured value per gate name.
    std::map<std::string, double> measured;
};

struct Experiment {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::vector<GateSpec> gates;
    std::function<ExperimentOutput(const Json& params, const RunContext& ctx)> run;
};

/// All experiments, sorted by name.
const std::vector<Experiment>& registry();
const Experiment* find_experiment(const std::string& name);

/// Raised for parameter or threshold values the experiment cannot accept.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Checks `params` against the experiment's specs and returns them with defaults filled in.
Json resolve_params(const Experiment& e, const Json& params);

/// Thresholds per gate, defaults overridden by `acceptance`.
std::map<std::string, double> resolve_gates(const Experiment& e, const Json& acceptance);

bool gate_passes(Comparison c, double measured, double threshold);

}  // namespace fraclab::tools
