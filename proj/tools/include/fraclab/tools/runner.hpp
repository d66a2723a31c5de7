#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/tools/experiments.hpp"

namespace fraclab::tools {

enum ExitCode : int {
    kOk = 0,
    kGatesFailed = 1,
    kUsage = 2,
    kInvalidConfig = 3,
    kUnknownExperiment = 4,
    kUnwritableOutput = 5,
};

struct ConfigEntry {
    const Experiment* experiment = nullptr;
    Json params;
    std::map<std::string, double> thresholds;
    /// May run concurrently with other independent entries.
    bool independent = false;
};

struct Config {
    std::string text;
    std::optional<std::uint64_t> seed;
    std::vector<ConfigEntry> entries;
};

/// Raised by load_config; carries the exit code for the failure.
class ConfigFailure : public std::runtime_error {
public:
    ConfigFailure(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

struct RunOptions {
    std::filesystem::path out_dir = "fraclab-out";
    std::size_t threads = 1;
    std::optional<std::uint64_t> seed;
};

struct GateOutcome {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    Comparison comparison = Comparison::AtMost;
    bool passed = false;
};

struct EntryOutcome {
    std::string name;
    std::string report;
    std::string error;
    double seconds = 0.0;
    std::vector<GateOutcome> gates;
    bool passed() const;
};

struct RunSummary {
    std::vector<EntryOutcome> entries;
    ExitCode code = kOk;
};

/// Runs every entry, writes one CSV per entry and manifest.json into out_dir.
/// Throws ConfigFailure(kUnwritableOutput) if out_dir cannot be written.
RunSummary run_config(const Config& cfg, const RunOptions& opts, std::ostream& log);

/// Hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace fraclab::tools
