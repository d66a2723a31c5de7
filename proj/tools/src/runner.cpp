#include "fraclab/tools/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <fraclab/version.hpp>

namespace fraclab::tools {

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string report_name(std::size_t index, const std::string& name) {
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu-", index + 1);
    return prefix + name + ".csv";
}

void ensure_writable(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigFailure(kUnwritableOutput, "cannot create output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".fraclab-write-probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "probe") || !f.flush()) {
            throw ConfigFailure(kUnwritableOutput, "output directory " + dir.string() + " is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

EntryOutcome run_entry(const ConfigEntry& e, const RunContext& ctx, ExperimentOutput& output, bool& ok) {
    EntryOutcome o;
    o.name = e.experiment->name;
    const auto t0 = std::chrono::steady_clock::now();
    ok = false;
    try {
        output = e.experiment->run(e.params, ctx);
        ok = true;
    } catch (const std::exception& ex) {
        o.error = ex.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& g : e.experiment->gates) {
        GateOutcome go;
        go.name = g.name;
        go.threshold = e.thresholds.at(g.name);
        go.comparison = g.comparison;
        go.measured = std::numeric_limits<double>::quiet_NaN();
        if (ok && output.measured.contains(g.name)) go.measured = output.measured.at(g.name);
        go.passed = gate_passes(g.comparison, go.measured, go.threshold);
        o.gates.push_back(go);
    }
    return o;
}

}  // namespace

bool EntryOutcome::passed() const {
    return error.empty() && std::all_of(gates.begin(), gates.end(), [](const GateOutcome& g) { return g.passed; });
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::string hex;
    char b[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", digest[i]);
        hex += b;
    }
    return hex;
}

Config parse_config(const std::string& text) {
    Config cfg;
    cfg.text = text;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& ex) {
        throw ConfigFailure(kInvalidConfig, std::string("config is not valid JSON: ") + ex.what());
    }
    const auto invalid = [](const std::string& m) { return ConfigFailure(kInvalidConfig, m); };
    if (!j.is_object()) throw invalid("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key != "experiments" && key != "seed" && key != "description") throw invalid("unknown top-level key '" + key + "'");
    }
    if (!j.contains("experiments") || !j["experiments"].is_array()) throw invalid("config needs an 'experiments' array");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw invalid("'seed' must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    std::size_t index = 0;
    for (const Json& item : j["experiments"]) {
        ++index;
        const std::string where = "experiment #" + std::to_string(index);
        if (!item.is_object()) throw invalid(where + " must be an object");
        for (const auto& [key, value] : item.items()) {
            if (key != "name" && key != "params" && key != "acceptance" && key != "independent") {
                throw invalid(where + ": unknown key '" + key + "'");
            }
        }
        if (!item.contains("name") || !item["name"].is_string()) throw invalid(where + " needs a string 'name'");
        const std::string name = item["name"].get<std::string>();
        ConfigEntry e;
        e.experiment = find_experiment(name);
        if (!e.experiment) throw ConfigFailure(kUnknownExperiment, where + ": unknown experiment '" + name + "'");
        try {
            e.params = resolve_params(*e.experiment, item.value("params", Json()));
            e.thresholds = resolve_gates(*e.experiment, item.value("acceptance", Json()));
        } catch (const ConfigError& ex) {
            throw invalid(where + ": " + ex.what());
        }
        if (item.contains("independent")) {
            if (!item["independent"].is_boolean()) throw invalid(where + ": 'independent' must be a boolean");
            e.independent = item["independent"].get<bool>();
        }
        cfg.entries.push_back(std::move(e));
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigFailure(kInvalidConfig, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

RunSummary run_config(const Config& cfg, const RunOptions& opts, std::ostream& log) {
    ensure_writable(opts.out_dir);
    const std::string started = utc_now();
    const std::uint64_t seed = opts.seed.value_or(cfg.seed.value_or(1));
    const std::size_t threads = std::max<std::size_t>(1, opts.threads);
    const std::size_t n = cfg.entries.size();

    std::vector<EntryOutcome> outcomes(n);
    std::vector<ExperimentOutput> outputs(n, ExperimentOutput{Table({"empty"}), {}});
    std::vector<char> ok(n, 0);
    std::mutex log_mutex;
    const auto execute = [&](std::size_t i, std::size_t inner_threads) {
        {
            std::lock_guard lock(log_mutex);
            log << "[" << i + 1 << "/" << n << "] " << cfg.entries[i].experiment->name << " ...\n" << std::flush;
        }
        bool good = false;
        outcomes[i] = run_entry(cfg.entries[i], RunContext{seed, inner_threads}, outputs[i], good);
        ok[i] = good;
        std::lock_guard lock(log_mutex);
        log << "[" << i + 1 << "/" << n << "] " << outcomes[i].name << (outcomes[i].passed() ? " PASS" : " FAIL");
        if (!outcomes[i].error.empty()) log << " (" << outcomes[i].error << ")";
        log << " " << outcomes[i].seconds << " s\n" << std::flush;
    };

    // Independent entries share the worker pool; the rest run one at a time with all threads.
    std::vector<std::size_t> pooled, serial;
    for (std::size_t i = 0; i < n; ++i) (cfg.entries[i].independent ? pooled : serial).push_back(i);
    if (!pooled.empty()) {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < std::min(threads, pooled.size()); ++w) {
            workers.emplace_back([&] {
                for (std::size_t k = next++; k < pooled.size(); k = next++) execute(pooled[k], 1);
            });
        }
    }
    for (std::size_t i : serial) execute(i, threads);

    // Reports are written in entry order from this thread only.
    for (std::size_t i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        const std::string file = report_name(i, outcomes[i].name);
        std::ofstream f(opts.out_dir / file, std::ios::binary);
        write_csv(f, outputs[i].table);
        if (!f) throw ConfigFailure(kUnwritableOutput, "cannot write " + (opts.out_dir / file).string());
        outcomes[i].report = file;
    }

    RunSummary summary;
    summary.entries = outcomes;
    const bool all = std::all_of(outcomes.begin(), outcomes.end(), [](const EntryOutcome& o) { return o.passed(); });
    summary.code = all ? kOk : kGatesFailed;

    const VersionInfo v = versions();
    Json m;
    m["tool"] = "fraclab";
    m["versions"] = {{"fraclab", v.fraclab}, {"eigen", v.eigen}, {"boost", v.boost}, {"fftw", v.fftw},
                     {"compiler", v.compiler}};
    m["config_sha256"] = sha256_hex(cfg.text);
    m["seed"] = seed;
    m["threads"] = threads;
    m["started"] = started;
    m["finished"] = utc_now();
    m["experiments"] = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = outcomes[i];
        Json e;
        e["name"] = o.name;
        e["report"] = o.report.empty() ? Json() : Json(o.report);
        e["params"] = cfg.entries[i].params;
        e["seconds"] = o.seconds;
        e["status"] = !o.error.empty() ? "error" : (o.passed() ? "pass" : "fail");
        if (!o.error.empty()) e["error"] = o.error;
        e["gates"] = Json::array();
        for (const auto& g : o.gates) {
            e["gates"].push_back({{"name", g.name},
                                  {"measured", g.measured},
                                  {"threshold", g.threshold},
                                  {"comparison", g.comparison == Comparison::AtMost ? "<=" : ">="},
                                  {"passed", g.passed}});
        }
        m["experiments"].push_back(e);
    }
    m["passed"] = all;
    std::ofstream mf(opts.out_dir / "manifest.json", std::ios::binary);
    mf << m.dump(2) << '\n';
    if (!mf) throw ConfigFailure(kUnwritableOutput, "cannot write manifest.json");
    return summary;
}

}  // namespace fraclab::tools
