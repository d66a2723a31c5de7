#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <fraclab/tools/report.hpp>
#include <fraclab/tools/runner.hpp>

using namespace fraclab::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch_root() { return fs::temp_directory_path() / ("fraclab-cli-test-" + std::to_string(::getpid())); }

struct Cleanup {
    ~Cleanup() {
        std::error_code ec;
        fs::remove_all(scratch_root(), ec);
    }
} cleanup;

fs::path scratch(const std::string& name) {
    const fs::path p = scratch_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + FRACLAB_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kCrossValidate = R"({"experiments": [{"name": "cross-validate", "params": {"a": 0.5}}]})";

const char* kMonteCarlo = R"({
  "seed": 3,
  "experiments": [
    {"name": "mc-free", "params": {"a": [0.5], "paths": 2000, "t": [0.5]}, "independent": true},
    {"name": "mc-free", "params": {"a": [0.25], "paths": 2000, "omega": [1.5]}, "independent": true},
    {"name": "normalization", "params": {"a": 0.5}}
  ]
})";

}  // namespace

TEST_CASE("CSV formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1e-20) == "9.9999999999999995e-21");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::stod(format_double(1.0 / 3.0))) == format_double(1.0 / 3.0));
    CHECK(quote_field("plain") == "plain");
    CHECK(quote_field("a,b") == "\"a,b\"");
    CHECK(quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(quote_field("two\nlines") == "\"two\nlines\"");
    CHECK(format_cell(Cell{std::int64_t{-4}}) == "-4");
    CHECK(format_cell(Cell{true}) == "true");

    Table t({"name", "value"});
    t.add_row({std::string("x,y"), 2.5});
    CHECK_THROWS(t.add_row({1.0}));
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() == "name,value\r\n\"x,y\",2.5\r\n");
}

TEST_CASE("SHA-256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("experiment registry and parameter validation") {
    const auto& reg = registry();
    CHECK(reg.size() >= 11);
    for (std::size_t i = 1; i < reg.size(); ++i) CHECK(reg[i - 1].name < reg[i].name);
    REQUIRE(find_experiment("cross-validate") != nullptr);
    CHECK(find_experiment("no-such-thing") == nullptr);

    const auto& cv = *find_experiment("cross-validate");
    const Json p = resolve_params(cv, Json{{"a", 0.5}});
    CHECK(p["a"] == 0.5);
    CHECK(p["points"] == 1025);
    CHECK_THROWS_AS(resolve_params(cv, Json{{"a", 1.5}}), ConfigError);
    CHECK_THROWS_AS(resolve_params(cv, Json{{"a", 0.0}}), ConfigError);
    CHECK_THROWS_AS(resolve_params(cv, Json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(resolve_gates(cv, Json{{"bogus", 1}}), ConfigError);

    CHECK(gate_passes(Comparison::AtMost, 1.0, 1.0));
    CHECK_FALSE(gate_passes(Comparison::AtMost, 1.5, 1.0));
    CHECK(gate_passes(Comparison::AtLeast, 1.5, 1.0));
    CHECK_FALSE(gate_passes(Comparison::AtMost, std::numeric_limits<double>::quiet_NaN(), 1.0));
}

TEST_CASE("config parsing") {
    CHECK(parse_config(R"({"experiments": []})").entries.empty());
    CHECK(parse_config(R"({"seed": 9, "experiments": []})").seed == 9u);
    const auto code = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigFailure& e) {
            return static_cast<int>(e.code());
        }
        return 0;
    };
    CHECK(code("not json") == kInvalidConfig);
    CHECK(code(R"({"experiments": {}})") == kInvalidConfig);
    CHECK(code(R"({"experiments": [], "extra": 1})") == kInvalidConfig);
    CHECK(code(R"({"seed": -1, "experiments": []})") == kInvalidConfig);
    CHECK(code(R"({"experiments": [{"name": "cross-validate", "params": {"a": 1.5}}]})") == kInvalidConfig);
    CHECK(code(R"({"experiments": [{"name": "cross-validate", "independent": 1}]})") == kInvalidConfig);
    CHECK(code(R"({"experiments": [{"name": "nope"}]})") == kUnknownExperiment);
}

TEST_CASE("run: a passing experiment writes a report and a manifest") {
    const auto dir = scratch("pass");
    const auto cfg = write_config(dir, kCrossValidate);
    CHECK(cli("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"") == kOk);
    const std::string csv = read(dir / "out" / "01-cross-validate.csv");
    CHECK(csv.rfind("a,", 0) == 0);
    CHECK(csv.find("\r\n") != std::string::npos);
    const Json m = Json::parse(read(dir / "out" / "manifest.json"));
    CHECK(m["passed"] == true);
    CHECK(m["config_sha256"] == sha256_hex(kCrossValidate));
    CHECK(m["experiments"].size() == 1);
    CHECK(m["experiments"][0]["status"] == "pass");
    CHECK(m["experiments"][0]["report"] == "01-cross-validate.csv");
    CHECK(m["versions"].contains("eigen"));
    CHECK(cli("check \"" + cfg.string() + "\"") == kOk);
}

TEST_CASE("run: failing gates give exit code 1") {
    const auto dir = scratch("gates");
    const auto cfg = write_config(
        dir, R"({"experiments": [{"name": "cross-validate", "params": {"a": 0.5}, "acceptance": {"max_relative_discrepancy": 1e-30}}]})");
    CHECK(cli("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"") == kGatesFailed);
    const Json m = Json::parse(read(dir / "out" / "manifest.json"));
    CHECK(m["experiments"][0]["status"] == "fail");
    CHECK(m["experiments"][0]["gates"][0]["passed"] == false);
}

TEST_CASE("run: error exit codes") {
    const auto dir = scratch("errors");
    const auto bad_order = write_config(dir, R"({"experiments": [{"name": "cross-validate", "params": {"a": 1.5}}]})");
    CHECK(cli("run \"" + bad_order.string() + "\" --out \"" + (dir / "o1").string() + "\"") == kInvalidConfig);
    CHECK(cli("check \"" + bad_order.string() + "\"") == kInvalidConfig);
    CHECK_FALSE(fs::exists(dir / "o1"));

    const auto unknown = write_config(dir, R"({"experiments": [{"name": "warp-drive"}]})");
    CHECK(cli("run \"" + unknown.string() + "\" --out \"" + (dir / "o2").string() + "\"") == kUnknownExperiment);

    const auto good = write_config(dir, kCrossValidate);
    std::ofstream(dir / "blocker") << "a file, not a directory";
    CHECK(cli("run \"" + good.string() + "\" --out \"" + (dir / "blocker" / "sub").string() + "\"") == kUnwritableOutput);

    CHECK(cli("") == kUsage);
    CHECK(cli("run") == kUsage);
    CHECK(cli("frobnicate") == kUsage);
    CHECK(cli("run \"" + good.string() + "\" --threads 0") == kUsage);
    CHECK(cli("run \"" + (dir / "missing.json").string() + "\"") == kInvalidConfig);
    CHECK(cli("list") == kOk);
    CHECK(cli("list --json") == kOk);
}

TEST_CASE("run: an empty experiment list succeeds with an empty manifest") {
    const auto dir = scratch("empty");
    const auto cfg = write_config(dir, R"({"experiments": []})");
    CHECK(cli("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"") == kOk);
    const Json m = Json::parse(read(dir / "out" / "manifest.json"));
    CHECK(m["experiments"].empty());
    CHECK(m["passed"] == true);
}

TEST_CASE("run: reports are byte-identical across runs and thread counts") {
    const auto dir = scratch("repro");
    const auto cfg = write_config(dir, kMonteCarlo);
    const std::string c = "run \"" + cfg.string() + "\" --out \"";
    REQUIRE(cli(c + (dir / "a").string() + "\" --threads 1") == kOk);
    REQUIRE(cli(c + (dir / "b").string() + "\" --threads 3") == kOk);
    REQUIRE(cli(c + (dir / "c").string() + "\" --threads 2") == kOk);
    for (const char* f : {"01-mc-free.csv", "02-mc-free.csv", "03-normalization.csv"}) {
        CAPTURE(f);
        const std::string ref = read(dir / "a" / f);
        CHECK_FALSE(ref.empty());
        CHECK(read(dir / "b" / f) == ref);
        CHECK(read(dir / "c" / f) == ref);
    }
    // A different seed changes the Monte Carlo report.
    REQUIRE(cli(c + (dir / "d").string() + "\" --seed 4") == kOk);
    CHECK(read(dir / "d" / "01-mc-free.csv") != read(dir / "a" / "01-mc-free.csv"));
    CHECK(Json::parse(read(dir / "d" / "manifest.json"))["seed"] == 4);
}

TEST_CASE("run: environment overrides") {
    const auto dir = scratch("env");
    const auto cfg = write_config(dir, R"({"experiments": []})");
    const std::string env_out = (dir / "from-env").string();
    const std::string flag_out = (dir / "from-flag").string();
    const std::string base = std::string("\"") + FRACLAB_CLI_PATH + "\" run \"" + cfg.string() + "\"";
    CHECK(std::system(("FRACLAB_OUT=\"" + env_out + "\" FRACLAB_THREADS=2 " + base + " >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(fs::path(env_out) / "manifest.json"));
    CHECK(Json::parse(read(fs::path(env_out) / "manifest.json"))["threads"] == 2);
    // The flag wins over the environment.
    CHECK(std::system(("FRACLAB_OUT=\"" + env_out + "-x\" " + base + " --out \"" + flag_out + "\" >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(fs::path(flag_out) / "manifest.json"));
    CHECK_FALSE(fs::exists(fs::path(env_out + "-x")));
}
