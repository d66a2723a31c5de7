#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fraclab/tools/runner.hpp"

using namespace fraclab::tools;

namespace {

std::string comparison_text(Comparison c) { return c == Comparison::AtMost ? "<=" : ">="; }

void print_list(bool as_json) {
    if (as_json) {
        Json all = Json::array();
        for (const auto& e : registry()) {
            Json j{{"name", e.name}, {"description", e.description}, {"params", Json::object()}, {"gates", Json::object()}};
            for (const auto& p : e.params) j["params"][p.name] = {{"default", p.default_value}, {"help", p.help}};
            for (const auto& g : e.gates) {
                j["gates"][g.name] = {{"threshold", g.threshold}, {"comparison", comparison_text(g.comparison)}, {"help", g.help}};
            }
            all.push_back(j);
        }
        std::cout << all.dump(2) << '\n';
        return;
    }
    for (const auto& e : registry()) {
        std::cout << e.name << "\n    " << e.description << '\n';
        for (const auto& p : e.params) std::cout << "    param " << p.name << " = " << p.default_value.dump() << "  (" << p.help << ")\n";
        for (const auto& g : e.gates) {
            std::cout << "    gate  " << g.name << ' ' << comparison_text(g.comparison) << ' ' << g.threshold << "  (" << g.help << ")\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab: batch runner for fractional-Laplacian experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "fraclab-out";
    std::size_t threads = 1;
    std::uint64_t seed = 0;
    bool list_json = false;

    auto* run = app.add_subcommand("run", "run the experiments of a config file");
    run->add_option("config", config_path, "JSON config")->required();
    run->add_option("--out", out_dir, "output directory")->envname("FRACLAB_OUT");
    run->add_option("--threads", threads, "worker threads")->envname("FRACLAB_THREADS")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "random seed (overrides the config)");

    auto* check = app.add_subcommand("check", "validate a config file without running it");
    check->add_option("config", config_path, "JSON config")->required();

    auto* list = app.add_subcommand("list", "list the available experiments");
    list->add_flag("--json", list_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    if (list->parsed()) {
        print_list(list_json);
        return kOk;
    }
    try {
        const Config cfg = load_config(config_path);
        if (check->parsed()) {
            std::cout << config_path << ": " << cfg.entries.size() << " experiment(s), valid\n";
            return kOk;
        }
        RunOptions opts;
        opts.out_dir = out_dir;
        opts.threads = threads;
        if (seed_opt->count() > 0) opts.seed = seed;
        const RunSummary s = run_config(cfg, opts, std::cerr);
        std::size_t passed = 0;
        for (const auto& e : s.entries) passed += e.passed() ? 1 : 0;
        std::cout << passed << "/" << s.entries.size() << " experiment(s) passed; reports in " << out_dir << '\n';
        return s.code;
    } catch (const ConfigFailure& e) {
        std::cerr << "fraclab: " << e.what() << '\n';
        return e.code();
    }
}
