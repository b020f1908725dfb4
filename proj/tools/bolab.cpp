// bolab: command-line front end for the soliton laboratory.
//
//   bolab <experiment> [--config file] [--out dir] [--seed N] [--override k=v]...
//   bolab report --out dir

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bo/lab.hpp"

namespace {

int run_one(const std::string& experiment, const std::string& config_file,
            const std::string& out_dir, const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed) {
    bo::ExperimentConfig cfg = bo::ExperimentConfig::defaults(experiment);
    if (!config_file.empty()) cfg.load_file(config_file);
    cfg.set("experiment", experiment);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "bad --override (want key=value): " << kv << "\n";
            return 2;
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.set("seed", std::to_string(*seed));

    const std::filesystem::path dir = out_dir.empty() ? ("out-" + experiment) : out_dir;
    std::filesystem::create_directories(dir);
    bo::RunManifest man = bo::run_experiment(cfg, dir);
    std::cout << "experiment: " << man.experiment << "\noutcome:    " << man.outcome << "\n";
    for (const auto& [k, v] : man.summary) std::cout << "  " << k << " = " << v << "\n";
    std::cout << "manifest:   " << (dir / "manifest.json").string() << "\n";
    return man.outcome == "blowup" ? 1 : 0;
}

int report(const std::string& out_dir) {
    const std::filesystem::path p = std::filesystem::path(out_dir) / "manifest.json";
    std::ifstream in(p);
    if (!in) {
        std::cerr << "no manifest at " << p << "\n";
        return 2;
    }
    nlohmann::json j;
    in >> j;
    std::cout << "experiment: " << j.value("experiment", "?") << "\n"
              << "outcome:    " << j.value("outcome", "?") << "\n"
              << "version:    " << j.value("code_version", "?") << "\n"
              << "started:    " << j.value("started_at", "?") << "\n"
              << "finished:   " << j.value("finished_at", "?") << "\n";
    if (j.contains("summary"))
        for (auto& [k, v] : j["summary"].items()) std::cout << "  " << k << " = " << v << "\n";
    if (j.contains("outputs"))
        for (auto& o : j["outputs"])
            std::cout << "  output " << o.value("path", "?") << "  fnv1a=" << o.value("checksum", "?")
                      << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benjamin-Ono soliton laboratory"};
    app.require_subcommand(1);

    std::string config_file, out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;

    const std::vector<std::string> experiments = {"simulate",     "spectrum",     "monotonicity",
                                                  "stability",    "multisoliton", "identities"};
    // map CLI names onto experiment tags
    auto tag_of = [](const std::string& name) -> std::string {
        if (name == "simulate") return "soliton_translate";
        if (name == "monotonicity") return "monotonicity_sweep";
        if (name == "identities") return "identity_suite";
        return name;
    };

    std::map<std::string, CLI::App*> subs;
    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(name, "run the " + tag_of(name) + " experiment");
        sub->add_option("--config", config_file, "flat key=value config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--override", overrides, "key=value override (repeatable)");
        subs[name] = sub;
    }
    CLI::App* rep = app.add_subcommand("report", "summarize a finished run");
    rep->add_option("--out", out_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) return report(out_dir);
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) return run_one(tag_of(name), config_file, out_dir, overrides, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
