// qam.cpp — Command-line runner for absorption machine simulations

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qam/qam.hpp"
#include "qam_presets.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 2, kSolverError = 3, kPhysicsFlag = 4 };

struct Common {
    std::string config_path;
    std::string preset;
    std::string output;
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
    auto* cfg = sub->add_option("--config", c.config_path, "JSON run configuration");
    auto* pre = sub->add_option("--preset", c.preset, "Built-in configuration")
                    ->check(CLI::IsMember({"fig5-local", "fig5-global", "fig7", "fig9", "fig10a", "fig10b", "fig10c"}));
    cfg->excludes(pre);
    sub->add_option("--output", c.output, "Output path (CSV, or JSON for steady); '-' for stdout");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_given = true; }, "Override the configured seed");
    sub->add_option("--threads", c.threads, "Worker threads (0: hardware concurrency)");
}

std::string load_text(const Common& c) {
    if (!c.preset.empty()) return std::string(qam::presets::find(c.preset));
    if (c.config_path.empty()) throw qam::ConfigError("", "no configuration given (use --config or --preset)");
    std::ifstream in(c.config_path);
    if (!in) throw qam::ConfigError("", "cannot read " + c.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

qam::RunConfig load_config(const Common& c) {
    qam::RunConfig cfg = qam::parse_config(load_text(c));
    if (c.seed_given) cfg.seed = c.seed;
    if (!c.output.empty()) cfg.output = c.output;
    return cfg;
}

std::string summary_path(const std::string& csv) {
    std::filesystem::path p(csv);
    p.replace_extension(".summary.json");
    return p.string();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qam::ConfigError("/output", "cannot write " + path);
    out << text;
}

int execute(const Common& c, qam::RunMode expected) {
    const qam::RunConfig cfg = load_config(c);
    if (cfg.run.mode != expected)
        throw qam::ConfigError("/run/mode", std::string("this subcommand runs mode '") + qam::to_string(expected) +
                                                "', config has '" + qam::to_string(cfg.run.mode) + "'");
    const qam::RunOutput out = qam::run(cfg, c.threads);

    nlohmann::json summary = out.summary;
    summary["config_hash"] = qam::hex64(qam::config_hash(cfg));
    summary["seed"] = cfg.seed;
    summary["laws_ok"] = out.laws_ok;

    if (expected == qam::RunMode::steady) {
        write_text(cfg.output, summary.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        qam::write_csv(csv, out.table, qam::config_hash(cfg), cfg.seed);
        write_text(cfg.output, csv.str());
        const std::string side = cfg.output.empty() || cfg.output == "-" ? "" : summary_path(cfg.output);
        if (side.empty())
            std::cerr << summary.dump(2) << "\n";
        else
            write_text(side, summary.dump(2) + "\n");
    }
    if (!out.laws_ok) {
        std::cerr << "physics check failed; see summary\n";
        return kPhysicsFlag;
    }
    return kOk;
}

int validate(const Common& c) {
    const qam::RunConfig cfg = load_config(c);
    std::cout << qam::to_json(cfg).dump(2) << "\n";
    std::cerr << "config_hash=" << qam::hex64(qam::config_hash(cfg)) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum absorption machine simulator"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        qam::RunMode mode;
    };
    const Sub subs[] = {
        {"steady", "Steady-state report with law checks (JSON)", qam::RunMode::steady},
        {"fridge-sweep", "Refrigerator performance sweep over omega_c", qam::RunMode::sweep},
        {"transient", "Cold-qubit temperature dynamics", qam::RunMode::transient},
        {"engine", "N-cycle efficiency and power of the engine with a ladder load", qam::RunMode::engine_walk},
        {"clock", "Accuracy, resolution and power scans of the thermal clock", qam::RunMode::clock},
    };

    Common common;
    int status = kOk;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, common);
        const qam::RunMode mode = s.mode;
        sub->callback([&common, &status, mode] { status = execute(common, mode); });
    }
    auto* val = app.add_subcommand("validate-config", "Parse, validate and print the canonical configuration");
    add_common(val, common);
    val->callback([&common, &status] { status = validate(common); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    } catch (const qam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const qam::NumericalError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolverError;
    } catch (const qam::DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kConfigError;
    }
    return status;
}
