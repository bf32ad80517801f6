#include "npnslab/cli/config.hpp"
#include "npnslab/cli/experiment.hpp"
#include "npnslab/core/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_eps(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw npnslab::InputError("--eps: malformed entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace npnslab;
    CLI::App app{"npns_lab: epsilon-sweeps for the Nernst-Planck-Navier-Stokes system and its quasi-neutral limit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset, eps;
    bool strict = false;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", config_path, "key=value configuration file");
        sc->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sc->add_option("--preset", preset, "preset name (overrides the file)");
        sc->add_option("--eps", eps, "comma-separated epsilon list (overrides [sweep] eps_list)");
        sc->add_flag("--strict", strict, "escalate warnings to errors");
    };
    auto* run = app.add_subcommand("run", "run the preset at a single epsilon ([params] eps or the first --eps)");
    auto* sweep = app.add_subcommand("sweep", "run the preset over the epsilon list");
    auto* report = app.add_subcommand("report", "refit sweep.csv in --out and rewrite report.json");
    for (auto* sc : {run, sweep, report}) add_common(sc);

    CLI11_PARSE(app, argc, argv);

    try {
        cli::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = cli::parse_config(config_path);
            if (!preset.empty()) {
                // Preset override keeps explicit settings of the file.
                const auto p = cli::preset_from_string(preset);
                if (p != cfg.preset) {
                    std::cerr << "note: --preset replaces the file preset; file values are kept\n";
                    cfg.preset = p;
                }
            }
        } else {
            cfg = cli::preset_defaults(preset.empty() ? cli::Preset::custom : cli::preset_from_string(preset));
        }
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!eps.empty()) cfg.eps_list = parse_eps(eps);
        if (strict) cfg.strict = true;
        if (run->parsed()) cfg.eps_list = {eps.empty() ? cfg.eps : cfg.eps_list.front()};
        if (cfg.preset == cli::Preset::energy_identity || cfg.preset == cli::Preset::initial_layer_decay)
            cfg.eps = cfg.eps_list.front();
        cli::validate_config(cfg);

        const int status = report->parsed() ? cli::report_from_dir(cfg, cfg.output_dir)
                                            : cli::run_experiment(cfg, cfg.output_dir);
        std::cout << "preset " << cli::to_string(cfg.preset) << ": " << (status == 0 ? "pass" : "FAIL")
                  << " (artifacts in " << cfg.output_dir << ")\n";
        return status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
