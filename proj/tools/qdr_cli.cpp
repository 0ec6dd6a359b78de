// Command-line runner for the credit-default experiments.
//
//   qdr run <config.json>      execute an experiment and write its report
//   qdr synth ...              generate a synthetic CSV dataset
//   qdr project <config.json>  emit the projected-feature CSVs only
//   qdr report <run-dir>       re-render the tables from an archived report
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qdr/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hybrid quantum-classical credit default pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    run_cmd->add_option("config", config_path, "experiment config (json)")->required();
    run_cmd->add_option("--output", output_override, "override the output directory");

    qdr::synthetic_spec synth;
    std::string synth_out = "synthetic.csv";
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    synth_cmd->add_option("--rows", synth.num_rows, "number of rows")->required();
    synth_cmd->add_option("--features", synth.num_features, "number of features")->required();
    synth_cmd->add_option("--positive-fraction", synth.positive_fraction,
                          "fraction of positive labels");
    synth_cmd->add_option("--missing-fraction", synth.missing_fraction,
                          "fraction of missing cells");
    synth_cmd->add_option("--seed", synth.seed, "generator seed")->required();
    synth_cmd->add_option("--output", synth_out, "output CSV path");

    std::string project_config;
    auto* project_cmd =
        app.add_subcommand("project", "emit projected-feature CSVs for a config");
    project_cmd->add_option("config", project_config, "experiment config (json)")->required();

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "re-render tables from a run directory");
    report_cmd->add_option("run_dir", report_dir, "directory containing report.json")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            auto cfg = qdr::load_config(config_path);
            if (!output_override.empty()) cfg.output_dir = output_override;
            const auto report = qdr::run_experiment(cfg);
            qdr::emit_report(report, cfg.output_dir);
            std::cout << report.rendered_tables;
            std::cout << "report written to " << cfg.output_dir << " ("
                      << qdr::detail::format4(report.wall_time_seconds) << " s)\n";
        } else if (*synth_cmd) {
            const auto data = qdr::generate_synthetic(synth);
            qdr::save_csv(data, synth_out);
            std::cout << "wrote " << data.num_rows << " rows x " << data.num_features
                      << " features (" << data.positives() << " positives) to " << synth_out
                      << "\n";
        } else if (*project_cmd) {
            auto cfg = qdr::load_config(project_config);
            cfg.export_pqf_csv = true;
            // Restrict to one quantum model; the projection does not need the
            // classical stack or the search grid.
            cfg.quantum_seeds.resize(1);
            cfg.classical_seeds.resize(1);
            cfg.alpha_grid.resize(1);
            cfg.quantum_eta_grid.resize(1);
            cfg.classical_eta_grid.resize(1);
            const auto report = qdr::run_experiment(cfg);
            qdr::emit_report(report, cfg.output_dir);
            std::cout << "projected features written to " << cfg.output_dir
                      << "/pqf_train.csv and pqf_test.csv\n";
        } else if (*report_cmd) {
            std::ifstream in(report_dir + "/report.json");
            if (!in) throw qdr::validation_error("cannot open " + report_dir + "/report.json");
            qdr::json file;
            in >> file;
            std::cout << qdr::render_tables(file.at("body"));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
