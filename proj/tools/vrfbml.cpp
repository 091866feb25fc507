// vrfbml command line front end: simulate or synthesize datasets, train the
// three regressors, evaluate them on the persisted split, and assemble
// comparison reports. Logs go to stderr; artifacts go to the output
// directory only.
//
// Exit codes: 0 success, 2 configuration/usage, 3 simulation, 4 data,
// 5 training.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrfbml/config.hpp"
#include "vrfbml/csv.hpp"
#include "vrfbml/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitData = 4;
constexpr int kExitTraining = 5;

std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return flag_seed;
    if (const char* env = std::getenv("VRFBML_SEED")) {
        return vrfbml::parse_u64_token(env, "VRFBML_SEED");
    }
    return std::nullopt;
}

vrfbml::RunConfig resolve_config(const std::string& config_path) {
    if (config_path.empty()) return vrfbml::default_config();
    return vrfbml::load_config(config_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"VRFB electrolyte temperature simulation and regression toolkit"};
    app.require_subcommand(0, 1);
    app.fallthrough(); // global options may follow the subcommand

    std::string config_path;
    app.add_option("--config", config_path, "Configuration file (JSON); defaults are built in");
    bool print_defaults = false;
    app.add_flag("--print-default-config", print_defaults,
                 "Print the built-in configuration as JSON and exit");

    std::string scenario_id;
    std::string model_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string partition_name = "test";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "Output directory (overrides config output_dir)");
        cmd->add_option("--seed", seed, "Seed override (also via VRFBML_SEED)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario and write its CSV");
    simulate->add_option("--scenario", scenario_id, "Scenario id from the config")->required();
    add_common(simulate);

    CLI::App* synth = app.add_subcommand(
        "synth", "Run one scenario with measurement noise and write its CSV");
    synth->add_option("--scenario", scenario_id, "Scenario id from the config")->required();
    add_common(synth);

    CLI::App* train = app.add_subcommand("train", "Fit models to a dataset CSV");
    std::string train_dataset;
    train->add_option("dataset", train_dataset, "Dataset CSV path")->required();
    train->add_option("--model", model_name, "Train one kind only: lr|svr|gbt");
    add_common(train);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a trained model on its split");
    std::string eval_model, eval_dataset;
    evaluate->add_option("model", eval_model, "Model file path")->required();
    evaluate->add_option("dataset", eval_dataset, "Dataset CSV path")->required();
    evaluate->add_option("--partition", partition_name, "Partition to score: test|train")
        ->check(CLI::IsMember({"test", "train"}));
    add_common(evaluate);

    CLI::App* report = app.add_subcommand("report", "Merge metrics files into a comparison table");
    std::vector<std::string> metrics_files;
    report->add_option("metrics", metrics_files, "Metrics JSON files from evaluate");
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            return app.exit(e);
        }
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (print_defaults) {
            std::cout << vrfbml::config_to_json(vrfbml::default_config()).dump(2) << '\n';
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help() << '\n';
            return kExitConfig;
        }

        const vrfbml::RunConfig cfg = resolve_config(config_path);
        const std::optional<std::uint64_t> seed_override = resolve_seed(seed);
        std::optional<std::filesystem::path> out_override;
        if (!out_dir.empty()) out_override = out_dir;

        if (simulate->parsed() || synth->parsed()) {
            vrfbml::cli::cmd_simulate(cfg, scenario_id, synth->parsed(), seed_override,
                                      out_override, std::cerr);
        } else if (train->parsed()) {
            std::optional<vrfbml::ModelKind> kind;
            if (!model_name.empty()) kind = vrfbml::model_kind_from_string(model_name);
            vrfbml::cli::cmd_train(cfg, train_dataset, kind, seed_override, out_override,
                                   std::cerr);
        } else if (evaluate->parsed()) {
            const auto partition = partition_name == "train" ? vrfbml::cli::Partition::Train
                                                             : vrfbml::cli::Partition::Test;
            vrfbml::cli::cmd_evaluate(cfg, eval_model, eval_dataset, partition, out_override,
                                      std::cerr);
        } else if (report->parsed()) {
            std::vector<std::filesystem::path> paths(metrics_files.begin(), metrics_files.end());
            vrfbml::cli::cmd_report(cfg, paths, out_override, std::cerr);
        }
        return 0;
    } catch (const vrfbml::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const vrfbml::TrainingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTraining;
    } catch (const vrfbml::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const vrfbml::SimulationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSimulation;
    } catch (const vrfbml::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSimulation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
