#ifndef VRFBML_PIPELINE_HPP
#define VRFBML_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "vrfbml/config.hpp"
#include "vrfbml/csv.hpp"
#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"
#include "vrfbml/model_io.hpp"
#include "vrfbml/synthesize.hpp"
#include "vrfbml/thermal.hpp"

namespace vrfbml::cli {

namespace fs = std::filesystem;

inline fs::path ensure_output_dir(const RunConfig& cfg, const std::optional<fs::path>& override) {
    const fs::path dir = override.value_or(fs::path(cfg.output_dir));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

struct SimulateOutcome {
    fs::path csv_path;
    double mean_c = 0.0;
    double max_c = 0.0;
    std::optional<double> calibrated_r_ohm;
    std::optional<double> reference_max_c;
};

/**
 * Simulate one scenario (optionally with measurement noise) and write the
 * dataset CSV. When the scenario carries a calibration target, the stack
 * resistance of its mode is solved first so the simulated mean matches it.
 */
inline SimulateOutcome cmd_simulate(const RunConfig& cfg, const std::string& scenario_id,
                                    bool with_noise, std::optional<std::uint64_t> seed_override,
                                    std::optional<fs::path> out_dir, std::ostream& log) {
    cfg.validate();
    const ScenarioConfig& scenario = cfg.scenario(scenario_id);
    const OperatingProfile profile = scenario.profile();
    for (const auto& warning : rating_warnings(profile))
        log << "warning: scenario '" << scenario_id << "': " << warning << '\n';

    VrfbParams params = cfg.params;
    SimulateOutcome outcome;
    outcome.reference_max_c = scenario.reference_max_c;
    if (scenario.target_mean_c) {
        const double r = calibrate_resistance(params, profile, *scenario.target_mean_c, cfg.dt_s,
                                              scenario.r_max_ohm);
        if (profile.mode == Mode::Charging) {
            params.r_charge = r;
        } else {
            params.r_discharge = r;
        }
        outcome.calibrated_r_ohm = r;
        log << "scenario '" << scenario_id << "': calibrated R = " << format_double(r)
            << " ohm for target mean " << format_double(*scenario.target_mean_c) << " degC\n";
    }

    TimeSeriesDataset data;
    if (with_noise) {
        const std::uint64_t seed = seed_override.value_or(cfg.noise.seed);
        data = synthesize(params, profile, cfg.noise.sigma_c, seed, cfg.dt_s);
    } else {
        data = simulate_cycle(params, profile, cfg.dt_s).data;
    }

    double sum = 0.0, peak = data.samples.front().temperature_c;
    for (const auto& s : data.samples) {
        sum += s.temperature_c;
        peak = std::max(peak, s.temperature_c);
    }
    outcome.mean_c = sum / static_cast<double>(data.size());
    outcome.max_c = peak;

    const fs::path dir = ensure_output_dir(cfg, out_dir);
    outcome.csv_path = dir / (scenario_id + (with_noise ? ".synth.csv" : ".csv"));
    write_csv(data, outcome.csv_path);

    log << "scenario '" << scenario_id << "': " << data.size() << " samples, mean "
        << format_double(outcome.mean_c) << " degC, max " << format_double(outcome.max_c)
        << " degC";
    if (outcome.reference_max_c)
        log << " (reference max " << format_double(*outcome.reference_max_c) << " degC)";
    log << " -> " << outcome.csv_path.string() << '\n';
    return outcome;
}

struct TrainedModel {
    ModelKind kind = ModelKind::Lr;
    fs::path model_path;
    MetricsReport train_metrics;
};

/**
 * Preprocess, split and fit. Trains one model kind when given, all three
 * otherwise. The model file records the dataset hash and split settings so a
 * later evaluation reproduces the exact test partition.
 */
inline std::vector<TrainedModel> cmd_train(const RunConfig& cfg, const fs::path& dataset_path,
                                           std::optional<ModelKind> only_kind,
                                           std::optional<std::uint64_t> seed_override,
                                           std::optional<fs::path> out_dir, std::ostream& log) {
    cfg.validate();
    const std::string bytes = read_file_bytes(dataset_path);
    const TimeSeriesDataset raw = from_csv(bytes);

    PreprocessReport pre_report;
    const TimeSeriesDataset clean = preprocess(raw, cfg.preprocess, &pre_report);
    if (pre_report.dropped_non_finite || pre_report.duplicates_removed)
        log << "preprocess: dropped " << pre_report.dropped_non_finite
            << " non-finite rows, removed " << pre_report.duplicates_removed << " duplicates\n";

    const std::uint64_t seed = seed_override.value_or(cfg.split.seed);
    const SplitDataset parts = split(clean, cfg.split.ratio, seed, cfg.split.strategy);
    log << "split: " << parts.train.size() << " train / " << parts.test.size() << " test ("
        << to_string(cfg.split.strategy) << ", seed " << seed << ")\n";

    ModelProvenance provenance;
    provenance.dataset_hash = fnv1a64_hex(bytes);
    provenance.split_seed = seed;
    provenance.split_ratio = cfg.split.ratio;
    provenance.split_strategy = cfg.split.strategy;
    provenance.rebase_time = cfg.preprocess.rebase_time;

    std::vector<ModelKind> kinds;
    if (only_kind) {
        kinds.push_back(*only_kind);
    } else {
        kinds = {ModelKind::Lr, ModelKind::Svr, ModelKind::Gbt};
    }

    const fs::path dir = ensure_output_dir(cfg, out_dir);
    const std::string stem = dataset_path.stem().string();

    std::vector<TrainedModel> outcomes;
    for (ModelKind kind : kinds) {
        RegressionModel model{LinearModel{}};
        switch (kind) {
        case ModelKind::Lr: model = fit_lr(parts.train); break;
        case ModelKind::Svr: {
            SvrModel svr = fit_svr(parts.train, cfg.svr);
            if (!svr.training.converged)
                log << "warning: svr did not converge within " << cfg.svr.max_passes
                    << " passes (KKT violation " << format_double(svr.training.kkt_violation)
                    << ")\n";
            model = std::move(svr);
            break;
        }
        case ModelKind::Gbt: model = fit_gbt(parts.train, cfg.gbt); break;
        }
        TrainedModel out;
        out.kind = kind;
        out.model_path = dir / (stem + "." + to_string(kind) + ".model.json");
        save_model(model, out.model_path, provenance);
        out.train_metrics = evaluate(model, parts.train);
        log << to_string(kind) << ": train R2 " << format_double(out.train_metrics.r2)
            << ", MAE " << format_double(out.train_metrics.mae) << ", RMSE "
            << format_double(out.train_metrics.rmse) << " -> " << out.model_path.string() << '\n';
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

enum class Partition { Train, Test };

inline std::string to_string(Partition p) { return p == Partition::Train ? "train" : "test"; }

namespace pipeline_detail {

using json = nlohmann::json;

inline json scenario_to_json(const ScenarioMeta& meta) {
    json j = {{"current_a", meta.current_a}, {"mode", to_string(meta.mode)},
              {"flow_l_min", meta.flow_l_min}, {"ambient_c", meta.ambient_c},
              {"source", to_string(meta.source)}};
    j["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
    return j;
}

inline ScenarioMeta scenario_from_json(const json& j) {
    ScenarioMeta meta;
    meta.current_a = j.at("current_a").get<double>();
    meta.mode = mode_from_string(j.at("mode").get<std::string>());
    meta.flow_l_min = j.at("flow_l_min").get<double>();
    meta.ambient_c = j.at("ambient_c").get<double>();
    meta.source = data_source_from_string(j.at("source").get<std::string>());
    if (!j.at("seed").is_null()) meta.seed = j.at("seed").get<std::uint64_t>();
    return meta;
}

} // namespace pipeline_detail

struct EvaluateOutcome {
    MetricsReport report;
    Partition partition = Partition::Test;
    fs::path metrics_path;
};

/**
 * Reproduce the recorded split for a trained model and score it on the test
 * (or, on request, train) partition, emitting a metrics JSON row for
 * cmd_report. Refuses datasets whose bytes differ from the training-time
 * hash.
 */
inline EvaluateOutcome cmd_evaluate(const RunConfig& cfg, const fs::path& model_path,
                                    const fs::path& dataset_path, Partition partition,
                                    std::optional<fs::path> out_dir, std::ostream& log) {
    cfg.validate();
    const LoadedModel loaded = load_model(model_path);
    if (!loaded.provenance)
        throw DataError("model file '" + model_path.string() +
                        "' carries no split provenance; retrain it via the train command");
    const ModelProvenance& prov = *loaded.provenance;

    const std::string bytes = read_file_bytes(dataset_path);
    const std::string hash = fnv1a64_hex(bytes);
    if (hash != prov.dataset_hash)
        throw DataError("split-provenance mismatch: dataset '" + dataset_path.string() +
                        "' hashes to " + hash + " but the model was trained on " +
                        prov.dataset_hash);

    PreprocessOptions pre;
    pre.rebase_time = prov.rebase_time;
    const TimeSeriesDataset clean = preprocess(from_csv(bytes), pre);
    const SplitDataset parts = split(clean, prov.split_ratio, prov.split_seed,
                                     prov.split_strategy);
    const TimeSeriesDataset& subject = partition == Partition::Test ? parts.test : parts.train;

    EvaluateOutcome outcome;
    outcome.partition = partition;
    outcome.report = evaluate(loaded.model, subject);

    const fs::path dir = ensure_output_dir(cfg, out_dir);
    outcome.metrics_path =
        dir / (dataset_path.stem().string() + "." + to_string(outcome.report.model_kind) + "." +
               to_string(partition) + ".metrics.json");

    using pipeline_detail::json;
    json body = {{"format_version", 1},
                 {"model_kind", to_string(outcome.report.model_kind)},
                 {"partition", to_string(partition)},
                 {"n", outcome.report.n},
                 {"r2", outcome.report.r2},
                 {"mae", outcome.report.mae},
                 {"rmse", outcome.report.rmse},
                 {"mean_actual_c", outcome.report.mean_actual},
                 {"mean_predicted_c", outcome.report.mean_predicted},
                 {"rel_err_pct", outcome.report.rel_err_pct},
                 {"scenario", pipeline_detail::scenario_to_json(outcome.report.scenario)}};
    std::ofstream file(outcome.metrics_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + outcome.metrics_path.string() + "' for writing");
    file << body.dump(2) << '\n';

    log << to_string(outcome.report.model_kind) << " on " << to_string(partition) << ": R2 "
        << format_double(outcome.report.r2) << ", MAE " << format_double(outcome.report.mae)
        << ", RMSE " << format_double(outcome.report.rmse) << " -> "
        << outcome.metrics_path.string() << '\n';
    return outcome;
}

/**
 * Merge per-model metrics files into one comparison table: one row per
 * (current, mode, partition), model-by-metric columns, plus a mean
 * temperature comparison section. Missing cells are left blank with a
 * warning.
 */
inline fs::path cmd_report(const RunConfig& cfg, const std::vector<fs::path>& metrics_files,
                           std::optional<fs::path> out_dir, std::ostream& log) {
    if (metrics_files.empty()) throw ConfigError("report: no metrics files given");
    using pipeline_detail::json;

    struct Entry {
        ModelKind kind;
        double r2, mae, rmse;
        double mean_actual, mean_predicted, rel_err_pct;
    };
    // (current, mode string, partition string) -> kind -> entry
    std::map<std::tuple<double, std::string, std::string>, std::map<int, Entry>> grid;

    for (const fs::path& path : metrics_files) {
        std::ifstream file(path, std::ios::binary);
        if (!file) throw IoError("cannot open metrics file '" + path.string() + "'");
        json body;
        try {
            body = json::parse(file);
        } catch (const json::exception& e) {
            throw DataError("metrics file '" + path.string() + "' is not valid JSON: " + e.what());
        }
        try {
            Entry entry;
            entry.kind = model_kind_from_string(body.at("model_kind").get<std::string>());
            entry.r2 = body.at("r2").get<double>();
            entry.mae = body.at("mae").get<double>();
            entry.rmse = body.at("rmse").get<double>();
            entry.mean_actual = body.at("mean_actual_c").get<double>();
            entry.mean_predicted = body.at("mean_predicted_c").get<double>();
            entry.rel_err_pct = body.at("rel_err_pct").get<double>();
            const ScenarioMeta meta = pipeline_detail::scenario_from_json(body.at("scenario"));
            const std::string partition = body.at("partition").get<std::string>();
            grid[{meta.current_a, to_string(meta.mode), partition}]
                [static_cast<int>(entry.kind)] = entry;
        } catch (const json::exception& e) {
            throw DataError("metrics file '" + path.string() + "' is missing fields: " +
                            e.what());
        }
    }

    std::string out;
    out += "# vrfb-report v1\n";
    out += "current_a,mode,partition,lr_r2,lr_mae,lr_rmse,svr_r2,svr_mae,svr_rmse,"
           "gbt_r2,gbt_mae,gbt_rmse\n";
    const ModelKind order[] = {ModelKind::Lr, ModelKind::Svr, ModelKind::Gbt};
    for (const auto& [key, models] : grid) {
        out += format_double(std::get<0>(key)) + "," + std::get<1>(key) + "," + std::get<2>(key);
        for (ModelKind kind : order) {
            const auto it = models.find(static_cast<int>(kind));
            if (it == models.end()) {
                out += ",,,";
                log << "warning: no " << to_string(kind) << " metrics for "
                    << format_double(std::get<0>(key)) << " A " << std::get<1>(key) << " ("
                    << std::get<2>(key) << ")\n";
            } else {
                out += "," + format_double(it->second.r2) + "," + format_double(it->second.mae) +
                       "," + format_double(it->second.rmse);
            }
        }
        out += "\n";
    }
    out += "# mean temperature comparison, rel_err_pct = (actual - predicted) / actual * 100\n";
    out += "current_a,mode,partition,model,mean_actual_c,mean_predicted_c,rel_err_pct\n";
    for (const auto& [key, models] : grid) {
        for (ModelKind kind : order) {
            const auto it = models.find(static_cast<int>(kind));
            if (it == models.end()) continue;
            out += format_double(std::get<0>(key)) + "," + std::get<1>(key) + "," +
                   std::get<2>(key) + "," + to_string(kind) + "," +
                   format_double(it->second.mean_actual) + "," +
                   format_double(it->second.mean_predicted) + "," +
                   format_double(it->second.rel_err_pct) + "\n";
        }
    }

    const fs::path dir = ensure_output_dir(cfg, out_dir);
    const fs::path report_path = dir / "report.csv";
    std::ofstream file(report_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + report_path.string() + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    log << "report: " << grid.size() << " scenario rows -> " << report_path.string() << '\n';
    return report_path;
}

} // namespace vrfbml::cli

#endif // VRFBML_PIPELINE_HPP
