#ifndef VRFBML_CONFIG_HPP
#define VRFBML_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"
#include "vrfbml/gbt.hpp"
#include "vrfbml/params.hpp"
#include "vrfbml/svr.hpp"

namespace vrfbml {

/// One entry of the scenario table: operating point, initial conditions and
/// an optional mean-temperature calibration target with its search bound.
struct ScenarioConfig {
    std::string id;
    double current_a = 40.0;
    Mode mode = Mode::Charging;
    double flow_l_min = 10.0;
    double duration_s = 7094.0;
    double soc_initial = 0.5;
    double t_initial_c = 18.0;
    std::optional<double> target_mean_c;   // calibrate stack resistance to this mean
    std::optional<double> reference_max_c; // reported next to the simulated maximum
    double r_max_ohm = 10.0;

    OperatingProfile profile() const {
        OperatingProfile p;
        p.mode = mode;
        p.current = current_a;
        p.flow_l_min = flow_l_min;
        p.duration = duration_s;
        p.soc_initial = soc_initial;
        p.t_initial = t_initial_c;
        return p;
    }
};

struct SplitConfig {
    double ratio = 0.75;
    std::uint64_t seed = 13;
    SplitStrategy strategy = SplitStrategy::Shuffled;
};

struct NoiseConfig {
    double sigma_c = 0.15;
    std::uint64_t seed = 101;
};

struct RunConfig {
    VrfbParams params;
    std::vector<ScenarioConfig> scenarios;
    SvrHyper svr;
    GbtHyper gbt;
    SplitConfig split;
    NoiseConfig noise;
    PreprocessOptions preprocess;
    std::string output_dir = "out";
    double dt_s = 1.0;

    void validate() const {
        params.validate();
        if (!(split.ratio > 0.0 && split.ratio < 1.0))
            throw ConfigError("config: split.ratio must be in (0, 1)");
        if (!(dt_s > 0.0)) throw ConfigError("config: dt_s must be > 0");
        if (!(noise.sigma_c >= 0.0)) throw ConfigError("config: noise.sigma_c must be >= 0");
        std::set<std::string> ids;
        std::set<std::pair<double, int>> operating_points;
        for (const auto& s : scenarios) {
            if (s.id.empty()) throw ConfigError("config: scenario id must not be empty");
            if (!ids.insert(s.id).second)
                throw ConfigError("config: duplicate scenario id '" + s.id + "'");
            if (!operating_points.insert({s.current_a, static_cast<int>(s.mode)}).second)
                throw ConfigError("config: duplicate (current, mode) pair in scenario '" + s.id +
                                  "'");
            s.profile().validate();
            if (!(s.r_max_ohm > 0.0))
                throw ConfigError("config: scenario '" + s.id + "' r_max_ohm must be > 0");
        }
    }

    const ScenarioConfig& scenario(const std::string& id) const {
        for (const auto& s : scenarios) {
            if (s.id == id) return s;
        }
        throw ConfigError("config: no scenario with id '" + id + "'");
    }
};

/**
 * Built-in configuration: the 1 kW / 6 kWh plant with its eight reference
 * (current, mode) operating points as calibration scenarios. Physical
 * defaults with no measured source are typical vanadium-electrolyte values;
 * the ambient equals the initial temperature so that resistance calibration
 * always brackets its target from below.
 */
inline RunConfig default_config() {
    RunConfig cfg;
    // cfg.params defaults are set in VrfbParams itself.
    struct Row {
        double current;
        Mode mode;
        double target_mean;
        double reference_max;
        double soc_initial;
    };
    const Row rows[] = {
        {40.0, Mode::Charging, 27.743, 31.2529, 0.15},
        {40.0, Mode::Discharging, 25.719, 33.3343, 0.85},
        {45.0, Mode::Charging, 31.302, 35.5717, 0.15},
        {45.0, Mode::Discharging, 33.222, 38.2843, 0.85},
        {50.0, Mode::Charging, 33.926, 40.0213, 0.15},
        {50.0, Mode::Discharging, 36.236, 42.2443, 0.85},
        {60.0, Mode::Charging, 37.307, 44.8636, 0.15},
        {60.0, Mode::Discharging, 39.422, 47.0195, 0.85},
    };
    for (const Row& row : rows) {
        ScenarioConfig s;
        const int amps = static_cast<int>(row.current);
        s.id = std::to_string(amps) + (row.mode == Mode::Charging ? "a-charge" : "a-discharge");
        s.current_a = row.current;
        s.mode = row.mode;
        s.flow_l_min = 10.0;
        s.duration_s = 7094.0; // 7095 samples at dt = 1 s, t = 0 included
        s.soc_initial = row.soc_initial;
        s.t_initial_c = 18.0;
        s.target_mean_c = row.target_mean;
        s.reference_max_c = row.reference_max;
        s.r_max_ohm = 10.0;
        cfg.scenarios.push_back(std::move(s));
    }
    return cfg;
}

namespace config_detail {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& context) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " + context);
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

inline void parse_params(const json& j, VrfbParams& p) {
    check_keys(j,
               {"cp_j_per_g_k", "rho_g_per_m3", "v_stack_l", "v_pos_l", "v_neg_l", "a_pos_m2",
                "a_neg_m2", "u_pos_w_per_m2_k", "u_neg_w_per_m2_k", "r_charge_ohm",
                "r_discharge_ohm", "de_dt_v_per_k", "n_cells", "e0_v", "r_sd_ohm", "i_diff_a",
                "faraday_c_per_mol", "r_gas_j_per_k_mol", "t_ambient_c", "capacity_ah"},
               "params");
    read_into(j, "cp_j_per_g_k", p.cp);
    read_into(j, "rho_g_per_m3", p.rho);
    if (j.contains("v_stack_l")) p.v_stack = liters_to_m3(j.at("v_stack_l").get<double>());
    if (j.contains("v_pos_l")) p.v_pos = liters_to_m3(j.at("v_pos_l").get<double>());
    if (j.contains("v_neg_l")) p.v_neg = liters_to_m3(j.at("v_neg_l").get<double>());
    read_into(j, "a_pos_m2", p.a_pos);
    read_into(j, "a_neg_m2", p.a_neg);
    read_into(j, "u_pos_w_per_m2_k", p.u_pos);
    read_into(j, "u_neg_w_per_m2_k", p.u_neg);
    read_into(j, "r_charge_ohm", p.r_charge);
    read_into(j, "r_discharge_ohm", p.r_discharge);
    read_into(j, "de_dt_v_per_k", p.de_dt);
    read_into(j, "n_cells", p.n_cells);
    read_into(j, "e0_v", p.e0);
    read_into(j, "r_sd_ohm", p.r_sd);
    read_into(j, "i_diff_a", p.i_diff);
    read_into(j, "faraday_c_per_mol", p.faraday);
    read_into(j, "r_gas_j_per_k_mol", p.r_gas);
    read_into(j, "t_ambient_c", p.t_ambient);
    read_into(j, "capacity_ah", p.capacity_ah);
}

inline ScenarioConfig parse_scenario(const json& j) {
    check_keys(j,
               {"id", "current_a", "mode", "flow_l_min", "duration_s", "soc_initial",
                "t_initial_c", "target_mean_c", "reference_max_c", "r_max_ohm"},
               "scenario");
    ScenarioConfig s;
    if (!j.contains("id")) throw ConfigError("config: scenario requires an 'id'");
    s.id = j.at("id").get<std::string>();
    read_into(j, "current_a", s.current_a);
    if (j.contains("mode")) s.mode = mode_from_string(j.at("mode").get<std::string>());
    read_into(j, "flow_l_min", s.flow_l_min);
    read_into(j, "duration_s", s.duration_s);
    read_into(j, "soc_initial", s.soc_initial);
    read_into(j, "t_initial_c", s.t_initial_c);
    if (j.contains("target_mean_c")) s.target_mean_c = j.at("target_mean_c").get<double>();
    if (j.contains("reference_max_c")) s.reference_max_c = j.at("reference_max_c").get<double>();
    read_into(j, "r_max_ohm", s.r_max_ohm);
    return s;
}

inline void parse_svr(const json& j, SvrHyper& h) {
    check_keys(j, {"c", "epsilon", "gamma", "kernel", "max_passes", "tol"}, "models.svr");
    read_into(j, "c", h.c);
    read_into(j, "epsilon", h.epsilon);
    if (j.contains("gamma")) {
        const json& g = j.at("gamma");
        if (g.is_string()) {
            if (g.get<std::string>() != "auto")
                throw ConfigError("config: svr gamma must be a number or \"auto\"");
            h.gamma.reset();
        } else {
            h.gamma = g.get<double>();
        }
    }
    if (j.contains("kernel")) h.kernel = svr_kernel_from_string(j.at("kernel").get<std::string>());
    read_into(j, "max_passes", h.max_passes);
    read_into(j, "tol", h.tol);
}

inline void parse_gbt(const json& j, GbtHyper& h) {
    check_keys(j,
               {"rounds", "learning_rate", "lambda", "max_depth", "min_child_count",
                "min_split_gain"},
               "models.gbt");
    read_into(j, "rounds", h.rounds);
    read_into(j, "learning_rate", h.learning_rate);
    read_into(j, "lambda", h.lambda);
    read_into(j, "max_depth", h.max_depth);
    read_into(j, "min_child_count", h.min_child_count);
    read_into(j, "min_split_gain", h.min_split_gain);
}

} // namespace config_detail

/// Parse a config JSON document on top of the built-in defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
    using config_detail::check_keys;
    RunConfig cfg = default_config();
    try {
        check_keys(j,
                   {"params", "scenarios", "models", "split", "noise", "preprocess", "output_dir",
                    "dt_s"},
                   "the top level");
        if (j.contains("params")) config_detail::parse_params(j.at("params"), cfg.params);
        if (j.contains("scenarios")) {
            cfg.scenarios.clear();
            for (const auto& scenario_json : j.at("scenarios"))
                cfg.scenarios.push_back(config_detail::parse_scenario(scenario_json));
        }
        if (j.contains("models")) {
            const auto& models = j.at("models");
            check_keys(models, {"lr", "svr", "gbt"}, "models");
            if (models.contains("lr")) check_keys(models.at("lr"), {}, "models.lr");
            if (models.contains("svr")) config_detail::parse_svr(models.at("svr"), cfg.svr);
            if (models.contains("gbt")) config_detail::parse_gbt(models.at("gbt"), cfg.gbt);
        }
        if (j.contains("split")) {
            const auto& split_json = j.at("split");
            check_keys(split_json, {"ratio", "seed", "strategy"}, "split");
            config_detail::read_into(split_json, "ratio", cfg.split.ratio);
            config_detail::read_into(split_json, "seed", cfg.split.seed);
            if (split_json.contains("strategy"))
                cfg.split.strategy =
                    split_strategy_from_string(split_json.at("strategy").get<std::string>());
        }
        if (j.contains("noise")) {
            const auto& noise_json = j.at("noise");
            check_keys(noise_json, {"sigma_c", "seed"}, "noise");
            config_detail::read_into(noise_json, "sigma_c", cfg.noise.sigma_c);
            config_detail::read_into(noise_json, "seed", cfg.noise.seed);
        }
        if (j.contains("preprocess")) {
            const auto& pre_json = j.at("preprocess");
            check_keys(pre_json, {"rebase_time"}, "preprocess");
            config_detail::read_into(pre_json, "rebase_time", cfg.preprocess.rebase_time);
        }
        config_detail::read_into(j, "output_dir", cfg.output_dir);
        config_detail::read_into(j, "dt_s", cfg.dt_s);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open config file '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(file);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

/// Emit a config document equivalent to the given configuration; used by
/// --print-default-config to document every knob and its default.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    using nlohmann::json;
    json params = {
        {"cp_j_per_g_k", cfg.params.cp},
        {"rho_g_per_m3", cfg.params.rho},
        {"v_stack_l", m3_to_liters(cfg.params.v_stack)},
        {"v_pos_l", m3_to_liters(cfg.params.v_pos)},
        {"v_neg_l", m3_to_liters(cfg.params.v_neg)},
        {"a_pos_m2", cfg.params.a_pos},
        {"a_neg_m2", cfg.params.a_neg},
        {"u_pos_w_per_m2_k", cfg.params.u_pos},
        {"u_neg_w_per_m2_k", cfg.params.u_neg},
        {"r_charge_ohm", cfg.params.r_charge},
        {"r_discharge_ohm", cfg.params.r_discharge},
        {"de_dt_v_per_k", cfg.params.de_dt},
        {"n_cells", cfg.params.n_cells},
        {"e0_v", cfg.params.e0},
        {"r_sd_ohm", cfg.params.r_sd},
        {"i_diff_a", cfg.params.i_diff},
        {"faraday_c_per_mol", cfg.params.faraday},
        {"r_gas_j_per_k_mol", cfg.params.r_gas},
        {"t_ambient_c", cfg.params.t_ambient},
        {"capacity_ah", cfg.params.capacity_ah},
    };
    json scenarios = json::array();
    for (const auto& s : cfg.scenarios) {
        json row = {
            {"id", s.id},
            {"current_a", s.current_a},
            {"mode", to_string(s.mode)},
            {"flow_l_min", s.flow_l_min},
            {"duration_s", s.duration_s},
            {"soc_initial", s.soc_initial},
            {"t_initial_c", s.t_initial_c},
            {"r_max_ohm", s.r_max_ohm},
        };
        if (s.target_mean_c) row["target_mean_c"] = *s.target_mean_c;
        if (s.reference_max_c) row["reference_max_c"] = *s.reference_max_c;
        scenarios.push_back(row);
    }
    json svr = {
        {"c", cfg.svr.c},
        {"epsilon", cfg.svr.epsilon},
        {"kernel", to_string(cfg.svr.kernel)},
        {"max_passes", cfg.svr.max_passes},
        {"tol", cfg.svr.tol},
    };
    svr["gamma"] = cfg.svr.gamma ? json(*cfg.svr.gamma) : json("auto");
    json gbt = {
        {"rounds", cfg.gbt.rounds},
        {"learning_rate", cfg.gbt.learning_rate},
        {"lambda", cfg.gbt.lambda},
        {"max_depth", cfg.gbt.max_depth},
        {"min_child_count", cfg.gbt.min_child_count},
        {"min_split_gain", cfg.gbt.min_split_gain},
    };
    return json{
        {"params", params},
        {"scenarios", scenarios},
        {"models", {{"lr", json::object()}, {"svr", svr}, {"gbt", gbt}}},
        {"split",
         {{"ratio", cfg.split.ratio},
          {"seed", cfg.split.seed},
          {"strategy", to_string(cfg.split.strategy)}}},
        {"noise", {{"sigma_c", cfg.noise.sigma_c}, {"seed", cfg.noise.seed}}},
        {"preprocess", {{"rebase_time", cfg.preprocess.rebase_time}}},
        {"output_dir", cfg.output_dir},
        {"dt_s", cfg.dt_s},
    };
}

} // namespace vrfbml

#endif // VRFBML_CONFIG_HPP
