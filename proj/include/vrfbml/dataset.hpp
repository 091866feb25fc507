#ifndef VRFBML_DATASET_HPP
#define VRFBML_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrfbml/errors.hpp"
#include "vrfbml/params.hpp"
#include "vrfbml/random.hpp"

namespace vrfbml {

enum class DataSource { Experimental, Synthetic };

inline std::string to_string(DataSource s) {
    return s == DataSource::Experimental ? "experimental" : "synthetic";
}

inline DataSource data_source_from_string(const std::string& s) {
    if (s == "experimental") return DataSource::Experimental;
    if (s == "synthetic") return DataSource::Synthetic;
    throw ValueError("unknown source '" + s + "' (expected experimental|synthetic)");
}

/// Where a dataset came from and under what operating conditions.
struct ScenarioMeta {
    double current_a = 0.0;
    Mode mode = Mode::Charging;
    double flow_l_min = 0.0;
    double ambient_c = 0.0;
    DataSource source = DataSource::Synthetic;
    std::optional<std::uint64_t> seed;

    void validate() const {
        if (!(current_a >= 0.0) || !std::isfinite(current_a))
            throw ValidationError("ScenarioMeta: current_a must be >= 0");
        if (!(flow_l_min >= 0.0) || !std::isfinite(flow_l_min))
            throw ValidationError("ScenarioMeta: flow_l_min must be >= 0");
        if (!std::isfinite(ambient_c))
            throw ValidationError("ScenarioMeta: ambient_c must be finite");
    }
};

struct Sample {
    double time_s = 0.0;
    double temperature_c = 0.0;
};

/**
 * Ordered (time, temperature) series with scenario metadata. The regression
 * feature is time; the target is temperature. Raw in-memory datasets may be
 * unsorted or carry non-finite rows until preprocess() has run; validate()
 * enforces the clean-dataset contract required by writers and fitters.
 */
struct TimeSeriesDataset {
    std::vector<Sample> samples;
    ScenarioMeta meta;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    std::vector<double> times() const {
        std::vector<double> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.time_s);
        return out;
    }

    std::vector<double> temperatures() const {
        std::vector<double> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.temperature_c);
        return out;
    }

    void validate() const {
        meta.validate();
        if (samples.empty()) throw DataError("dataset has no samples");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!std::isfinite(samples[i].time_s) || !std::isfinite(samples[i].temperature_c))
                throw DataError("dataset sample " + std::to_string(i) + " is not finite");
            if (i > 0 && !(samples[i].time_s > samples[i - 1].time_s))
                throw DataError("dataset time is not strictly increasing at sample " +
                                std::to_string(i));
        }
    }
};

struct PreprocessOptions {
    bool rebase_time = false; // shift times so the first sample sits at t = 0
};

struct PreprocessReport {
    std::size_t dropped_non_finite = 0;
    std::size_t duplicates_removed = 0;
};

/**
 * Cleaning pass: drop non-finite rows, sort by time, collapse duplicate
 * timestamps keeping the first occurrence, optionally rebase time to zero.
 * Idempotent. Throws DataError if nothing survives.
 */
inline TimeSeriesDataset preprocess(const TimeSeriesDataset& input,
                                    const PreprocessOptions& options = {},
                                    PreprocessReport* report = nullptr) {
    PreprocessReport local;
    TimeSeriesDataset out;
    out.meta = input.meta;
    out.samples.reserve(input.samples.size());
    for (const auto& s : input.samples) {
        if (std::isfinite(s.time_s) && std::isfinite(s.temperature_c)) {
            out.samples.push_back(s);
        } else {
            ++local.dropped_non_finite;
        }
    }
    std::stable_sort(out.samples.begin(), out.samples.end(),
                     [](const Sample& a, const Sample& b) { return a.time_s < b.time_s; });
    // stable sort keeps original order among equal times, so first-wins dedupe
    // is a plain adjacent-unique
    auto last = std::unique(out.samples.begin(), out.samples.end(),
                            [](const Sample& a, const Sample& b) { return a.time_s == b.time_s; });
    local.duplicates_removed = static_cast<std::size_t>(out.samples.end() - last);
    out.samples.erase(last, out.samples.end());
    if (out.samples.empty()) throw DataError("dataset is empty after cleaning");
    if (options.rebase_time) {
        const double t0 = out.samples.front().time_s;
        for (auto& s : out.samples) s.time_s -= t0;
    }
    if (report) *report = local;
    return out;
}

enum class SplitStrategy { Shuffled, Chronological };

inline std::string to_string(SplitStrategy s) {
    return s == SplitStrategy::Shuffled ? "shuffled" : "chronological";
}

inline SplitStrategy split_strategy_from_string(const std::string& s) {
    if (s == "shuffled") return SplitStrategy::Shuffled;
    if (s == "chronological") return SplitStrategy::Chronological;
    throw ValueError("unknown split strategy '" + s + "' (expected shuffled|chronological)");
}

struct SplitDataset {
    TimeSeriesDataset train;
    TimeSeriesDataset test;
    std::uint64_t seed = 0;
    double ratio = 0.0;
    SplitStrategy strategy = SplitStrategy::Shuffled;
};

/**
 * Partition a clean dataset into train/test. |train| = floor(ratio * N).
 * Shuffled draws a seed-deterministic permutation; Chronological takes the
 * earliest samples. Both sides are returned in time order.
 */
inline SplitDataset split(const TimeSeriesDataset& dataset, double ratio, std::uint64_t seed,
                          SplitStrategy strategy) {
    dataset.validate();
    if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("split ratio must be in (0, 1)");
    const std::size_t n = dataset.size();
    if (n < 2) throw DataError("split needs at least 2 samples");
    const auto n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw DataError("degenerate split: one side would be empty");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    if (strategy == SplitStrategy::Shuffled) {
        Rng rng(seed);
        shuffle(order, rng);
    }

    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test_idx(order.begin() + static_cast<long>(n_train), order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    SplitDataset out;
    out.seed = seed;
    out.ratio = ratio;
    out.strategy = strategy;
    out.train.meta = dataset.meta;
    out.test.meta = dataset.meta;
    out.train.samples.reserve(train_idx.size());
    out.test.samples.reserve(test_idx.size());
    for (std::size_t i : train_idx) out.train.samples.push_back(dataset.samples[i]);
    for (std::size_t i : test_idx) out.test.samples.push_back(dataset.samples[i]);
    return out;
}

} // namespace vrfbml

#endif // VRFBML_DATASET_HPP
