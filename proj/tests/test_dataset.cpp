#include "vrfbml/dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrfbml/synthesize.hpp"

using namespace vrfbml;

namespace {

TimeSeriesDataset make_clean(std::size_t n) {
    TimeSeriesDataset d;
    d.meta = {40.0, Mode::Charging, 10.0, 24.0, DataSource::Synthetic, 5};
    for (std::size_t i = 0; i < n; ++i)
        d.samples.push_back({static_cast<double>(i), 24.0 + 0.01 * static_cast<double>(i)});
    return d;
}

} // namespace

TEST(Preprocess, CleanInputPassesThroughUnchanged) {
    const TimeSeriesDataset d = make_clean(50);
    PreprocessReport report;
    const TimeSeriesDataset once = preprocess(d, {}, &report);
    EXPECT_EQ(report.dropped_non_finite, 0u);
    EXPECT_EQ(report.duplicates_removed, 0u);
    ASSERT_EQ(once.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        EXPECT_EQ(once.samples[i].time_s, d.samples[i].time_s);
    const TimeSeriesDataset twice = preprocess(once);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(twice.samples[i].time_s, once.samples[i].time_s);
        EXPECT_EQ(twice.samples[i].temperature_c, once.samples[i].temperature_c);
    }
}

TEST(Preprocess, SortsAndKeepsFirstDuplicate) {
    TimeSeriesDataset d = make_clean(1);
    d.samples = {{2.0, 30.0}, {1.0, 21.0}, {1.0, 99.0}};
    const TimeSeriesDataset out = preprocess(d);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out.samples[0].time_s, 1.0);
    EXPECT_EQ(out.samples[0].temperature_c, 21.0); // first occurrence wins
    EXPECT_EQ(out.samples[1].time_s, 2.0);
    EXPECT_EQ(out.samples[1].temperature_c, 30.0);
}

TEST(Preprocess, DropsNonFiniteRowsAndCountsThem) {
    TimeSeriesDataset d = make_clean(40);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    d.samples.push_back({100.0, nan});
    d.samples.push_back({nan, 25.0});
    d.samples.push_back({101.0, inf});
    PreprocessReport report;
    const TimeSeriesDataset out = preprocess(d, {}, &report);
    EXPECT_EQ(out.size(), 40u);
    EXPECT_EQ(report.dropped_non_finite, 3u);
    EXPECT_NO_THROW(out.validate());
}

TEST(Preprocess, EmptyAfterCleaningIsAnError) {
    TimeSeriesDataset d = make_clean(1);
    d.samples = {{std::numeric_limits<double>::quiet_NaN(), 1.0}};
    EXPECT_THROW(preprocess(d), DataError);
}

TEST(Preprocess, RebaseShiftsFirstSampleToZero) {
    TimeSeriesDataset d = make_clean(1);
    d.samples = {{100.0, 24.0}, {105.5, 24.5}};
    PreprocessOptions opts;
    opts.rebase_time = true;
    const TimeSeriesDataset out = preprocess(d, opts);
    EXPECT_EQ(out.samples[0].time_s, 0.0);
    EXPECT_EQ(out.samples[1].time_s, 5.5);
}

TEST(Split, ReferenceCountsAtThreeQuarters) {
    const TimeSeriesDataset d = make_clean(7095);
    const SplitDataset parts = split(d, 0.75, 1, SplitStrategy::Shuffled);
    EXPECT_EQ(parts.train.size(), 5321u);
    EXPECT_EQ(parts.test.size(), 1774u);
}

TEST(Split, ChronologicalTakesTheEarliestSamples) {
    const TimeSeriesDataset d = make_clean(4);
    const SplitDataset parts = split(d, 0.75, 9, SplitStrategy::Chronological);
    ASSERT_EQ(parts.train.size(), 3u);
    EXPECT_EQ(parts.train.samples.back().time_s, 2.0);
    ASSERT_EQ(parts.test.size(), 1u);
    EXPECT_EQ(parts.test.samples.front().time_s, 3.0);
}

TEST(Split, ShuffledIsSeedDeterministicAndSeedSensitive) {
    const TimeSeriesDataset d = make_clean(100);
    const SplitDataset a = split(d, 0.75, 11, SplitStrategy::Shuffled);
    const SplitDataset b = split(d, 0.75, 11, SplitStrategy::Shuffled);
    ASSERT_EQ(a.train.size(), b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i)
        EXPECT_EQ(a.train.samples[i].time_s, b.train.samples[i].time_s);
    const SplitDataset c = split(d, 0.75, 12, SplitStrategy::Shuffled);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.train.size() && !any_difference; ++i)
        any_difference = a.train.samples[i].time_s != c.train.samples[i].time_s;
    EXPECT_TRUE(any_difference);
}

TEST(Split, IsAPartitionWithSortedSides) {
    const TimeSeriesDataset d = make_clean(257);
    const SplitDataset parts = split(d, 0.6, 3, SplitStrategy::Shuffled);
    EXPECT_EQ(parts.train.size() + parts.test.size(), d.size());
    EXPECT_NO_THROW(parts.train.validate());
    EXPECT_NO_THROW(parts.test.validate());
    std::vector<double> merged;
    for (const auto& s : parts.train.samples) merged.push_back(s.time_s);
    for (const auto& s : parts.test.samples) merged.push_back(s.time_s);
    std::sort(merged.begin(), merged.end());
    const std::vector<double> original = d.times();
    ASSERT_EQ(merged.size(), original.size());
    for (std::size_t i = 0; i < merged.size(); ++i) EXPECT_EQ(merged[i], original[i]);
}

TEST(Split, RejectsDegenerateRequests) {
    const TimeSeriesDataset d = make_clean(2);
    EXPECT_THROW(split(d, 0.3, 1, SplitStrategy::Shuffled), DataError); // floor(0.6) == 0
    EXPECT_THROW(split(d, 0.0, 1, SplitStrategy::Shuffled), DataError);
    EXPECT_THROW(split(d, 1.0, 1, SplitStrategy::Shuffled), DataError);
    TimeSeriesDataset single = make_clean(1);
    EXPECT_THROW(split(single, 0.5, 1, SplitStrategy::Shuffled), DataError);
}

namespace {

VrfbParams synth_params() {
    VrfbParams p;
    p.u_pos = 0.0;
    p.u_neg = 0.0;
    p.t_ambient = 25.0;
    return p;
}

OperatingProfile synth_profile(double duration) {
    OperatingProfile prof;
    prof.mode = Mode::Charging;
    prof.current = 40.0;
    prof.flow_l_min = 10.0;
    prof.duration = duration;
    prof.soc_initial = 0.2;
    prof.t_initial = 25.0;
    return prof;
}

} // namespace

TEST(Synthesize, ZeroSigmaEqualsTheCleanSimulation) {
    const VrfbParams p = synth_params();
    const OperatingProfile prof = synth_profile(300.0);
    const TimeSeriesDataset clean = simulate_cycle(p, prof, 1.0).data;
    const TimeSeriesDataset noisy = synthesize(p, prof, 0.0, 77, 1.0);
    ASSERT_EQ(noisy.size(), clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i)
        EXPECT_EQ(noisy.samples[i].temperature_c, clean.samples[i].temperature_c);
    ASSERT_TRUE(noisy.meta.seed.has_value());
    EXPECT_EQ(*noisy.meta.seed, 77u);
    EXPECT_EQ(noisy.meta.source, DataSource::Synthetic);
}

TEST(Synthesize, SameSeedSameBytesDifferentSeedDifferentNoise) {
    const VrfbParams p = synth_params();
    const OperatingProfile prof = synth_profile(300.0);
    const TimeSeriesDataset a = synthesize(p, prof, 0.15, 9, 1.0);
    const TimeSeriesDataset b = synthesize(p, prof, 0.15, 9, 1.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a.samples[i].temperature_c, b.samples[i].temperature_c);
    const TimeSeriesDataset c = synthesize(p, prof, 0.15, 10, 1.0);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size() && !any_difference; ++i)
        any_difference = a.samples[i].temperature_c != c.samples[i].temperature_c;
    EXPECT_TRUE(any_difference);
}

TEST(Synthesize, NoiseIsCenteredAtScale) {
    const VrfbParams p = synth_params();
    const OperatingProfile prof = synth_profile(100000.0);
    const double sigma = 0.15;
    const TimeSeriesDataset clean = simulate_cycle(p, prof, 1.0).data;
    const TimeSeriesDataset noisy = synthesize(p, prof, sigma, 123, 1.0);
    ASSERT_EQ(noisy.size(), clean.size());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double noise = noisy.samples[i].temperature_c - clean.samples[i].temperature_c;
        sum += noise;
        sum_sq += noise * noise;
    }
    const double n = static_cast<double>(clean.size());
    EXPECT_LE(std::abs(sum / n), 4.0 * sigma / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(sum_sq / n), sigma, 0.05 * sigma);
}

TEST(Synthesize, RejectsNegativeSigma) {
    EXPECT_THROW(synthesize(synth_params(), synth_profile(10.0), -0.1, 1, 1.0),
                 ValidationError);
}

TEST(Synthesize, PropagatesSimulatorErrors) {
    VrfbParams bad = synth_params();
    bad.v_stack = 0.0;
    EXPECT_THROW(synthesize(bad, synth_profile(10.0), 0.1, 1, 1.0), ValidationError);
    OperatingProfile bad_profile = synth_profile(10.0);
    bad_profile.soc_initial = 0.0;
    EXPECT_THROW(synthesize(synth_params(), bad_profile, 0.1, 1, 1.0), ValidationError);
}
