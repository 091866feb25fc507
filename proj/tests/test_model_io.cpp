#include "vrfbml/model_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vrfbml/random.hpp"

using namespace vrfbml;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "vrfbml_model_tests";
    fs::create_directories(dir);
    return dir / name;
}

TimeSeriesDataset training_curve() {
    TimeSeriesDataset d;
    d.meta = {40.0, Mode::Charging, 10.0, 24.0, DataSource::Synthetic, 17};
    Rng rng(17);
    for (int i = 0; i < 120; ++i) {
        const double t = 30.0 * i;
        d.samples.push_back({t, 24.0 + 5.0 * (1.0 - std::exp(-t / 900.0)) + rng.gaussian(0.1)});
    }
    return d;
}

void expect_predictions_preserved(const RegressionModel& before, const RegressionModel& after) {
    Rng rng(55);
    for (int probe = 0; probe < 1000; ++probe) {
        const double t = -500.0 + 5000.0 * rng.uniform01();
        const double a = predict(before, t);
        const double b = predict(after, t);
        const double tolerance = std::max(1.0, std::abs(a)) * 1e-15;
        ASSERT_NEAR(a, b, tolerance) << "t=" << t;
    }
}

} // namespace

TEST(ModelIo, LinearRoundTrip) {
    const RegressionModel model = fit_lr(training_curve());
    const fs::path path = temp_file("lr.model.json");
    save_model(model, path);
    const LoadedModel back = load_model(path);
    EXPECT_EQ(kind_of(back.model), ModelKind::Lr);
    EXPECT_FALSE(back.provenance.has_value());
    expect_predictions_preserved(model, back.model);
}

TEST(ModelIo, SvrRoundTripWithProvenance) {
    SvrHyper hyper;
    hyper.max_passes = 20000;
    const RegressionModel model = fit_svr(training_curve(), hyper);
    const fs::path path = temp_file("svr.model.json");
    ModelProvenance prov;
    prov.dataset_hash = "00000000deadbeef";
    prov.split_seed = 9;
    prov.split_ratio = 0.75;
    prov.split_strategy = SplitStrategy::Chronological;
    prov.rebase_time = true;
    save_model(model, path, prov);
    const LoadedModel back = load_model(path, ModelKind::Svr);
    expect_predictions_preserved(model, back.model);
    ASSERT_TRUE(back.provenance.has_value());
    EXPECT_EQ(back.provenance->dataset_hash, "00000000deadbeef");
    EXPECT_EQ(back.provenance->split_seed, 9u);
    EXPECT_EQ(back.provenance->split_ratio, 0.75);
    EXPECT_EQ(back.provenance->split_strategy, SplitStrategy::Chronological);
    EXPECT_TRUE(back.provenance->rebase_time);
    const SvrModel& svr = std::get<SvrModel>(back.model);
    EXPECT_EQ(svr.kernel, SvrKernel::Rbf);
}

TEST(ModelIo, GbtRoundTrip) {
    GbtHyper hyper;
    hyper.rounds = 25;
    const RegressionModel model = fit_gbt(training_curve(), hyper);
    const fs::path path = temp_file("gbt.model.json");
    save_model(model, path);
    const LoadedModel back = load_model(path);
    EXPECT_EQ(kind_of(back.model), ModelKind::Gbt);
    expect_predictions_preserved(model, back.model);
}

TEST(ModelIo, CorruptedFilesAreStructuredErrors) {
    const fs::path path = temp_file("corrupt.model.json");
    std::ofstream(path) << "{ this is not json";
    EXPECT_THROW(load_model(path), DataError);
    std::ofstream(path, std::ios::trunc) << "{\"format_version\": 1}";
    EXPECT_THROW(load_model(path), DataError); // kind missing
    EXPECT_THROW(load_model(temp_file("missing.model.json")), IoError);
}

TEST(ModelIo, VersionAndKindMismatches) {
    const RegressionModel model = LinearModel{1.0, 2.0};
    const fs::path path = temp_file("mismatch.model.json");
    save_model(model, path);
    EXPECT_THROW(load_model(path, ModelKind::Gbt), DataError);

    // rewrite with a future format version
    nlohmann::json j;
    {
        std::ifstream in(path);
        j = nlohmann::json::parse(in);
    }
    j["format_version"] = 2;
    std::ofstream(path, std::ios::trunc) << j.dump();
    EXPECT_THROW(load_model(path), DataError);
}

TEST(ModelIo, GoldenFixtureEvaluatesAsFrozen) {
    const LoadedModel golden = load_model(fs::path(TEST_DATA_DIR) / "golden_gbt.model.json");
    ASSERT_EQ(kind_of(golden.model), ModelKind::Gbt);
    // base 10, eta 0.5; tree one: x < 50 -> 2 else 4; tree two: -1 everywhere
    EXPECT_EQ(predict(golden.model, 10.0), 10.5);
    EXPECT_EQ(predict(golden.model, 60.0), 11.5);
    EXPECT_EQ(predict(golden.model, 50.0), 11.5); // threshold routes right
}

TEST(ModelIo, HashesAreStable) {
    EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
    EXPECT_NE(fnv1a64_hex("dataset-a"), fnv1a64_hex("dataset-b"));
}

TEST(ModelIo, KindDispatchCoversAllAlternatives) {
    EXPECT_EQ(kind_of(RegressionModel{LinearModel{}}), ModelKind::Lr);
    EXPECT_EQ(kind_of(RegressionModel{SvrModel{}}), ModelKind::Svr);
    EXPECT_EQ(kind_of(RegressionModel{GbtModel{}}), ModelKind::Gbt);
    EXPECT_EQ(to_string(ModelKind::Svr), "svr");
    EXPECT_EQ(model_kind_from_string("gbt"), ModelKind::Gbt);
    EXPECT_THROW(model_kind_from_string("boost"), ValueError);
}
