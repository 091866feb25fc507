#include "vrfbml/csv.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "vrfbml/random.hpp"

using namespace vrfbml;
namespace fs = std::filesystem;

namespace {

TimeSeriesDataset sample_dataset() {
    TimeSeriesDataset d;
    d.meta = {40.0, Mode::Charging, 10.0, 30.0, DataSource::Experimental, std::nullopt};
    d.samples = {{0.0, 25.0}, {1.5, 25.25}, {3.0, 26.5}, {7.25, 27.125}};
    return d;
}

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "vrfbml_csv_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(FormatDouble, ShortestRoundTripWithFloatMarker) {
    EXPECT_EQ(format_double(0.0), "0.0");
    EXPECT_EQ(format_double(-0.0), "-0.0");
    EXPECT_EQ(format_double(30.0), "30.0");
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(-2.25), "-2.25");
    EXPECT_EQ(format_double(1e21), "1e+21");
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(CsvRoundTrip, ValuesSurviveBitExactly) {
    TimeSeriesDataset d;
    d.meta = {45.0, Mode::Discharging, 10.0, 24.0, DataSource::Synthetic, 42};
    Rng rng(7);
    double t = 0.0;
    for (int i = 0; i < 500; ++i) {
        t += 0.25 + rng.uniform01();
        d.samples.push_back({t, 20.0 + 15.0 * rng.uniform01()});
    }
    const TimeSeriesDataset back = from_csv(to_csv(d));
    ASSERT_EQ(back.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(back.samples[i].time_s, d.samples[i].time_s);
        EXPECT_EQ(back.samples[i].temperature_c, d.samples[i].temperature_c);
    }
    EXPECT_EQ(back.meta.current_a, d.meta.current_a);
    EXPECT_EQ(back.meta.mode, d.meta.mode);
    EXPECT_EQ(back.meta.flow_l_min, d.meta.flow_l_min);
    EXPECT_EQ(back.meta.ambient_c, d.meta.ambient_c);
    EXPECT_EQ(back.meta.source, d.meta.source);
    ASSERT_TRUE(back.meta.seed.has_value());
    EXPECT_EQ(*back.meta.seed, 42u);
}

TEST(CsvRoundTrip, WriteLoadWriteIsByteIdentical) {
    const TimeSeriesDataset d = sample_dataset();
    const std::string first = to_csv(d);
    const std::string second = to_csv(from_csv(first));
    EXPECT_EQ(first, second);
}

TEST(CsvRoundTrip, FileIoMatchesInMemory) {
    const fs::path path = temp_file("roundtrip.csv");
    const TimeSeriesDataset d = sample_dataset();
    write_csv(d, path);
    EXPECT_EQ(read_file_bytes(path), to_csv(d));
    const TimeSeriesDataset back = load_csv(path);
    EXPECT_EQ(to_csv(back), to_csv(d));
}

TEST(CsvGolden, WriterMatchesCommittedFixture) {
    const std::string golden = read_file_bytes(fs::path(TEST_DATA_DIR) / "golden_dataset.csv");
    EXPECT_EQ(to_csv(sample_dataset()), golden);
}

TEST(CsvGolden, SevenThousandRowFileLoadsCompletely) {
    TimeSeriesDataset d;
    d.meta = {40.0, Mode::Charging, 10.0, 30.0, DataSource::Synthetic, 1};
    for (int i = 0; i < 7095; ++i)
        d.samples.push_back({static_cast<double>(i), 25.0 + 0.001 * i});
    const fs::path path = temp_file("seventhousand.csv");
    write_csv(d, path);
    EXPECT_EQ(load_csv(path).size(), 7095u);
}

TEST(CsvErrors, MalformedRowNamesItsLine) {
    std::string content = "# vrfb-dataset v1\n"
                          "# current_a=40.0 mode=charging flow_l_min=10.0 ambient_c=30.0 "
                          "source=experimental seed=none\n"
                          "time_s,temperature_c\n"
                          "0.0,25.0\n"
                          "12.0,abc\n";
    try {
        from_csv(content);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
    }
}

TEST(CsvErrors, SchemaViolationsAreReported) {
    EXPECT_THROW(from_csv("time,temp\n1,2\n3,4\n"), SchemaError);
    const std::string good_head = "# vrfb-dataset v1\n";
    // metadata line missing the seed key
    EXPECT_THROW(from_csv(good_head +
                          "# current_a=40.0 mode=charging flow_l_min=10.0 ambient_c=30.0 "
                          "source=experimental\ntime_s,temperature_c\n"),
                 SchemaError);
    // wrong column header
    EXPECT_THROW(from_csv(good_head +
                          "# current_a=40.0 mode=charging flow_l_min=10.0 ambient_c=30.0 "
                          "source=experimental seed=none\nt,y\n"),
                 SchemaError);
    // unknown metadata key
    EXPECT_THROW(from_csv(good_head +
                          "# current_a=40.0 mode=charging flow_l_min=10.0 ambient_c=30.0 "
                          "source=experimental seed=none extra=1\ntime_s,temperature_c\n"),
                 SchemaError);
}

TEST(CsvErrors, NonFiniteValuesAreRejected) {
    const std::string head = "# vrfb-dataset v1\n"
                             "# current_a=40.0 mode=charging flow_l_min=10.0 ambient_c=30.0 "
                             "source=experimental seed=none\n"
                             "time_s,temperature_c\n";
    EXPECT_THROW(from_csv(head + "0.0,nan\n"), ValueError);
    EXPECT_THROW(from_csv(head + "0.0,inf\n"), ValueError);
}

TEST(CsvErrors, OutOfOrderTimesAreRejected) {
    const std::string head = "# vrfb-dataset v1\n"
                             "# current_a=40.0 mode=charging flow_l_min=10.0 ambient_c=30.0 "
                             "source=experimental seed=none\n"
                             "time_s,temperature_c\n";
    EXPECT_THROW(from_csv(head + "1.0,25.0\n0.5,25.0\n"), DataError);
    EXPECT_THROW(from_csv(head + "1.0,25.0\n1.0,25.5\n"), DataError);
}

TEST(CsvErrors, EmptyDatasetCannotBeWritten) {
    TimeSeriesDataset d;
    d.meta = sample_dataset().meta;
    EXPECT_THROW(to_csv(d), DataError);
}

TEST(CsvErrors, FilesystemFailuresSurfaceAsIoErrors) {
    const fs::path dir = fs::temp_directory_path() / "vrfbml_csv_tests";
    fs::create_directories(dir);
    EXPECT_THROW(write_csv(sample_dataset(), dir), IoError); // target is a directory
    EXPECT_THROW(load_csv(dir / "does_not_exist.csv"), IoError);
}
