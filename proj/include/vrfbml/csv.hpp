#ifndef VRFBML_CSV_HPP
#define VRFBML_CSV_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"

namespace vrfbml {

/**
 * Shortest decimal representation that parses back to the same double, with
 * a trailing ".0" added to integral values so the file reads as float data.
 */
inline std::string format_double(double value) {
    char buf[40];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, result.ptr);
    if (text.find_first_of(".eE") == std::string::npos &&
        text.find_first_not_of("-0123456789") == std::string::npos) {
        text += ".0";
    }
    return text;
}

inline double parse_double_token(std::string_view token, const std::string& context) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc() || result.ptr != last)
        throw ParseError(context + ": cannot parse '" + std::string(token) + "' as a number");
    return value;
}

inline std::uint64_t parse_u64_token(std::string_view token, const std::string& context) {
    std::uint64_t value = 0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size())
        throw ParseError(context + ": cannot parse '" + std::string(token) + "' as an integer");
    return value;
}

namespace csv_detail {

constexpr std::string_view kFormatLine = "# vrfb-dataset v1";
constexpr std::string_view kColumnLine = "time_s,temperature_c";

inline std::string meta_line(const ScenarioMeta& meta) {
    std::string line = "# current_a=" + format_double(meta.current_a);
    line += " mode=" + to_string(meta.mode);
    line += " flow_l_min=" + format_double(meta.flow_l_min);
    line += " ambient_c=" + format_double(meta.ambient_c);
    line += " source=" + to_string(meta.source);
    line += " seed=" + (meta.seed ? std::to_string(*meta.seed) : std::string("none"));
    return line;
}

inline ScenarioMeta parse_meta_line(const std::string& line) {
    if (line.size() < 2 || line[0] != '#' || line[1] != ' ')
        throw SchemaError("line 2: expected '# key=value ...' metadata header");
    ScenarioMeta meta;
    bool saw_current = false, saw_mode = false, saw_flow = false, saw_ambient = false,
         saw_source = false, saw_seed = false;
    std::istringstream stream(line.substr(2));
    std::string token;
    while (stream >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw SchemaError("line 2: malformed metadata token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "current_a") {
            meta.current_a = parse_double_token(value, "line 2 current_a");
            saw_current = true;
        } else if (key == "mode") {
            meta.mode = mode_from_string(value);
            saw_mode = true;
        } else if (key == "flow_l_min") {
            meta.flow_l_min = parse_double_token(value, "line 2 flow_l_min");
            saw_flow = true;
        } else if (key == "ambient_c") {
            meta.ambient_c = parse_double_token(value, "line 2 ambient_c");
            saw_ambient = true;
        } else if (key == "source") {
            meta.source = data_source_from_string(value);
            saw_source = true;
        } else if (key == "seed") {
            if (value == "none") {
                meta.seed.reset();
            } else {
                meta.seed = parse_u64_token(value, "line 2 seed");
            }
            saw_seed = true;
        } else {
            throw SchemaError("line 2: unknown metadata key '" + key + "'");
        }
    }
    if (!(saw_current && saw_mode && saw_flow && saw_ambient && saw_source && saw_seed))
        throw SchemaError("line 2: metadata header is missing required keys");
    return meta;
}

} // namespace csv_detail

/// Serialize to the dataset CSV schema. Deterministic byte-for-byte.
inline std::string to_csv(const TimeSeriesDataset& dataset) {
    dataset.validate();
    std::string out;
    out.reserve(32 * dataset.size() + 128);
    out += csv_detail::kFormatLine;
    out += '\n';
    out += csv_detail::meta_line(dataset.meta);
    out += '\n';
    out += csv_detail::kColumnLine;
    out += '\n';
    for (const auto& s : dataset.samples) {
        out += format_double(s.time_s);
        out += ',';
        out += format_double(s.temperature_c);
        out += '\n';
    }
    return out;
}

inline void write_csv(const TimeSeriesDataset& dataset, const std::filesystem::path& path) {
    const std::string body = to_csv(dataset);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
    file.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!file) throw IoError("failed writing '" + path.string() + "'");
}

/// Parse the dataset CSV schema from a string. Errors carry line numbers.
inline TimeSeriesDataset from_csv(const std::string& content) {
    std::vector<std::string> lines;
    {
        std::size_t start = 0;
        while (start <= content.size()) {
            const auto nl = content.find('\n', start);
            if (nl == std::string::npos) {
                lines.push_back(content.substr(start));
                break;
            }
            lines.push_back(content.substr(start, nl - start));
            start = nl + 1;
        }
        if (!lines.empty() && lines.back().empty()) lines.pop_back(); // trailing newline
    }
    if (lines.size() < 3) throw SchemaError("file too short to be a vrfb-dataset");
    if (lines[0] != csv_detail::kFormatLine)
        throw SchemaError("line 1: expected '" + std::string(csv_detail::kFormatLine) + "'");
    TimeSeriesDataset dataset;
    dataset.meta = csv_detail::parse_meta_line(lines[1]);
    if (lines[2] != csv_detail::kColumnLine)
        throw SchemaError("line 3: expected columns '" + std::string(csv_detail::kColumnLine) +
                          "'");
    dataset.samples.reserve(lines.size() - 3);
    for (std::size_t i = 3; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const std::string where = "line " + std::to_string(i + 1);
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(where + ": expected exactly two comma-separated fields");
        Sample sample;
        sample.time_s = parse_double_token(std::string_view(line).substr(0, comma), where);
        sample.temperature_c = parse_double_token(std::string_view(line).substr(comma + 1), where);
        if (!std::isfinite(sample.time_s) || !std::isfinite(sample.temperature_c))
            throw ValueError(where + ": non-finite value");
        if (!dataset.samples.empty() && !(sample.time_s > dataset.samples.back().time_s))
            throw DataError(where + ": time_s is not strictly increasing");
        dataset.samples.push_back(sample);
    }
    return dataset;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    return bytes;
}

inline TimeSeriesDataset load_csv(const std::filesystem::path& path) {
    return from_csv(read_file_bytes(path));
}

} // namespace vrfbml

#endif // VRFBML_CSV_HPP
