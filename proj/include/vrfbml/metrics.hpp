#ifndef VRFBML_METRICS_HPP
#define VRFBML_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"

namespace vrfbml {

namespace metrics_detail {

inline void check_lengths(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw DataError("metrics: actual and predicted lengths differ");
    if (actual.empty()) throw DataError("metrics: empty input");
}

} // namespace metrics_detail

/// Coefficient of determination 1 - SS_res / SS_tot. Can go negative for
/// models worse than the mean predictor; nothing is clamped.
inline double r2(std::span<const double> actual, std::span<const double> predicted) {
    metrics_detail::check_lengths(actual, predicted);
    if (actual.size() < 2) throw DataError("r2: need at least 2 samples");
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (!(ss_tot > 0.0)) throw DataError("r2: actual values are constant");
    return 1.0 - ss_res / ss_tot;
}

inline double mae(std::span<const double> actual, std::span<const double> predicted) {
    metrics_detail::check_lengths(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
    return sum / static_cast<double>(actual.size());
}

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    metrics_detail::check_lengths(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        sum += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

/// Signed relative percentage error (er - pr) / er * 100.
inline double relative_percent_error(double er, double pr) {
    if (er == 0.0) throw DomainError("relative_percent_error: reference value is zero");
    return (er - pr) / er * 100.0;
}

} // namespace vrfbml

#endif // VRFBML_METRICS_HPP
