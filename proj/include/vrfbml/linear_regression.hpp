#ifndef VRFBML_LINEAR_REGRESSION_HPP
#define VRFBML_LINEAR_REGRESSION_HPP

#include <cmath>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"

namespace vrfbml {

struct LinearModel {
    double slope = 0.0;     // degC s^-1
    double intercept = 0.0; // degC
};

/**
 * Closed-form ordinary least squares on (time, temperature):
 * slope = cov(x, y) / var(x), intercept = mean(y) - slope * mean(x).
 * Centered two-pass sums keep the normal equations well conditioned for
 * time axes far from zero.
 */
inline LinearModel fit_lr(const TimeSeriesDataset& train) {
    const std::size_t n = train.size();
    if (n < 2) throw TrainingError("fit_lr: need at least 2 samples");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& s : train.samples) {
        mean_x += s.time_s;
        mean_y += s.temperature_c;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : train.samples) {
        const double dx = s.time_s - mean_x;
        sxx += dx * dx;
        sxy += dx * (s.temperature_c - mean_y);
    }
    if (!(sxx > 0.0))
        throw TrainingError("fit_lr: all sample times are equal, slope is undefined");

    LinearModel model;
    model.slope = sxy / sxx;
    model.intercept = mean_y - model.slope * mean_x;
    if (!std::isfinite(model.slope) || !std::isfinite(model.intercept))
        throw TrainingError("fit_lr: produced non-finite coefficients");
    return model;
}

inline double predict_lr(const LinearModel& model, double time_s) {
    return model.slope * time_s + model.intercept;
}

} // namespace vrfbml

#endif // VRFBML_LINEAR_REGRESSION_HPP
