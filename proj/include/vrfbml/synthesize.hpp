#ifndef VRFBML_SYNTHESIZE_HPP
#define VRFBML_SYNTHESIZE_HPP

#include <cstdint>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"
#include "vrfbml/random.hpp"
#include "vrfbml/thermal.hpp"

namespace vrfbml {

/**
 * Simulator output plus i.i.d. Gaussian measurement noise N(0, sigma^2) from
 * a seeded generator. Deterministic in (params, profile, noise_sigma, seed,
 * dt); with sigma = 0 the result equals the clean simulation exactly.
 */
inline TimeSeriesDataset synthesize(const VrfbParams& params, const OperatingProfile& profile,
                                    double noise_sigma, std::uint64_t seed, double dt) {
    if (!(noise_sigma >= 0.0))
        throw ValidationError("synthesize: noise_sigma must be >= 0");
    TimeSeriesDataset data = simulate_cycle(params, profile, dt).data;
    data.meta.source = DataSource::Synthetic;
    data.meta.seed = seed;
    if (noise_sigma > 0.0) {
        Rng rng(seed);
        for (auto& s : data.samples) s.temperature_c += rng.gaussian(noise_sigma);
    }
    return data;
}

} // namespace vrfbml

#endif // VRFBML_SYNTHESIZE_HPP
