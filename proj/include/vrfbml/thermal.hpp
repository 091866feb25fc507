#ifndef VRFBML_THERMAL_HPP
#define VRFBML_THERMAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"
#include "vrfbml/params.hpp"

namespace vrfbml {

/**
 * Open-circuit stack voltage as a function of state of charge and absolute
 * temperature:
 *
 *   E = n * { E0 + (2 R T / F) ln(soc / (1 - soc)) - I_d R_sd }
 */
inline double nernst_ocv(const VrfbParams& params, double soc, double temperature_k) {
    if (!(soc > 0.0 && soc < 1.0))
        throw DomainError("nernst_ocv: soc must be in (0, 1), got " + std::to_string(soc));
    if (!(temperature_k > 0.0))
        throw DomainError("nernst_ocv: temperature must be > 0 K");
    const double log_term =
        2.0 * params.r_gas * temperature_k / params.faraday * std::log(soc / (1.0 - soc));
    return params.n_cells * (params.e0 + log_term - params.i_diff * params.r_sd);
}

struct StateDerivs {
    double d_t_stack = 0.0; // K s^-1
    double d_t_pos = 0.0;
    double d_t_neg = 0.0;
    double d_soc = 0.0; // s^-1
};

/**
 * Right-hand side of the coupled stack/tank energy balances plus coulomb
 * counting. The mode picks the (current, resistance) pair; the entropic term
 * uses the stack temperature in kelvin. Pure function of its inputs.
 */
inline StateDerivs ode_rhs(const ThermalState& state, const VrfbParams& params,
                           const OperatingProfile& profile) {
    const double q = profile.flow_m3_s();
    const double cpr = params.heat_capacity_per_m3();
    const double current = profile.current;
    const double resistance = profile.mode_resistance(params);
    const double t_stack_k = state.t_stack + kCelsiusToKelvin;

    StateDerivs d;
    d.d_t_stack = (q * cpr * (state.t_pos - state.t_stack) +
                   q * cpr * (state.t_neg - state.t_stack) +
                   current * current * resistance + current * t_stack_k * params.de_dt) /
                  (cpr * params.v_stack);
    d.d_t_pos = (q * cpr * (state.t_stack - state.t_pos) +
                 params.u_pos * params.a_pos * (params.t_ambient - state.t_pos)) /
                (cpr * params.v_pos);
    d.d_t_neg = (q * cpr * (state.t_stack - state.t_neg) +
                 params.u_neg * params.a_neg * (params.t_ambient - state.t_neg)) /
                (cpr * params.v_neg);
    const double soc_rate = current / (params.capacity_ah * kSecondsPerHour);
    d.d_soc = profile.mode == Mode::Charging ? soc_rate : -soc_rate;
    return d;
}

namespace thermal_detail {

inline ThermalState apply(const ThermalState& s, const StateDerivs& d, double h) {
    ThermalState out = s;
    out.t_stack = s.t_stack + h * d.d_t_stack;
    out.t_pos = s.t_pos + h * d.d_t_pos;
    out.t_neg = s.t_neg + h * d.d_t_neg;
    out.soc = s.soc + h * d.d_soc;
    return out;
}

} // namespace thermal_detail

/// One classical RK4 step of size h, with the SOC clamped to its ln-domain
/// guard band afterwards.
inline ThermalState rk4_advance(const ThermalState& s, const VrfbParams& p,
                                const OperatingProfile& prof, double h) {
    using thermal_detail::apply;
    const StateDerivs k1 = ode_rhs(s, p, prof);
    const StateDerivs k2 = ode_rhs(apply(s, k1, h / 2.0), p, prof);
    const StateDerivs k3 = ode_rhs(apply(s, k2, h / 2.0), p, prof);
    const StateDerivs k4 = ode_rhs(apply(s, k3, h), p, prof);
    ThermalState out = s;
    out.t_stack += h / 6.0 * (k1.d_t_stack + 2.0 * k2.d_t_stack + 2.0 * k3.d_t_stack + k4.d_t_stack);
    out.t_pos += h / 6.0 * (k1.d_t_pos + 2.0 * k2.d_t_pos + 2.0 * k3.d_t_pos + k4.d_t_pos);
    out.t_neg += h / 6.0 * (k1.d_t_neg + 2.0 * k2.d_t_neg + 2.0 * k3.d_t_neg + k4.d_t_neg);
    out.soc += h / 6.0 * (k1.d_soc + 2.0 * k2.d_soc + 2.0 * k3.d_soc + k4.d_soc);
    out.soc = std::clamp(out.soc, kSocMin, kSocMax);
    out.t = s.t + h;
    return out;
}

struct SimulationResult {
    TimeSeriesDataset data; // (t, stack temperature) at t = 0 and after every step
    ThermalState final_state;
};

/**
 * Integrate the thermal model with classical fixed-step RK4. Both tanks and
 * the stack start at the profile's initial temperature. A shorter final step
 * is taken when the duration is not a multiple of dt, so the series always
 * ends exactly at t = duration.
 */
inline SimulationResult simulate_cycle(const VrfbParams& params, const OperatingProfile& profile,
                                       double dt) {
    params.validate();
    profile.validate();
    if (!(dt > 0.0)) throw ValidationError("simulate_cycle: dt must be > 0");
    if (dt > profile.duration)
        throw ValidationError("simulate_cycle: dt must not exceed the profile duration");

    SimulationResult result;
    result.data.meta = ScenarioMeta{profile.current, profile.mode, profile.flow_l_min,
                                    params.t_ambient, DataSource::Synthetic, std::nullopt};

    ThermalState state;
    state.t = 0.0;
    state.t_stack = profile.t_initial;
    state.t_pos = profile.t_initial;
    state.t_neg = profile.t_initial;
    state.soc = std::clamp(profile.soc_initial, kSocMin, kSocMax);

    auto n_full = static_cast<std::size_t>(std::floor(profile.duration / dt * (1.0 + 1e-12)));
    double remainder = profile.duration - static_cast<double>(n_full) * dt;
    if (remainder < dt * 1e-9) remainder = 0.0;

    result.data.samples.reserve(n_full + 2);
    result.data.samples.push_back({0.0, state.t_stack});
    for (std::size_t k = 0; k < n_full; ++k) {
        state = rk4_advance(state, params, profile, dt);
        state.t = static_cast<double>(k + 1) * dt;
        if (!state.finite())
            throw SimulationError("simulate_cycle: state became non-finite at t = " +
                                  std::to_string(state.t));
        result.data.samples.push_back({state.t, state.t_stack});
    }
    if (remainder > 0.0) {
        state = rk4_advance(state, params, profile, remainder);
        state.t = profile.duration;
        if (!state.finite())
            throw SimulationError("simulate_cycle: state became non-finite at t = " +
                                  std::to_string(state.t));
        result.data.samples.push_back({state.t, state.t_stack});
    }
    result.final_state = state;
    return result;
}

/**
 * Algebraic shortcut for the stack temperature under the equal-tank
 * assumption, evaluated in the library's SI storage units. Kept as a
 * traceability evaluator only; it is dimensionally loose as written, so the
 * ODE integrator remains the sole source of generated data.
 */
inline double closed_form_temp(const VrfbParams& params, const OperatingProfile& profile,
                               double tank_temp_c, double elapsed_s) {
    if (elapsed_s < 0.0) throw DomainError("closed_form_temp: elapsed must be >= 0");
    const double current = profile.current;
    const double resistance = profile.mode_resistance(params);
    const double q = profile.flow_m3_s();
    const double cpr = params.heat_capacity_per_m3();
    const double denominator =
        cpr * (params.v_stack + 2.0 * q * elapsed_s - current * params.de_dt / cpr);
    if (denominator == 0.0)
        throw DomainError("closed_form_temp: denominator evaluates to zero");
    return (q / params.v_stack) * elapsed_s * tank_temp_c / denominator +
           current * current * resistance * elapsed_s / denominator;
}

inline double mean_stack_temperature(const SimulationResult& sim) {
    double sum = 0.0;
    for (const auto& s : sim.data.samples) sum += s.temperature_c;
    return sum / static_cast<double>(sim.data.samples.size());
}

inline double max_stack_temperature(const SimulationResult& sim) {
    double best = sim.data.samples.front().temperature_c;
    for (const auto& s : sim.data.samples) best = std::max(best, s.temperature_c);
    return best;
}

/**
 * Solve for the stack resistance of the profile's mode such that the
 * time-mean simulated stack temperature hits target_mean_c. Joule heat is
 * monotone in R, so plain bisection on [0, r_max] is exact; the returned R
 * reproduces the target within 1e-3 degC. Throws CalibrationError (reporting
 * the achieved mean) when the bracket does not contain the target.
 */
inline double calibrate_resistance(const VrfbParams& params, const OperatingProfile& profile,
                                   double target_mean_c, double dt, double r_max = 10.0) {
    params.validate();
    profile.validate();
    if (!(r_max > 0.0)) throw ValidationError("calibrate_resistance: r_max must be > 0");
    if (target_mean_c < profile.t_initial)
        throw CalibrationError("calibrate_resistance: target mean " +
                               std::to_string(target_mean_c) +
                               " degC is below the initial temperature " +
                               std::to_string(profile.t_initial) + " degC");

    const auto mean_for = [&](double r) {
        VrfbParams p = params;
        if (profile.mode == Mode::Charging) {
            p.r_charge = r;
        } else {
            p.r_discharge = r;
        }
        return mean_stack_temperature(simulate_cycle(p, profile, dt));
    };

    constexpr double kMeanTol = 1e-4; // target tolerance, below the 1e-3 contract
    const double mean_low = mean_for(0.0);
    if (std::abs(mean_low - target_mean_c) <= kMeanTol) return 0.0;
    if (mean_low > target_mean_c)
        throw CalibrationError("calibrate_resistance: mean at R=0 is " +
                               std::to_string(mean_low) + " degC, already above the target " +
                               std::to_string(target_mean_c) + " degC");
    const double mean_high = mean_for(r_max);
    if (mean_high < target_mean_c - kMeanTol)
        throw CalibrationError("calibrate_resistance: even R=" + std::to_string(r_max) +
                               " ohm undershoots the target; achieved mean " +
                               std::to_string(mean_high) + " degC");

    double lo = 0.0, hi = r_max;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, r_max); ++iter) {
        mid = 0.5 * (lo + hi);
        if (mean_for(mid) < target_mean_c) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid = 0.5 * (lo + hi);
    const double achieved = mean_for(mid);
    if (std::abs(achieved - target_mean_c) > 1e-3)
        throw CalibrationError("calibrate_resistance: bisection stalled; achieved mean " +
                               std::to_string(achieved) + " degC vs target " +
                               std::to_string(target_mean_c) + " degC");
    return mid;
}

} // namespace vrfbml

#endif // VRFBML_THERMAL_HPP
