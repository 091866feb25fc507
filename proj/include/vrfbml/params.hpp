#ifndef VRFBML_PARAMS_HPP
#define VRFBML_PARAMS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "vrfbml/errors.hpp"

namespace vrfbml {

enum class Mode { Charging, Discharging };

inline std::string to_string(Mode m) {
    return m == Mode::Charging ? "charging" : "discharging";
}

inline Mode mode_from_string(const std::string& s) {
    if (s == "charging") return Mode::Charging;
    if (s == "discharging") return Mode::Discharging;
    throw ValueError("unknown mode '" + s + "' (expected charging|discharging)");
}

constexpr double kCelsiusToKelvin = 273.15;
constexpr double kSecondsPerHour = 3600.0;

constexpr double liters_to_m3(double liters) { return liters * 1e-3; }
constexpr double m3_to_liters(double m3) { return m3 * 1e3; }
constexpr double l_per_min_to_m3_per_s(double l_min) { return l_min * 1e-3 / 60.0; }

// Plant ratings (used for warnings only, never hard errors).
constexpr double kRatedCurrentA = 60.0;
constexpr double kFlowRangeMinLMin = 1.0;
constexpr double kFlowRangeMaxLMin = 18.0;

/**
 * Physical constants and plant parameters of the lumped stack/tank thermal
 * model. All quantities are stored in SI base units (volumes in m^3, flow in
 * m^3 s^-1 where used); builders and the config loader accept liters and
 * L min^-1 at the boundary and convert once.
 */
struct VrfbParams {
    double cp = 3.2;              // specific heat of electrolyte, J g^-1 K^-1
    double rho = 1.35e6;          // electrolyte density, g m^-3
    double v_stack = 5.0e-3;      // electrolyte volume inside the stack, m^3
    double v_pos = 20.0e-3;       // positive tank volume, m^3
    double v_neg = 20.0e-3;       // negative tank volume, m^3
    double a_pos = 1.5;           // positive tank surface area, m^2
    double a_neg = 1.5;           // negative tank surface area, m^2
    double u_pos = 135.0;         // overall heat-transfer coefficient, W m^-2 K^-1
    double u_neg = 135.0;
    double r_charge = 0.05;       // overall stack resistance while charging, ohm
    double r_discharge = 0.05;    // overall stack resistance while discharging, ohm
    double de_dt = 0.0;           // entropic coefficient dE/dT, V K^-1
    int n_cells = 20;             // series cells in the stack
    double e0 = 1.40;             // per-cell equilibrium potential at 50% SOC, V
    double r_sd = 0.0;            // self-discharge equivalent resistance, ohm
    double i_diff = 0.0;          // diffusion current, A
    double faraday = 96485.33212; // Faraday constant, C mol^-1
    double r_gas = 8.3144;        // universal gas constant, J K^-1 mol^-1
    double t_ambient = 18.0;      // ambient temperature, degC
    double capacity_ah = 230.0;   // nominal charge capacity, A h

    double heat_capacity_per_m3() const { return cp * rho; } // J m^-3 K^-1

    /// Throws ValidationError if any invariant fails.
    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ValidationError(std::string("VrfbParams: ") + name + " must be > 0");
        };
        auto non_negative = [](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ValidationError(std::string("VrfbParams: ") + name + " must be >= 0");
        };
        positive(cp, "cp");
        positive(rho, "rho");
        positive(v_stack, "v_stack");
        positive(v_pos, "v_pos");
        positive(v_neg, "v_neg");
        positive(a_pos, "a_pos");
        positive(a_neg, "a_neg");
        positive(capacity_ah, "capacity_ah");
        positive(faraday, "faraday");
        positive(r_gas, "r_gas");
        non_negative(u_pos, "u_pos");
        non_negative(u_neg, "u_neg");
        non_negative(r_charge, "r_charge");
        non_negative(r_discharge, "r_discharge");
        non_negative(r_sd, "r_sd");
        non_negative(i_diff, "i_diff");
        if (n_cells < 1) throw ValidationError("VrfbParams: n_cells must be >= 1");
        if (!std::isfinite(t_ambient)) throw ValidationError("VrfbParams: t_ambient must be finite");
        if (!std::isfinite(e0) || !std::isfinite(de_dt))
            throw ValidationError("VrfbParams: e0 and de_dt must be finite");
    }
};

/**
 * One charge or discharge run: constant current and flow over a fixed window.
 * Current is a magnitude; the mode decides its sign where a sign matters.
 */
struct OperatingProfile {
    Mode mode = Mode::Charging;
    double current = 0.0;     // stack terminal current, A (magnitude)
    double flow_l_min = 10.0; // electrolyte flow rate Q = Q+ = Q-, L min^-1
    double duration = 3600.0; // total simulated time, s
    double soc_initial = 0.5; // initial state of charge, fraction
    double t_initial = 24.0;  // initial electrolyte temperature everywhere, degC

    double flow_m3_s() const { return l_per_min_to_m3_per_s(flow_l_min); }

    double mode_resistance(const VrfbParams& p) const {
        return mode == Mode::Charging ? p.r_charge : p.r_discharge;
    }

    void validate() const {
        if (!(current >= 0.0) || !std::isfinite(current))
            throw ValidationError("OperatingProfile: current must be >= 0");
        if (!(flow_l_min >= 0.0) || !std::isfinite(flow_l_min))
            throw ValidationError("OperatingProfile: flow_l_min must be >= 0");
        if (!(duration > 0.0) || !std::isfinite(duration))
            throw ValidationError("OperatingProfile: duration must be > 0");
        if (!(soc_initial > 0.0 && soc_initial < 1.0))
            throw ValidationError("OperatingProfile: soc_initial must be in (0, 1)");
        if (!std::isfinite(t_initial))
            throw ValidationError("OperatingProfile: t_initial must be finite");
    }
};

/// Rating excursions worth telling the operator about. Never fatal.
inline std::vector<std::string> rating_warnings(const OperatingProfile& profile) {
    std::vector<std::string> warnings;
    if (profile.current > kRatedCurrentA)
        warnings.push_back("current " + std::to_string(profile.current) +
                           " A exceeds the 60 A stack rating");
    if (profile.flow_l_min < kFlowRangeMinLMin || profile.flow_l_min > kFlowRangeMaxLMin)
        warnings.push_back("flow rate " + std::to_string(profile.flow_l_min) +
                           " L/min is outside the specified (1-18) L/min range");
    return warnings;
}

// ln-domain guard for the Nernst term: SOC never leaves this band.
constexpr double kSocMin = 0.01;
constexpr double kSocMax = 0.99;

/// Instantaneous simulator state. Temperatures in degC, soc as a fraction.
struct ThermalState {
    double t = 0.0;       // s
    double t_stack = 0.0; // degC
    double t_pos = 0.0;   // degC
    double t_neg = 0.0;   // degC
    double soc = 0.5;

    bool finite() const {
        return std::isfinite(t_stack) && std::isfinite(t_pos) && std::isfinite(t_neg) &&
               std::isfinite(soc);
    }
};

} // namespace vrfbml

#endif // VRFBML_PARAMS_HPP
