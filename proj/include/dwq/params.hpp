/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "classical.hpp"
#include "config.hpp"
#include "errors.hpp"

namespace dwq {

/// eta = (omega_t/omega_dw)(d/x0)/sqrt(2): peak spread in units of x_zpf.
inline double delocalization(const ExperimentConfig& c) { return c.frequency_ratio() / (c.start_ratio * std::numbers::sqrt2); }

/// S0 = 20 log10 eta.
inline double squeezing_s0(double eta)
{
    detail::require(eta > 0.0, "eta must be > 0");
    return 20.0 * std::log10(eta);
}

/// Estimated fringe spacing in x_zpf: 2.5 (omega_t/omega_dw)^(2/3) (x_zpf/d)^(1/3),
/// normalised so that the three tabulated sets give 2.5.
inline double fringe_estimate(const ExperimentConfig& c)
{
    return 2.5 * std::cbrt(c.frequency_ratio() * c.frequency_ratio() / c.well_length);
}

struct GasTime {
    double t_gas = 0.0; // s
    std::optional<bool> feasible; // 2 t_max < t_gas / ratio, when t_max is known
};

/// t_gas = 3 sqrt(m_gas k_B T) / (16 pi sqrt(2 pi) P R^2): mean time between
/// gas collisions for a sphere of radius R.
inline GasTime gas_collision_time(const GasSpec& gas, double radius, std::optional<double> t_max_seconds = {},
                                  double ratio = 10.0)
{
    detail::require(gas.molecule_mass > 0.0 && gas.temperature > 0.0, "gas mass and temperature must be > 0");
    detail::require(gas.pressure > 0.0, "gas pressure must be > 0");
    detail::require(radius > 0.0, "particle radius must be > 0");
    detail::require(ratio > 0.0, "feasibility ratio must be > 0");
    const double pi = std::numbers::pi;
    GasTime out;
    out.t_gas = 3.0 * std::sqrt(gas.molecule_mass * constants::k_boltzmann * gas.temperature) /
                (16.0 * pi * std::sqrt(2.0 * pi) * gas.pressure * radius * radius);
    if (t_max_seconds) out.feasible = 2.0 * *t_max_seconds < out.t_gas / ratio;
    return out;
}

struct ThermalRate {
    double rate = 0.0;          // 1/s
    double over_omega_t = 0.0;
    bool quoted_case = false;   // silica at omega_t = 2 pi x 100 kHz
};

/// Gamma_T = omega_t 1e-10 (T / 300 K)^6. The scaling is quoted for silica at
/// a 100 kHz trap; other trap frequencies only rescale omega_t and are
/// flagged as outside the quoted case.
inline ThermalRate thermal_decoherence_rate(double temperature, double trap_frequency)
{
    detail::require(temperature > 0.0, "temperature must be > 0");
    detail::require(trap_frequency > 0.0, "trap frequency must be > 0");
    ThermalRate out;
    out.over_omega_t = 1e-10 * std::pow(temperature / 300.0, 6);
    out.rate = out.over_omega_t * trap_frequency;
    out.quoted_case =
        std::abs(trap_frequency - constants::reference_trap_frequency) <= 1e-9 * constants::reference_trap_frequency;
    return out;
}

/// Upper bound on the decoherence rate from potential fluctuations, in units
/// of omega_t:
/// (2 pi omega_dw / 4)(omega_dw/omega_t)^3 [25 S1 + 2 (d/x_zpf)^2 S2].
inline double potential_noise_bound(const NoiseSpectra& spectra, const ExperimentConfig& c)
{
    detail::require(spectra.s1 >= 0.0 && spectra.s2 >= 0.0, "noise PSDs must be >= 0");
    const double q = 1.0 / c.frequency_ratio();
    const double d = c.well_length;
    return 0.5 * std::numbers::pi * c.well_frequency * q * q * q * (25.0 * spectra.s1 + 2.0 * d * d * spectra.s2);
}

/// Gamma_F = 2 pi x_zpf^2 S_F / hbar^2, in 1/s for SI inputs.
inline double force_noise_rate(double sf, double x_zpf, double hbar = constants::hbar)
{
    detail::require(sf >= 0.0, "force PSD must be >= 0");
    detail::require(x_zpf > 0.0 && hbar > 0.0, "x_zpf and hbar must be > 0");
    return 2.0 * std::numbers::pi * x_zpf * x_zpf * sf / (hbar * hbar);
}

/// Decoherence budget in units of omega_t. Missing inputs leave a term empty;
/// the total sums the available ones.
struct Budget {
    std::optional<double> thermal;
    std::optional<bool> thermal_quoted_case;
    double potential_bound = 0.0;
    std::optional<double> force;
    double total = 0.0;
};

struct DerivedScales {
    std::optional<double> x_zpf; // m
    std::optional<double> p_zpf; // kg m/s
    double eta = 0.0;
    double squeezing_s0 = 0.0;   // dB
    double t_max_formula = 0.0;  // 1/omega_dw
    double t_max = 0.0;          // 1/omega_dw, integrated orbit
    double t_d = 0.0;            // 1/omega_dw
    std::optional<double> t_max_seconds;
    double outer_turning_point = 0.0; // x_zpf
    double fringe_estimate = 0.0;     // x_zpf
    std::optional<GasTime> gas;
    std::optional<Budget> budget;
};

inline DerivedScales derive_scales(const ExperimentConfig& c, const std::optional<NoiseSpectra>& spectra = {})
{
    c.validate();
    DerivedScales s;
    if (c.mass) {
        s.x_zpf = std::sqrt(constants::hbar / (2.0 * *c.mass * c.trap_frequency));
        s.p_zpf = constants::hbar / (2.0 * *s.x_zpf);
    }
    s.eta = delocalization(c);
    s.squeezing_s0 = squeezing_s0(s.eta);
    s.t_max_formula = classical::period_approx(c);
    const auto orbit = classical::integrate_orbit(c, 1e-3);
    if (!orbit.t_max || !orbit.t_d) throw ToleranceError("classical orbit did not reach its turning point");
    s.t_max = *orbit.t_max;
    s.t_d = *orbit.t_d;
    s.t_max_seconds = s.t_max / c.well_frequency;
    s.outer_turning_point = std::sqrt(2.0 * c.well_length * c.well_length - c.start_position() * c.start_position());
    s.fringe_estimate = fringe_estimate(c);
    if (!spectra) return s;

    spectra->validate();
    Budget b;
    if (spectra->internal_temperature) {
        const auto th = thermal_decoherence_rate(*spectra->internal_temperature, c.trap_frequency);
        b.thermal = th.over_omega_t;
        b.thermal_quoted_case = th.quoted_case;
    }
    b.potential_bound = potential_noise_bound(*spectra, c);
    if (s.x_zpf) b.force = force_noise_rate(spectra->sf, *s.x_zpf) / c.trap_frequency;
    b.total = b.thermal.value_or(0.0) + b.potential_bound + b.force.value_or(0.0);
    s.budget = b;
    if (spectra->gas && spectra->particle_radius)
        s.gas = gas_collision_time(*spectra->gas, *spectra->particle_radius, s.t_max_seconds);
    return s;
}

} // namespace dwq
