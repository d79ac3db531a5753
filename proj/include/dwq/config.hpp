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

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace dwq {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
inline constexpr double two_pi = 2.0 * std::numbers::pi;
/// Trap frequency for which the thermal-emission scaling is quoted.
inline constexpr double reference_trap_frequency = two_pi * 100e3;
} // namespace constants

/// Parameters of one run.
///
/// Internally every length is measured in x_zpf, every time in 1/omega_dw and
/// hbar = 1. In those units the mass is 1 / (2 omega_t/omega_dw) and the
/// Hamiltonian depends only on omega_t/omega_dw and d/x_zpf. The SI mass is
/// optional; without it the SI lengths in a scales report are left empty.
struct ExperimentConfig {
    std::string label;
    std::optional<double> mass;       // kg
    double trap_frequency = constants::reference_trap_frequency; // rad/s
    double well_frequency = 0.0;      // rad/s
    double well_length = 0.0;         // units of x_zpf
    double start_ratio = 0.0;         // x0 / d
    double mean_phonons = 0.0;
    double decoherence_rate = 0.0;    // units of omega_t
    double position_imprecision = 0.0; // units of x_zpf
    double timing_imprecision = 0.0;   // units of 1/omega_dw

    /// omega_t / omega_dw
    [[nodiscard]] double frequency_ratio() const { return trap_frequency / well_frequency; }
    /// x0 in units of x_zpf
    [[nodiscard]] double start_position() const { return start_ratio * well_length; }
    [[nodiscard]] double mass_internal() const { return 0.5 / frequency_ratio(); }
    /// Decoherence rate in units of omega_dw.
    [[nodiscard]] double gamma_internal() const { return decoherence_rate * frequency_ratio(); }

    void validate() const
    {
        using detail::require;
        require(std::isfinite(trap_frequency) && trap_frequency > 0.0, "trap_frequency must be > 0");
        require(std::isfinite(well_frequency) && well_frequency > 0.0, "well_frequency must be > 0");
        require(std::isfinite(well_length) && well_length > 0.0, "well_length must be > 0");
        require(start_ratio > 0.0 && start_ratio < 1.0,
                "start_position must satisfy 0 < x0 < d");
        require(mean_phonons >= 0.0, "mean_phonons must be >= 0");
        require(decoherence_rate >= 0.0, "decoherence_rate must be >= 0");
        require(position_imprecision >= 0.0, "position_imprecision must be >= 0");
        require(timing_imprecision >= 0.0, "timing_imprecision must be >= 0");
        if (mass) require(*mass > 0.0, "mass must be > 0");
    }

    /// Advisory checks for the wide-well regime; never fatal.
    [[nodiscard]] std::vector<std::string> regime_warnings() const
    {
        std::vector<std::string> out;
        if (well_length < 100.0) out.emplace_back("well_length is not >> x_zpf");
        if (well_frequency > 0.1 * trap_frequency) out.emplace_back("omega_dw is not << omega_t");
        return out;
    }
};

struct GasSpec {
    double molecule_mass = 4.65e-26; // kg (N2)
    double temperature = 300.0;      // K
    double pressure = 1e-8;          // Pa
};

/// White-noise strengths and environment of the particle. The PSDs follow
/// <z(t) z(t')> = 2 pi S delta(t - t').
struct NoiseSpectra {
    double s1 = 0.0; // s, position fluctuation of the potential (units of x_zpf)
    double s2 = 0.0; // s, relative amplitude fluctuation of the potential
    double sf = 0.0; // N^2 s, force noise
    std::optional<GasSpec> gas;
    std::optional<double> particle_radius;      // m
    std::optional<double> internal_temperature; // K

    void validate() const
    {
        using detail::require;
        require(s1 >= 0.0 && s2 >= 0.0 && sf >= 0.0, "noise PSDs must be >= 0");
        if (gas) {
            require(gas->molecule_mass > 0.0, "gas molecule mass must be > 0");
            require(gas->temperature > 0.0, "gas temperature must be > 0");
            require(gas->pressure > 0.0, "gas pressure must be > 0");
        }
        if (particle_radius) require(*particle_radius > 0.0, "particle radius must be > 0");
        if (internal_temperature) require(*internal_temperature > 0.0, "internal temperature must be > 0");
    }
};

struct PresetInfo {
    std::string_view name;
    double start_ratio;
    double well_length;  // x_zpf
    double frequency_ratio_inv; // omega_dw / omega_t
    bool derived;        // built from the eta formula rather than tabulated
};

/// Named parameter sets. XXL, XL and L are tabulated; M, S and XS are the
/// desk-scale sets with eta = 100, 10 and 10^(1/20) at x0/d = 0.1.
inline const std::array<PresetInfo, 6>& preset_table()
{
    static const std::array<PresetInfo, 6> table = [] {
        auto desk = [](std::string_view name, double eta, double d) {
            const double ratio = std::numbers::sqrt2 * eta * 0.1; // omega_t/omega_dw
            return PresetInfo{name, 0.1, d, 1.0 / ratio, true};
        };
        return std::array<PresetInfo, 6>{
            PresetInfo{"XXL", 0.1, 1e8, 1e-4, false},
            PresetInfo{"XL", 0.1, 1e6, 1e-3, false},
            PresetInfo{"L", 0.1, 1e4, 1e-2, false},
            desk("M", 100.0, 1e3),
            desk("S", 10.0, 1e2),
            desk("XS", std::pow(10.0, 1.0 / 20.0), 30.0),
        };
    }();
    return table;
}

inline const PresetInfo& preset_info(std::string_view name)
{
    for (const auto& p : preset_table())
        if (p.name == name) return p;
    throw DomainError("unknown preset '" + std::string(name) + "'");
}

inline ExperimentConfig preset(std::string_view name)
{
    const auto& info = preset_info(name);
    ExperimentConfig c;
    c.label = std::string(name);
    c.trap_frequency = constants::reference_trap_frequency;
    c.well_frequency = c.trap_frequency * info.frequency_ratio_inv;
    c.well_length = info.well_length;
    c.start_ratio = info.start_ratio;
    return c;
}

} // namespace dwq
