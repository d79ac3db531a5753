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
#include <concepts>
#include <limits>

#include "classical.hpp"
#include "config.hpp"
#include "errors.hpp"

namespace dwq::solver {

/// Classical reference point of the co-moving frame, internal units:
/// position, momentum, V(x_c) and V'(x_c).
struct FrameState {
    double x_c = 0.0;
    double p_c = 0.0;
    double v_c = 0.0;
    double dv_c = 0.0;
};

/// V_eff(y) = c2 y^2 + c3 y^3 + c4 y^4.
struct Quartic {
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    [[nodiscard]] double operator()(double y) const { return y * y * (c2 + y * (c3 + y * c4)); }
};

template <class M>
concept Model = requires(const M& m, double t) {
    { m.mass() } -> std::convertible_to<double>;
    { m.effective(t) } -> std::same_as<Quartic>;
    { m.frame(t) } -> std::same_as<FrameState>;
    { m.frame_horizon() } -> std::convertible_to<double>;
};

/// Hamiltonian seen in the frame that follows a classical trajectory.
///
/// For the double well the effective potential is
/// V(x_c + y) - V(x_c) - V'(x_c) y, so the frame only has to hold the
/// wavepacket. The harmonic and free variants keep the frame at rest and are
/// used for validation.
class CoMovingModel {
public:
    enum class Kind { double_well, harmonic, free };

    /// Frame following the orbit that starts at x0 + dx0 with momentum dp0
    /// (both internal units). The orbit is tabulated up to t_end.
    static CoMovingModel double_well(const ExperimentConfig& c, double t_end, double dx0 = 0.0, double dp0 = 0.0)
    {
        c.validate();
        CoMovingModel m;
        m.kind_ = Kind::double_well;
        m.well_ = DoubleWell::from(c);
        m.mass_ = m.well_.mass;
        const double d = c.well_length;
        const double u0 = (c.start_position() + dx0) / d;
        const double v0 = dp0 / (m.mass_ * d);
        m.orbit_ = classical::DenseOrbit(u0, t_end + 0.01, 1e-3, v0);
        return m;
    }

    static CoMovingModel harmonic(double mass, double omega)
    {
        detail::require(mass > 0.0 && omega >= 0.0, "harmonic model needs mass > 0, omega >= 0");
        CoMovingModel m;
        m.kind_ = Kind::harmonic;
        m.mass_ = mass;
        m.omega_ = omega;
        return m;
    }

    static CoMovingModel free_particle(double mass)
    {
        detail::require(mass > 0.0, "free model needs mass > 0");
        CoMovingModel m;
        m.kind_ = Kind::free;
        m.mass_ = mass;
        return m;
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double mass() const { return mass_; }
    [[nodiscard]] const DoubleWell& well() const { return well_; }
    /// Latest time the frame is defined for.
    [[nodiscard]] double frame_horizon() const
    {
        return kind_ == Kind::double_well ? orbit_.t_end() : std::numeric_limits<double>::infinity();
    }

    [[nodiscard]] Quartic effective(double t) const
    {
        switch (kind_) {
        case Kind::double_well: {
            const double u = orbit_.at(t).u;
            const double d = well_.d;
            return {0.5 * mass_ * (3.0 * u * u - 1.0), mass_ * u / d, 0.25 * mass_ / (d * d)};
        }
        case Kind::harmonic:
            return {0.5 * mass_ * omega_ * omega_, 0.0, 0.0};
        case Kind::free:
            break;
        }
        return {};
    }

    [[nodiscard]] FrameState frame(double t) const
    {
        if (kind_ != Kind::double_well) return {};
        const auto s = orbit_.at(t);
        const double x = s.u * well_.d;
        return {x, mass_ * s.v * well_.d, well_.potential(x), -well_.force(x)};
    }

private:
    Kind kind_ = Kind::free;
    double mass_ = 1.0;
    double omega_ = 0.0;
    DoubleWell well_{};
    classical::DenseOrbit orbit_{};
};

static_assert(Model<CoMovingModel>);

} // namespace dwq::solver
