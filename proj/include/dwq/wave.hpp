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
#include <cstdint>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "model.hpp"

namespace dwq::solver {

/// Offset of a coherent state relative to its frame, internal units
/// (x in x_zpf, p in hbar/x_zpf).
struct Displacement {
    double x = 0.0;
    double p = 0.0;
};

/// Wavefunction in the co-moving coordinate y = x - x_c(t), normalised so
/// that sum |psi_j|^2 dx = 1 initially.
struct WaveState {
    GridSpec grid;
    ComplexVector psi;
    double t = 0.0;
    std::uint64_t steps = 0;
    FrameState frame;
    /// Integral of p_c^2/2m - V(x_c): the phase taking the frame back to the lab.
    double frame_phase = 0.0;

    [[nodiscard]] double norm() const
    {
        double s = 0.0;
        for (const auto& a : psi) s += std::norm(a);
        return s * grid.dx;
    }

    /// |psi|^2 per unit length (not renormalised).
    [[nodiscard]] std::vector<double> density() const
    {
        std::vector<double> out(psi.size());
        for (std::size_t j = 0; j < psi.size(); ++j) out[j] = std::norm(psi[j]);
        return out;
    }
};

/// Coherent state of width x_zpf, offset by `offset` inside the frame.
inline WaveState initial_state(const GridSpec& grid, const FrameState& frame0, Displacement offset = {},
                               double tail_tolerance = 1e-12)
{
    grid.validate();
    const double half = grid.interior_half_width();
    // Mass of a unit-width Gaussian beyond the absorbing edge.
    const double room = half - std::abs(offset.x);
    const double tail = room > 0.0 ? std::erfc(room / std::sqrt(2.0)) : 1.0;
    if (tail > tail_tolerance) throw GridError("grid too small for the initial wavepacket");
    if (std::abs(offset.p) + 6.0 > grid.k_nyquist()) throw GridError("grid too coarse for the initial momentum");

    WaveState s;
    s.grid = grid;
    s.frame = frame0;
    s.psi.resize(grid.n);
    const double amp = std::pow(2.0 * std::numbers::pi, -0.25);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double y = grid.x(j) - offset.x;
        s.psi[j] = amp * std::exp(-0.25 * y * y) * std::polar(1.0, offset.p * grid.x(j));
    }
    return s;
}

/// Position and momentum moments of a (possibly absorbed) state, normalised
/// by the remaining norm.
struct Moments {
    double norm = 0.0;
    double mean_x = 0.0;
    double var_x = 0.0;
    double excess_kurtosis = 0.0;
    double mean_p = 0.0;
    double var_p = 0.0;
    double mean_p2 = 0.0;
    double mean_veff = 0.0;
};

inline Moments measure(const WaveState& s, const FftPlan& plan, const Quartic& veff, ComplexVector& scratch)
{
    const auto& g = s.grid;
    Moments m;
    double s0 = 0.0, s1 = 0.0, sv = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double w = std::norm(s.psi[j]);
        const double y = g.x(j);
        s0 += w;
        s1 += w * y;
        sv += w * veff(y);
    }
    m.norm = s0 * g.dx;
    if (!(s0 > 0.0)) return m;
    m.mean_x = s1 / s0;
    m.mean_veff = sv / s0;
    double c2 = 0.0, c4 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double w = std::norm(s.psi[j]);
        const double d = g.x(j) - m.mean_x;
        c2 += w * d * d;
        c4 += w * d * d * d * d;
    }
    m.var_x = c2 / s0;
    m.excess_kurtosis = m.var_x > 0.0 ? (c4 / s0) / (m.var_x * m.var_x) - 3.0 : 0.0;

    scratch.assign(s.psi.begin(), s.psi.end());
    plan.forward(scratch);
    double q0 = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double w = std::norm(scratch[j]);
        const double k = g.k(j);
        q0 += w;
        q1 += w * k;
        q2 += w * k * k;
    }
    m.mean_p = q1 / q0;
    m.mean_p2 = q2 / q0;
    m.var_p = m.mean_p2 - m.mean_p * m.mean_p;
    return m;
}

/// Lab-frame energy per unit norm: the frame's classical energy plus the
/// excess carried by the co-moving state.
inline double lab_energy(const Moments& m, const FrameState& f, double mass)
{
    const double classical = f.p_c * f.p_c / (2.0 * mass) + f.v_c;
    const double excess = m.mean_p2 / (2.0 * mass) + f.p_c * m.mean_p / mass + f.dv_c * m.mean_x + m.mean_veff;
    return classical + excess;
}

/// Overlap <a|b> on a shared grid.
inline Complex overlap(const WaveState& a, const WaveState& b)
{
    if (!(a.grid == b.grid)) throw GridError("overlap needs identical grids");
    Complex s{};
    for (std::size_t j = 0; j < a.psi.size(); ++j) s += std::conj(a.psi[j]) * b.psi[j];
    return s * a.grid.dx;
}

} // namespace dwq::solver
