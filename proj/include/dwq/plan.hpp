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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "classical.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "grid.hpp"
#include "params.hpp"

namespace dwq::solver {

struct PlanOptions {
    double dt = 1e-3;              ///< 1/omega_dw
    double span_sigmas = 24.0;     ///< span / max Delta x
    double max_dx = 0.25;          ///< x_zpf
    double points_per_fringe = 8.0;
    double momentum_sigmas = 8.0;  ///< Nyquist / max Delta p
    double absorb_fraction = 0.05;
    std::size_t min_points = 256;
    double memory_ceiling = 4.0 * 1024 * 1024 * 1024; ///< bytes for all live states
    double work_ceiling = 2e10;    ///< grid points x steps for one trajectory (~1 CPU hour)
    unsigned workers = 1;
    std::size_t snapshots = 4;
};

struct GridPlan {
    GridSpec grid;
    double dt = 0.0;
    double max_delta_x = 0.0;  ///< x_zpf, from the Gaussian propagator
    double max_delta_p = 0.0;  ///< hbar/x_zpf
    double fringe_estimate = 0.0;
    std::uint64_t steps = 0;
    double memory_bytes = 0.0;
    double work = 0.0;
};

/// Grid and step for evolving `c` up to t_end with decoherence rate gamma
/// (units of omega_t). The span and momentum cut-off follow the Gaussian
/// envelope; the spacing also resolves the expected fringes. Throws
/// ResourceError when the plan exceeds the memory or work ceilings.
inline GridPlan choose_grid(const ExperimentConfig& c, double t_end, double gamma, const PlanOptions& opt = {})
{
    c.validate();
    detail::require(t_end > 0.0, "t_end must be > 0");
    detail::require(opt.dt > 0.0 && opt.dt <= 0.01, "plan dt must lie in (0, 0.01]");
    const double u0 = c.start_ratio;
    auto kappa_orbit = classical::DenseOrbit(u0, t_end + 0.01);
    auto kappa = [&](double t) { return classical::curvature(kappa_orbit.at(t).u); };
    const auto init = gaussian::GaussianState::thermal(c.mean_phonons);
    const auto tl = gaussian::propagate_moments(kappa, c.frequency_ratio(), gamma * c.frequency_ratio(), init, t_end,
                                                opt.dt, {1e-9, 10});
    double sxx = 0.0, spp = 0.0;
    for (const auto& s : tl) {
        sxx = std::max(sxx, s.sxx);
        spp = std::max(spp, s.spp);
    }
    GridPlan p;
    p.dt = opt.dt;
    p.max_delta_x = std::sqrt(sxx);
    p.max_delta_p = 0.5 * std::sqrt(spp); // p_zpf = hbar / (2 x_zpf)
    p.fringe_estimate = fringe_estimate(c);
    const double span = opt.span_sigmas * p.max_delta_x;
    const double dx = std::min({opt.max_dx, p.fringe_estimate / opt.points_per_fringe,
                                std::numbers::pi / (opt.momentum_sigmas * p.max_delta_p)});
    const double want = std::max(span / dx, static_cast<double>(opt.min_points));
    if (!(want < 0x1p62)) throw ResourceError("grid size overflows; use a smaller parameter set");
    const auto n = std::bit_ceil(static_cast<std::uint64_t>(std::ceil(want)));
    p.grid = {static_cast<std::size_t>(n), want * dx / static_cast<double>(n), opt.absorb_fraction};
    p.steps = static_cast<std::uint64_t>(std::ceil(t_end / p.dt - 1e-9));
    // psi, FFT scratch, kinetic table and snapshots per worker
    p.memory_bytes = 16.0 * static_cast<double>(n) * (3.0 + static_cast<double>(opt.snapshots)) * opt.workers;
    p.work = static_cast<double>(n) * static_cast<double>(p.steps);
    if (p.memory_bytes > opt.memory_ceiling)
        throw ResourceError("grid of " + std::to_string(n) + " points exceeds the memory ceiling; the co-moving "
                            "grid for this set is beyond a workstation (try a desk-scale preset such as M)");
    if (p.work > opt.work_ceiling)
        throw ResourceError("grid of " + std::to_string(n) + " points over " + std::to_string(p.steps) +
                            " steps exceeds the work ceiling (try a desk-scale preset such as M)");
    return p;
}

} // namespace dwq::solver
