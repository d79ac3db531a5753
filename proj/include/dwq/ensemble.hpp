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
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "propagator.hpp"

namespace dwq::solver {

/// Trajectory-averaged position densities at the snapshot times.
struct EnsembleResult {
    GridSpec grid;
    std::vector<double> times;
    std::vector<std::vector<double>> density;   ///< mean |psi|^2, per snapshot
    std::vector<std::vector<double>> std_error; ///< standard error of the mean, per snapshot
    std::vector<double> norm;                   ///< mean remaining norm, per snapshot
    std::size_t n_traj = 0;
    double gamma = 0.0; ///< internal units
    std::uint64_t base_seed = 0;
};

/// Averages n_traj noise realisations of run_trajectory. Trajectory i uses
/// counter stream (base_seed, i); the reduction order is fixed, so the result
/// does not depend on `workers`. Without noise every realisation is the same
/// coherent run, which is then computed once.
template <Model M>
EnsembleResult run_ensemble(const M& model, const GridSpec& grid, RunOptions base, double gamma,
                            std::size_t n_traj, std::uint64_t base_seed, unsigned workers = 1)
{
    detail::require(n_traj >= 1, "n_traj must be >= 1");
    detail::require(gamma >= 0.0, "gamma must be >= 0");
    detail::require(!base.snapshot_times.empty(), "ensemble needs at least one snapshot time");
    const std::size_t n_snap = base.snapshot_times.size();
    const std::size_t n = grid.n;
    base.sample_every = 0;
    base.noise.gamma = gamma;
    base.noise.seed = base_seed;

    EnsembleResult out;
    out.grid = grid;
    out.times = base.snapshot_times;
    out.n_traj = n_traj;
    out.gamma = gamma;
    out.base_seed = base_seed;

    const std::size_t runs = gamma > 0.0 ? n_traj : 1;
    // layout per snapshot: density (n), density^2 (n), norm (1)
    const std::size_t stride = 2 * n + 1;
    auto sum = blocked_sum(runs, workers, [&](std::size_t i) {
        RunOptions opt = base;
        opt.noise.trajectory = static_cast<std::uint32_t>(i);
        const auto rec = run_trajectory(model, grid, opt);
        std::vector<double> v(stride * n_snap);
        for (std::size_t s = 0; s < n_snap; ++s) {
            double* dst = v.data() + s * stride;
            const auto& psi = rec.snapshots[s].psi;
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p = std::norm(psi[j]);
                dst[j] = p;
                dst[n + j] = p * p;
                total += p;
            }
            dst[2 * n] = total * grid.dx;
        }
        return v;
    });

    const double inv = 1.0 / static_cast<double>(runs);
    for (std::size_t s = 0; s < n_snap; ++s) {
        const double* src = sum.data() + s * stride;
        std::vector<double> mean(n), se(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            mean[j] = src[j] * inv;
            if (runs > 1) {
                const double var = std::max(0.0, src[n + j] * inv - mean[j] * mean[j]) * static_cast<double>(runs) /
                                   static_cast<double>(runs - 1);
                se[j] = std::sqrt(var * inv);
            }
        }
        out.density.push_back(std::move(mean));
        out.std_error.push_back(std::move(se));
        out.norm.push_back(src[2 * n] * inv);
    }
    return out;
}

} // namespace dwq::solver
