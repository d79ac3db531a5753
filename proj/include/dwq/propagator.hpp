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
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "wave.hpp"

namespace dwq::solver {

/// White-noise force realising the position-dephasing term of the master
/// equation: f_k = sign * z_k * sqrt(gamma/dt) acts for one step as the
/// potential f_k * y. Averaged over z this gives exactly the dephasing
/// channel exp(-gamma dt (y - y')^2 / 2) on the density matrix.
struct ForceNoise {
    double gamma = 0.0; ///< internal units: per unit time per x_zpf^2
    std::uint64_t seed = 0;
    std::uint32_t trajectory = 0;
    std::uint32_t stream = 0;
    double sign = 1.0;

    [[nodiscard]] bool active() const { return gamma > 0.0; }
    [[nodiscard]] double normal(std::uint64_t step) const
    {
        return NormalStream(seed, trajectory, stream)(step);
    }
    /// Force held constant over a step of length h starting at `step`.
    [[nodiscard]] double force(std::uint64_t step, double h) const
    {
        return active() ? sign * normal(step) * std::sqrt(gamma / h) : 0.0;
    }
};

/// Strang split-step propagator in the co-moving frame. Consecutive
/// half-kicks are merged, so a block of n steps costs n + 1 potential
/// passes and 2n FFTs, and the state is only synchronised at block ends.
template <Model M>
class Propagator {
public:
    Propagator(const M& model, const GridSpec& grid, double dt, ForceNoise noise = {}, double edge_threshold = 1e-6)
        : model_(&model), grid_(grid), dt_(dt), noise_(noise), edge_threshold_(edge_threshold), plan_(grid.n)
    {
        grid.validate();
        detail::require(dt > 0.0 && std::isfinite(dt), "time step must be > 0");
        kinetic_ = kinetic_table(dt);
        const std::size_t a = grid.absorb_points();
        mask_.assign(a, 1.0);
        for (std::size_t i = 0; i < a; ++i) {
            // depth 1 at the outermost point
            const double depth = static_cast<double>(a - i) / static_cast<double>(a);
            mask_[i] = std::pow(std::cos(0.5 * std::numbers::pi * depth), 0.125);
        }
        edge_points_ = std::max<std::size_t>(1, grid.n / 20);
    }

    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] const FftPlan& plan() const { return plan_; }
    [[nodiscard]] const ForceNoise& noise() const { return noise_; }
    /// Largest fraction of spectral weight seen in the outer 5% of k on each side.
    [[nodiscard]] double max_edge_mass() const { return max_edge_mass_; }

    /// n full steps; the state is synchronised (all kicks applied) on return.
    void advance(WaveState& s, std::uint64_t n)
    {
        if (n == 0) return;
        check(s);
        std::uint64_t k = s.steps;
        double f = noise_.force(k, dt_);
        kick(s.psi, model_->effective(time(k)), f, 0.5 * dt_, false);
        for (std::uint64_t i = 0; i < n; ++i, ++k) {
            drift(s.psi, kinetic_);
            s.frame_phase += frame_lagrangian(time(k), time(k + 1)) * dt_;
            if (i + 1 < n) {
                const double f_next = noise_.force(k + 1, dt_);
                kick(s.psi, model_->effective(time(k + 1)), 0.5 * (f + f_next), dt_, true);
                f = f_next;
            } else {
                kick(s.psi, model_->effective(time(k + 1)), f, 0.5 * dt_, true);
            }
        }
        s.steps = k;
        s.t = time(k);
        s.frame = model_->frame(s.t);
    }

    /// One Strang step of length tau (0 < tau <= dt) on a copy. The force
    /// uses the same normal variate as the full step it truncates, rescaled
    /// so its momentum-kick variance is gamma * tau.
    [[nodiscard]] WaveState partial(const WaveState& s, double tau)
    {
        check(s);
        detail::require(tau > 0.0 && tau <= dt_ * (1.0 + 1e-12), "partial step must lie in (0, dt]");
        WaveState out = s;
        const double t0 = s.t;
        const double f = noise_.force(s.steps, tau);
        kick(out.psi, model_->effective(t0), f, 0.5 * tau, false);
        const auto table = kinetic_table(tau);
        drift(out.psi, table);
        kick(out.psi, model_->effective(t0 + tau), f, 0.5 * tau, false);
        out.frame_phase += frame_lagrangian(t0, t0 + tau) * tau;
        out.t = t0 + tau;
        out.frame = model_->frame(out.t);
        return out;
    }

private:
    [[nodiscard]] double time(std::uint64_t k) const { return static_cast<double>(k) * dt_; }

    void check(const WaveState& s) const
    {
        if (!(s.grid == grid_) || s.psi.size() != grid_.n) throw GridError("state grid does not match the propagator");
    }

    [[nodiscard]] double frame_lagrangian(double a, double b) const
    {
        auto lag = [&](double t) {
            const auto f = model_->frame(t);
            return f.p_c * f.p_c / (2.0 * model_->mass()) - f.v_c;
        };
        return 0.5 * (lag(a) + lag(b));
    }

    [[nodiscard]] ComplexVector kinetic_table(double h) const
    {
        ComplexVector table(grid_.n);
        const double inv_n = 1.0 / static_cast<double>(grid_.n);
        const double c = h / (2.0 * model_->mass());
        for (std::size_t j = 0; j < grid_.n; ++j) {
            const double k = grid_.k(j);
            table[j] = std::polar(inv_n, -c * k * k);
        }
        return table;
    }

    void kick(ComplexVector& psi, const Quartic& q, double f, double h, bool absorb) const
    {
        const std::size_t n = grid_.n;
        for (std::size_t j = 0; j < n; ++j) {
            const double y = grid_.x(j);
            const double phase = h * (y * y * (q.c2 + y * (q.c3 + y * q.c4)) + f * y);
            psi[j] *= Complex(std::cos(phase), -std::sin(phase));
        }
        if (!absorb) return;
        const std::size_t a = mask_.size();
        for (std::size_t i = 0; i < a; ++i) {
            psi[i] *= mask_[i];
            psi[n - 1 - i] *= mask_[i];
        }
    }

    void drift(ComplexVector& psi, const ComplexVector& table)
    {
        plan_.forward(psi);
        const std::size_t n = grid_.n;
        double total = 0.0, edge = 0.0;
        const std::size_t lo = n / 2 - edge_points_, hi = n / 2 + edge_points_;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = std::norm(psi[j]);
            total += w;
            if (j >= lo && j < hi) edge += w;
            psi[j] *= table[j];
        }
        plan_.backward(psi);
        if (total > 0.0) {
            const double frac = edge / total;
            max_edge_mass_ = std::max(max_edge_mass_, frac);
            if (frac > edge_threshold_) throw ToleranceError("spectral mass at the momentum-grid edge exceeds threshold");
        }
    }

    const M* model_;
    GridSpec grid_;
    double dt_;
    ForceNoise noise_;
    double edge_threshold_;
    FftPlan plan_;
    ComplexVector kinetic_;
    std::vector<double> mask_;
    std::size_t edge_points_ = 1;
    double max_edge_mass_ = 0.0;
};

/// Observable sample of one trajectory. Positions are co-moving (x - x_c),
/// energy is the lab-frame energy per unit norm.
struct Sample {
    double t = 0.0;
    double x_c = 0.0;
    double p_c = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double delta_x = 0.0;
    double delta_p = 0.0;
    double norm = 0.0;
    double excess_kurtosis = 0.0;
    double energy = 0.0;
};

struct RunOptions {
    double dt = 1e-3;
    double t_end = 0.0;
    std::uint64_t sample_every = 10; ///< 0 disables the timeline
    std::vector<double> snapshot_times;
    ForceNoise noise;
    Displacement offset;
    double edge_threshold = 1e-6;
    /// Custom initial state on the run grid; replaces the coherent state.
    std::optional<WaveState> initial;
};

struct TrajectoryRecord {
    std::vector<Sample> samples;
    std::vector<WaveState> snapshots; ///< in the order of RunOptions::snapshot_times
    std::uint64_t steps = 0;
    double max_edge_mass = 0.0;
};

template <Model M>
Sample sample_of(const WaveState& s, const M& model, const FftPlan& plan, ComplexVector& scratch)
{
    const auto m = measure(s, plan, model.effective(s.t), scratch);
    Sample out;
    out.t = s.t;
    out.x_c = s.frame.x_c;
    out.p_c = s.frame.p_c;
    out.mean_x = m.mean_x;
    out.mean_p = m.mean_p;
    out.delta_x = std::sqrt(std::max(m.var_x, 0.0));
    out.delta_p = std::sqrt(std::max(m.var_p, 0.0));
    out.norm = m.norm;
    out.excess_kurtosis = m.excess_kurtosis;
    out.energy = lab_energy(m, s.frame, model.mass());
    return out;
}

/// Evolves one wavepacket from t = 0 to opt.t_end. Deterministic for fixed
/// options: the noise is a pure function of (seed, trajectory, stream, step).
template <Model M>
TrajectoryRecord run_trajectory(const M& model, const GridSpec& grid, const RunOptions& opt)
{
    detail::require(opt.t_end >= 0.0 && std::isfinite(opt.t_end), "t_end must be finite and >= 0");
    const double dt = opt.dt;
    const auto n_total = static_cast<std::uint64_t>(std::ceil(opt.t_end / dt - 1e-9));
    const double horizon = static_cast<double>(n_total) * dt;
    if (horizon > model.frame_horizon()) throw DomainError("run extends past the tabulated classical orbit");

    struct Snap {
        std::size_t index;
        std::uint64_t base;
        double tau;
    };
    std::vector<Snap> snaps;
    for (std::size_t i = 0; i < opt.snapshot_times.size(); ++i) {
        const double ts = opt.snapshot_times[i];
        detail::require(ts >= 0.0 && ts <= horizon + 1e-12, "snapshot time outside the run");
        auto base = static_cast<std::uint64_t>(std::floor(ts / dt + 1e-9));
        base = std::min(base, n_total);
        double tau = ts - static_cast<double>(base) * dt;
        if (std::abs(tau) < 1e-9 * dt) tau = 0.0;
        snaps.push_back({i, base, tau});
    }
    std::sort(snaps.begin(), snaps.end(), [](const Snap& a, const Snap& b) { return a.base < b.base; });

    Propagator<M> prop(model, grid, dt, opt.noise, opt.edge_threshold);
    WaveState s = opt.initial ? *opt.initial : initial_state(grid, model.frame(0.0), opt.offset);
    if (opt.initial && (!(s.grid == grid) || s.steps != 0)) throw GridError("custom initial state must start at t = 0 on the run grid");
    ComplexVector scratch(grid.n);
    TrajectoryRecord rec;
    rec.snapshots.resize(opt.snapshot_times.size());

    std::size_t next_snap = 0;
    for (;;) {
        const std::uint64_t k = s.steps;
        if (opt.sample_every > 0 && (k % opt.sample_every == 0 || k == n_total))
            rec.samples.push_back(sample_of(s, model, prop.plan(), scratch));
        while (next_snap < snaps.size() && snaps[next_snap].base == k) {
            const auto& sn = snaps[next_snap];
            rec.snapshots[sn.index] = sn.tau > 0.0 ? prop.partial(s, sn.tau) : s;
            ++next_snap;
        }
        if (k >= n_total) break;
        std::uint64_t target = n_total;
        if (opt.sample_every > 0) target = std::min(target, (k / opt.sample_every + 1) * opt.sample_every);
        if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap].base);
        prop.advance(s, target - k);
    }
    rec.steps = s.steps;
    rec.max_edge_mass = prop.max_edge_mass();
    return rec;
}

} // namespace dwq::solver
