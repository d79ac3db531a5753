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
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "config.hpp"
#include "errors.hpp"

namespace dwq {

/// V(x) = m w^2 [-x^2 + x^4 / (2 d^2)] / 2 in internal units (x in x_zpf,
/// energy in hbar omega_dw).
struct DoubleWell {
    double mass = 1.0;
    double d = 1.0;

    static DoubleWell from(const ExperimentConfig& c) { return {c.mass_internal(), c.well_length}; }

    [[nodiscard]] double potential(double x) const
    {
        const double s = x / d;
        return 0.5 * mass * d * d * (-s * s + 0.5 * s * s * s * s);
    }
    [[nodiscard]] double force(double x) const
    {
        const double s = x / d;
        return -mass * d * (-s + s * s * s);
    }
    [[nodiscard]] double curvature(double x) const
    {
        const double s = x / d;
        return mass * (3.0 * s * s - 1.0);
    }

    /// V(x_c + y) - V(x_c) - V'(x_c) y, expanded so that no large terms cancel.
    [[nodiscard]] double effective(double x_c, double y) const
    {
        const double u = x_c / d;
        const double z = y / d;
        return 0.25 * mass * y * y * (2.0 * (3.0 * u * u - 1.0) + 4.0 * u * z + z * z);
    }
};

inline double evaluate_potential(double x, const ExperimentConfig& c) { return DoubleWell::from(c).potential(x); }
inline double evaluate_force(double x, const ExperimentConfig& c) { return DoubleWell::from(c).force(x); }
inline double evaluate_curvature(double x, const ExperimentConfig& c) { return DoubleWell::from(c).curvature(x); }

namespace classical {

// Scaled orbit: u = x/d, time in 1/omega_dw, v = du/dt. Then u'' = u - u^3 for
// every parameter set, so one orbit serves all sizes with the same x0/d.

inline double acceleration(double u) { return u - u * u * u; }
/// Energy per m omega_dw^2 d^2.
inline double energy(double u, double v) { return 0.5 * v * v + 0.5 * (-u * u + 0.5 * u * u * u * u); }
/// Curvature V''(x_c) in units of m omega_dw^2.
inline double curvature(double u) { return 3.0 * u * u - 1.0; }

/// Outer turning point from energy conservation, x_out^2 + x0^2 = 2 d^2.
inline double outer_turning_point(double u0) { return std::sqrt(2.0 - u0 * u0); }

/// Closed-form half period, omega_dw t_max = log(4 sqrt(2) d / x0). Valid for
/// x0 << d only.
inline double period_approx(double u0)
{
    detail::require(u0 > 0.0 && u0 < 1.0, "period_approx needs 0 < x0/d < 1");
    return std::log(4.0 * std::numbers::sqrt2 / u0);
}

inline double period_approx(const ExperimentConfig& c) { return period_approx(c.start_ratio); }

struct OrbitOptions {
    int periods = 1;          // full periods (2 t_max) to cover
    double max_time = 200.0;  // hard stop when no turning point is found
    double drift_tolerance = 1e-8; // relative energy drift per period
};

struct ClassicalTrajectory {
    double start_ratio = 0.0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> positions; // units of d
    std::vector<double> momenta;   // units of m omega_dw d
    std::vector<double> energies;  // units of m omega_dw^2 d^2
    double energy0 = 0.0;
    std::optional<double> t_max;   // first outer turning time
    std::optional<double> t_d;     // first crossing of x = d
    double energy_drift = 0.0;     // relative, per period

    [[nodiscard]] std::optional<double> period() const
    {
        if (!t_max) return std::nullopt;
        return 2.0 * *t_max;
    }

    struct Sample {
        double u;
        double v;
    };

    /// Cubic Hermite interpolation between the stored samples.
    [[nodiscard]] Sample at(double t) const
    {
        if (times.size() < 2 || t < times.front() || t > times.back())
            throw DomainError("time outside the trajectory span");
        auto i = static_cast<std::size_t>(std::floor((t - times.front()) / dt));
        i = std::min(i, times.size() - 2);
        const double h = dt;
        const double s = (t - times[i]) / h;
        const double u0 = positions[i], u1 = positions[i + 1];
        const double m0 = momenta[i] * h, m1 = momenta[i + 1] * h;
        const double s2 = s * s, s3 = s2 * s;
        const double u = (2 * s3 - 3 * s2 + 1) * u0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * u1 + (s3 - s2) * m1;
        const double du = ((6 * s2 - 6 * s) * u0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * u1 + (3 * s2 - 2 * s) * m1) / h;
        return {u, du};
    }

    [[nodiscard]] double max_curvature() const
    {
        double best = -1e300;
        for (double u : positions) best = std::max(best, curvature(u));
        if (t_max) best = std::max(best, curvature(at(*t_max).u));
        return best;
    }
};

namespace detail {

// Root of the parabola through (t[k], y[k]) k = 0..2 that lies inside [t0, t2].
inline double quadratic_root(const double* t, const double* y)
{
    const double h = t[1] - t[0];
    // y(s) = a s^2 + b s + c with s = (t - t1) / h
    const double c = y[1];
    const double b = 0.5 * (y[2] - y[0]);
    const double a = 0.5 * (y[2] + y[0]) - y[1];
    double s;
    if (std::abs(a) < 1e-14 * (std::abs(b) + std::abs(c))) {
        s = -c / b;
    } else {
        const double disc = std::sqrt(std::max(0.0, b * b - 4 * a * c));
        const double q = -0.5 * (b + std::copysign(disc, b));
        const double r1 = q / a;
        const double r2 = c / q;
        s = (std::abs(r1) < std::abs(r2)) ? r1 : r2;
    }
    return t[1] + s * h;
}

// Locate a sign change of y between samples i and i+1, refined with the
// parabola through three neighbouring samples.
inline double refine_crossing(const std::vector<double>& t, const std::vector<double>& y, std::size_t i)
{
    std::size_t j = (i == 0) ? 0 : i - 1;
    if (j + 2 >= t.size()) j = t.size() - 3;
    return quadratic_root(&t[j], &y[j]);
}

} // namespace detail

/// Velocity-Verlet integration of the scaled orbit starting at rest at u0.
/// Records the first outer turning time (momentum sign change, quadratic
/// refinement) and the first crossing of x = d.
inline ClassicalTrajectory integrate_orbit(double u0, double dt, const OrbitOptions& opt = {})
{
    dwq::detail::require(std::isfinite(u0), "start position must be finite");
    dwq::detail::require(dt > 0.0 && dt <= 0.01 / std::sqrt(5.0),
                         "dt must resolve the fastest local frequency (dt <= 0.01/sqrt(5))");
    ClassicalTrajectory tr;
    tr.start_ratio = u0;
    tr.dt = dt;
    double u = u0, v = 0.0, a = acceleration(u);
    tr.energy0 = energy(u, v);
    auto push = [&](double t) {
        tr.times.push_back(t);
        tr.positions.push_back(u);
        tr.momenta.push_back(v);
        tr.energies.push_back(energy(u, v));
    };
    push(0.0);
    const auto max_steps = static_cast<std::size_t>(std::ceil(opt.max_time / dt));
    std::optional<double> t_end;
    for (std::size_t n = 1; n <= max_steps; ++n) {
        const double vh = v + 0.5 * dt * a;
        u += dt * vh;
        a = acceleration(u);
        v = vh + 0.5 * dt * a;
        push(static_cast<double>(n) * dt);
        const std::size_t k = tr.times.size() - 1;
        if (!tr.t_d && tr.positions[k - 1] < 1.0 && u >= 1.0) {
            std::vector<double> shifted(tr.positions.end() - 3, tr.positions.end());
            for (auto& s : shifted) s -= 1.0;
            std::vector<double> ts(tr.times.end() - 3, tr.times.end());
            tr.t_d = detail::quadratic_root(ts.data(), shifted.data());
        }
        if (!tr.t_max && tr.momenta[k - 1] > 0.0 && v <= 0.0) {
            tr.t_max = detail::refine_crossing(tr.times, tr.momenta, k - 1);
            t_end = 2.0 * opt.periods * *tr.t_max;
        }
        if (t_end && tr.times.back() >= *t_end + 2.0 * dt) break;
    }

    const double scale = std::max(std::abs(tr.energy0), 1e-300);
    if (tr.t_max) {
        // Energy at each completed period, compared with the start.
        double worst = 0.0;
        for (int k = 1; k <= opt.periods; ++k) {
            const double tp = 2.0 * k * *tr.t_max;
            auto i = static_cast<std::size_t>(tp / dt);
            if (i + 1 >= tr.times.size()) break;
            const double w = (tp - tr.times[i]) / dt;
            const double e = (1 - w) * tr.energies[i] + w * tr.energies[i + 1];
            worst = std::max(worst, std::abs(e - tr.energy0) / scale / k);
        }
        tr.energy_drift = worst;
    } else {
        double worst = 0.0;
        for (double e : tr.energies) worst = std::max(worst, std::abs(e - tr.energy0) / scale);
        tr.energy_drift = worst;
    }
    if (tr.energy_drift > opt.drift_tolerance)
        throw ToleranceError("classical energy drift exceeds tolerance; reduce dt");
    return tr;
}

inline ClassicalTrajectory integrate_orbit(const ExperimentConfig& c, double dt, const OrbitOptions& opt = {})
{
    c.validate();
    return integrate_orbit(c.start_ratio, dt, opt);
}

/// High-accuracy orbit table (classic RK4 on a fine step, quintic Hermite
/// interpolation using u'' = u - u^3). Used as the co-moving frame of the
/// wave solver, where frame errors show up as spurious forces.
class DenseOrbit {
public:
    DenseOrbit() = default;

    DenseOrbit(double u0, double t_end, double h = 1e-3, double v0 = 0.0) : u0_(u0), v0_(v0), h_(h)
    {
        dwq::detail::require(t_end > 0.0 && h > 0.0, "DenseOrbit needs t_end > 0 and h > 0");
        const auto n = static_cast<std::size_t>(std::ceil(t_end / h)) + 2;
        u_.reserve(n + 1);
        v_.reserve(n + 1);
        double u = u0, v = v0;
        u_.push_back(u);
        v_.push_back(v);
        for (std::size_t i = 0; i < n; ++i) {
            const double k1u = v, k1v = acceleration(u);
            const double k2u = v + 0.5 * h * k1v, k2v = acceleration(u + 0.5 * h * k1u);
            const double k3u = v + 0.5 * h * k2v, k3v = acceleration(u + 0.5 * h * k2u);
            const double k4u = v + h * k3v, k4v = acceleration(u + h * k3u);
            u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
            u_.push_back(u);
            v_.push_back(v);
        }
    }

    [[nodiscard]] double start_ratio() const { return u0_; }
    [[nodiscard]] double start_velocity() const { return v0_; }
    [[nodiscard]] double t_end() const { return h_ * static_cast<double>(u_.size() - 1); }

    [[nodiscard]] ClassicalTrajectory::Sample at(double t) const
    {
        if (u_.empty() || t < 0.0 || t > t_end()) throw DomainError("time outside the dense orbit span");
        auto i = static_cast<std::size_t>(t / h_);
        i = std::min(i, u_.size() - 2);
        const double s = (t - h_ * static_cast<double>(i)) / h_;
        const double h = h_;
        const double p0 = u_[i], p1 = u_[i + 1];
        const double d0 = v_[i] * h, d1 = v_[i + 1] * h;
        const double a0 = acceleration(p0) * h * h, a1 = acceleration(p1) * h * h;
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
        const double h00 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
        const double h01 = 10 * s3 - 15 * s4 + 6 * s5;
        const double h10 = s - 6 * s3 + 8 * s4 - 3 * s5;
        const double h11 = -4 * s3 + 7 * s4 - 3 * s5;
        const double h20 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
        const double h21 = 0.5 * (s3 - 2 * s4 + s5);
        const double u = h00 * p0 + h01 * p1 + h10 * d0 + h11 * d1 + h20 * a0 + h21 * a1;
        const double dh00 = -30 * s2 + 60 * s3 - 30 * s4;
        const double dh10 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
        const double dh11 = -12 * s2 + 28 * s3 - 15 * s4;
        const double dh20 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
        const double dh21 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
        const double du = (dh00 * p0 - dh00 * p1 + dh10 * d0 + dh11 * d1 + dh20 * a0 + dh21 * a1) / h;
        return {u, du};
    }

private:
    double u0_ = 0.0;
    double v0_ = 0.0;
    double h_ = 1e-3;
    std::vector<double> u_;
    std::vector<double> v_;
};

} // namespace classical
} // namespace dwq
