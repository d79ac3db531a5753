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
#include <vector>

#include "classical.hpp"
#include "config.hpp"
#include "errors.hpp"

namespace dwq::gaussian {

/// First and second moments in the co-moving frame. Covariances are stored
/// normalised: sxx in x_zpf^2, sxp in x_zpf p_zpf, spp in p_zpf^2, so the
/// ground state is the identity. `det` is carried separately because for the
/// largest sets the direct product sxx*spp - sxp^2 cancels catastrophically.
struct GaussianState {
    double t = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double sxx = 1.0;
    double sxp = 0.0;
    double spp = 1.0;
    double det = 1.0;

    static GaussianState from_covariance(double sxx, double sxp, double spp, double t = 0.0)
    {
        return {t, 0.0, 0.0, sxx, sxp, spp, sxx * spp - sxp * sxp};
    }

    static GaussianState thermal(double mean_phonons)
    {
        detail::require(mean_phonons >= 0.0, "mean phonon number must be >= 0");
        const double v = 2.0 * mean_phonons + 1.0;
        return from_covariance(v, 0.0, v);
    }

    [[nodiscard]] double largest_eigenvalue() const
    {
        const double half_tr = 0.5 * (sxx + spp);
        return half_tr + std::hypot(0.5 * (sxx - spp), sxp);
    }
    [[nodiscard]] double smallest_eigenvalue() const { return det / largest_eigenvalue(); }
};

/// S = -10 log10 min_theta Var(x_theta) / x_zpf^2, i.e. the smallest
/// eigenvalue of the normalised covariance.
inline double squeezing_db(const GaussianState& s)
{
    detail::require(s.sxx > 0.0 && s.spp > 0.0 && s.det > 0.0, "covariance must be positive definite");
    return -10.0 * std::log10(s.smallest_eigenvalue());
}

/// Position spread in units of x_zpf.
inline double delta_x(const GaussianState& s) { return std::sqrt(s.sxx); }

struct MomentOptions {
    double tolerance = 1e-9;     // relative slack on det M = 1 and on positivity
    std::size_t record_every = 1;
};

/// Integrate the linear moment equations with time-dependent curvature.
///
/// `kappa(t)` is V''(x_c(t)) in units of m omega_dw^2, `ratio` is
/// omega_t/omega_dw and `gamma` the decoherence rate in units of omega_dw.
/// In normalised units the drift matrix is A = [[0, r], [-kappa/r, 0]] and the
/// momentum diffusion adds 4 gamma to spp' per unit time. The covariance is
/// assembled as M S0 M^T + Q with the symplectic transfer matrix M' = A M and
/// the noise part Q' = A Q + Q A^T + diag(0, 4 gamma). det M = 1 is the
/// step-size monitor; det S is integrated as det' = 4 gamma sxx.
template <class Curvature>
std::vector<GaussianState> propagate_moments(Curvature&& kappa, double ratio, double gamma,
                                             const GaussianState& init, double t_end, double dt,
                                             const MomentOptions& opt = {})
{
    detail::require(ratio > 0.0, "frequency ratio must be > 0");
    detail::require(gamma >= 0.0, "decoherence rate must be >= 0");
    detail::require(dt > 0.0 && t_end >= init.t, "bad time span");
    detail::require(init.sxx > 0.0 && init.spp > 0.0 && init.det > 0.0, "initial covariance must be positive definite");
    // y = (m00, m01, m10, m11, qxx, qxp, qpp, det)
    using Vec = std::array<double, 8>;
    const double r = ratio;
    auto sxx_of = [&](const Vec& y) {
        return y[0] * y[0] * init.sxx + 2.0 * y[0] * y[1] * init.sxp + y[1] * y[1] * init.spp + y[4];
    };
    auto rhs = [&](double t, const Vec& y) {
        const double k = kappa(t) / r;
        return Vec{r * y[2], r * y[3], -k * y[0], -k * y[1],
                   2.0 * r * y[5], r * y[6] - k * y[4], -2.0 * k * y[5] + 4.0 * gamma,
                   4.0 * gamma * sxx_of(y)};
    };
    Vec y{1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, init.det};
    std::vector<GaussianState> out;
    const auto steps = static_cast<std::size_t>(std::llround((t_end - init.t) / dt));
    const std::size_t every = std::max<std::size_t>(opt.record_every, 1);
    out.reserve(steps / every + 2);
    auto record = [&](double t) {
        const double a = y[0], b = y[1], c = y[2], d = y[3];
        const double ad = a * d, bc = b * c;
        const double q_det = y[4] * y[6] - y[5] * y[5];
        if (std::abs(ad - bc - 1.0) > opt.tolerance * (std::abs(ad) + std::abs(bc)) || y[4] < 0.0 ||
            y[6] < 0.0 || q_det < -opt.tolerance * (y[4] * y[6] + y[5] * y[5]) - 1e-300)
            throw ToleranceError("moment propagation lost symplecticity or positivity; reduce dt");
        GaussianState s;
        s.t = t;
        s.mean_x = init.mean_x;
        s.mean_p = init.mean_p;
        s.sxx = a * a * init.sxx + 2.0 * a * b * init.sxp + b * b * init.spp + y[4];
        s.sxp = a * c * init.sxx + (a * d + b * c) * init.sxp + b * d * init.spp + y[5];
        s.spp = c * c * init.sxx + 2.0 * c * d * init.sxp + d * d * init.spp + y[6];
        s.det = y[7];
        out.push_back(s);
    };
    record(init.t);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = init.t + static_cast<double>(n) * dt;
        const Vec k1 = rhs(t, y);
        Vec tmp;
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        const Vec k2 = rhs(t + 0.5 * dt, tmp);
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        const Vec k3 = rhs(t + 0.5 * dt, tmp);
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
        const Vec k4 = rhs(t + dt, tmp);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if ((n + 1) % every == 0 || n + 1 == steps) record(init.t + static_cast<double>(n + 1) * dt);
    }
    return out;
}

/// Moments along a classical orbit, starting from the thermal state of the
/// configuration. `gamma` is in units of omega_t (the convention of the
/// config); pass config.decoherence_rate for the configured value.
inline std::vector<GaussianState> propagate_moments(const classical::ClassicalTrajectory& traj,
                                                    const ExperimentConfig& config, double gamma,
                                                    const MomentOptions& opt = {})
{
    config.validate();
    auto kappa = [&](double t) { return classical::curvature(traj.at(t).u); };
    const double t_end = traj.times.back();
    return propagate_moments(kappa, config.frequency_ratio(), gamma * config.frequency_ratio(),
                             GaussianState::thermal(config.mean_phonons), t_end, traj.dt, opt);
}

} // namespace dwq::gaussian
