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
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"

namespace dwq::analysis {

struct ProfileMeta {
    std::string label;
    double time = 0.0;          ///< 1/omega_dw
    double gamma = 0.0;         ///< units of omega_t
    std::size_t n_traj = 1;
    double sigma_s = 0.0;       ///< x_zpf
    double mean_phonons = 0.0;
    double sigma_t = 0.0;       ///< 1/omega_dw
};

/// Probability density on a uniform grid (x in x_zpf), normalised to one;
/// the mass missing before normalisation is kept in `lost_mass`.
struct DistributionProfile {
    std::vector<double> x;
    std::vector<double> density;
    ProfileMeta meta;
    double lost_mass = 0.0;
    std::vector<double> std_error; ///< standard error of an ensemble mean; empty for a single run

    [[nodiscard]] double dx() const { return x.size() > 1 ? x[1] - x[0] : 1.0; }
    [[nodiscard]] double integral() const { return std::accumulate(density.begin(), density.end(), 0.0) * dx(); }

    void validate(double tolerance = 1e-6) const
    {
        if (x.size() != density.size() || x.size() < 3) throw DomainError("profile needs matching x and density");
        for (double v : density)
            if (!(v >= 0.0)) throw DomainError("profile density must be nonnegative");
        if (std::abs(integral() - 1.0) > tolerance) throw DomainError("profile does not integrate to one");
    }
};

inline DistributionProfile make_profile(std::vector<double> x, std::vector<double> density, ProfileMeta meta = {},
                                        std::vector<double> std_error = {})
{
    dwq::detail::require(x.size() == density.size() && x.size() >= 3, "profile needs >= 3 matching samples");
    dwq::detail::require(std_error.empty() || std_error.size() == x.size(), "standard error must match the samples");
    DistributionProfile p{std::move(x), std::move(density), std::move(meta), 0.0, std::move(std_error)};
    for (auto& v : p.density) v = std::max(v, 0.0);
    const double mass = p.integral();
    dwq::detail::require(mass > 0.0, "profile has no mass");
    p.lost_mass = 1.0 - mass;
    for (auto& v : p.density) v /= mass;
    for (auto& v : p.std_error) v /= mass;
    return p;
}

inline DistributionProfile make_profile(const solver::GridSpec& g, std::vector<double> density, ProfileMeta meta = {},
                                        std::vector<double> std_error = {})
{
    std::vector<double> x(g.n);
    for (std::size_t j = 0; j < g.n; ++j) x[j] = g.x(j);
    return make_profile(std::move(x), std::move(density), std::move(meta), std::move(std_error));
}

/// Gaussian-kernel smoothing with standard deviation `bandwidth` (x_zpf),
/// truncated at five bandwidths. The standard error is smoothed with the
/// same kernel, which bounds it from above.
inline DistributionProfile smooth(const DistributionProfile& p, double bandwidth)
{
    dwq::detail::require(bandwidth >= 0.0, "bandwidth must be >= 0");
    if (bandwidth == 0.0) return p;
    const double h = p.dx();
    const auto half = static_cast<long>(std::ceil(5.0 * bandwidth / h));
    std::vector<double> kernel(2 * static_cast<std::size_t>(half) + 1);
    for (long k = -half; k <= half; ++k) {
        const double z = static_cast<double>(k) * h / bandwidth;
        kernel[static_cast<std::size_t>(k + half)] = std::exp(-0.5 * z * z);
    }
    const double ks = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    for (auto& k : kernel) k /= ks;
    const auto n = static_cast<long>(p.density.size());
    auto apply = [&](const std::vector<double>& in, std::vector<double>& dst) {
        for (long i = 0; i < n; ++i) {
            double s = 0.0;
            for (long k = -half; k <= half; ++k) {
                const long j = i + k;
                if (j >= 0 && j < n) s += kernel[static_cast<std::size_t>(k + half)] * in[static_cast<std::size_t>(j)];
            }
            dst[static_cast<std::size_t>(i)] = s;
        }
    };
    DistributionProfile out = p;
    apply(p.density, out.density);
    if (!p.std_error.empty()) apply(p.std_error, out.std_error);
    return out;
}

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

struct FringeReport {
    Extremum max1; ///< principal maximum
    Extremum min1; ///< adjacent first minimum
    Extremum max2; ///< next maximum beyond min1
    double visibility = 0.0;
    double separation = 0.0; ///< |max2 - max1|, x_zpf
    int direction = 0;       ///< +1 / -1: side of max1 on which the fringes lie
    bool fringes = false;
    double smoothing = 0.0;
};

struct FringeOptions {
    double smoothing = 0.0;  ///< Gaussian bandwidth, x_zpf; 0.5 is a sensible value for shot-noisy data
    double depth = 0.9;      ///< a minimum counts only below depth * max1
    double contrast = 1e-6;  ///< and only if max2 - min1 exceeds contrast * max1
    std::size_t min_samples = 6;
    double significance = 2.0; ///< with a standard error: both contrasts must exceed this many errors
    double reach = 0.0;        ///< x_zpf; a first minimum farther than this from max1 is not a fringe (0: no limit)
};

namespace detail {

// Vertex of the parabola through samples i-1, i, i+1.
inline Extremum refine(const DistributionProfile& p, std::size_t i)
{
    const auto& y = p.density;
    if (i == 0 || i + 1 >= y.size()) return {p.x[i], y[i]};
    const double a = y[i - 1], b = y[i], c = y[i + 1];
    const double curv = a - 2.0 * b + c;
    if (curv == 0.0) return {p.x[i], b};
    const double s = std::clamp(0.5 * (a - c) / curv, -0.5, 0.5);
    return {p.x[i] + s * p.dx(), b - 0.25 * (a - c) * s};
}

struct SideFringe {
    bool valid = false;
    bool under_resolved = false; ///< a qualifying pair was rejected as too finely sampled
    std::size_t imin = 0;
    std::size_t imax2 = 0;
};

// From the principal maximum, walk in direction `dir` to the first local
// minimum below depth * max and the maximum that follows it. Pairs of
// extrema closer than min_samples, or (given standard errors e) not
// significant against the ensemble noise, are sampling ripple and are
// stepped over.
inline SideFringe walk(const std::vector<double>& y, const std::vector<double>& e, std::size_t i0, int dir,
                       const FringeOptions& o, long span)
{
    const double top = y[i0];
    const auto n = static_cast<long>(y.size());
    const auto need = static_cast<long>(o.min_samples);
    long i = static_cast<long>(i0);
    long prev = i;
    SideFringe out;
    auto inside = [&](long k) { return k >= 0 && k < n; };
    auto at = [&](long k) { return y[static_cast<std::size_t>(k)]; };
    for (;;) {
        while (inside(i + dir) && at(i + dir) <= at(i)) i += dir;
        if (!inside(i + dir)) return out;
        const long imin = i;
        if (std::abs(imin - static_cast<long>(i0)) > span) return out;
        while (inside(i + dir) && at(i + dir) >= at(i)) i += dir;
        if (!inside(i + dir)) return out;
        const long imax = i;
        const double lo = at(imin), hi = at(imax);
        const bool deep = lo < o.depth * top && hi - lo > o.contrast * top;
        const bool resolved = std::abs(imin - prev) >= need && std::abs(imax - imin) >= need;
        auto err = [&](long k) { return e.empty() ? 0.0 : e[static_cast<std::size_t>(k)]; };
        const double e0 = err(static_cast<long>(i0)), e1 = err(imin), e2 = err(imax);
        const bool significant = top - lo >= o.significance * std::hypot(e0, e1) &&
                                 hi - lo >= o.significance * std::hypot(e2, e1);
        if (deep && resolved && significant) {
            out.valid = true;
            out.imin = static_cast<std::size_t>(imin);
            out.imax2 = static_cast<std::size_t>(imax);
            return out;
        }
        if (deep) {
            out.under_resolved = out.under_resolved || !resolved;
            continue; // ripple: keep descending from here
        }
        if (lo < o.depth * top) return out; // deep but no contrast: the pattern has died out
        prev = imax;
    }
}

} // namespace detail

/// Principal maximum, first minimum and next maximum of a fringe pattern.
/// The principal maximum is the global maximum; of the two sides, the one
/// with the deeper qualifying minimum is used. Without a minimum below
/// depth * max1 the report carries fringes = false and visibility 0.
inline FringeReport fringe_report(const DistributionProfile& profile, const FringeOptions& o = {})
{
    dwq::detail::require(profile.density.size() >= 3 && profile.x.size() == profile.density.size(),
                    "fringe_report needs a sampled profile");
    const DistributionProfile p = smooth(profile, o.smoothing);
    const auto& y = p.density;
    const auto i0 = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    FringeReport r;
    r.smoothing = o.smoothing;
    r.max1 = detail::refine(p, i0);
    const long span = o.reach > 0.0 ? static_cast<long>(std::ceil(o.reach / p.dx()))
                                    : static_cast<long>(y.size());
    const auto right = detail::walk(y, p.std_error, i0, +1, o, span);
    const auto left = detail::walk(y, p.std_error, i0, -1, o, span);
    detail::SideFringe side;
    if (right.valid && (!left.valid || y[right.imin] <= y[left.imin])) {
        side = right;
        r.direction = +1;
    } else if (left.valid) {
        side = left;
        r.direction = -1;
    }
    if (!side.valid) {
        // In a single deterministic run closely spaced extrema are real but
        // unresolved structure; in ensemble data they are shot noise.
        if ((right.under_resolved || left.under_resolved) && profile.meta.n_traj <= 1)
            throw DomainError("fringes under-resolved: fewer than the required samples between extrema");
        return r;
    }
    r.min1 = detail::refine(p, side.imin);
    r.min1.value = std::max(r.min1.value, 0.0);
    r.max2 = detail::refine(p, side.imax2);
    r.fringes = true;
    r.visibility = std::clamp((r.max1.value - r.min1.value) / (r.max1.value + r.min1.value), 0.0, 1.0);
    r.separation = std::abs(r.max2.x - r.max1.x);
    return r;
}

/// As fringe_report, but a missing fringe is an error.
inline FringeReport require_fringes(const DistributionProfile& profile, const FringeOptions& o = {})
{
    auto r = fringe_report(profile, o);
    if (!r.fringes) throw NoFringeError("no local minimum below the depth threshold next to the principal maximum");
    return r;
}

struct ScalingPoint {
    std::string label;
    double frequency_ratio = 0.0; ///< omega_t / omega_dw
    double well_length = 0.0;     ///< d / x_zpf
    double start_ratio = 0.0;     ///< x0 / d
    double separation = 0.0;      ///< measured delta_f / x_zpf
};

struct ScalingReport {
    double constant = 0.0;          ///< mean C
    std::vector<double> constants;  ///< per set
    std::vector<double> residuals;  ///< C_i / C - 1
    double spread = 0.0;            ///< max_i C_i / min_i C_i - 1
};

/// Fits delta_f = C (omega_t/omega_dw)^(2/3) (x_zpf/d)^(1/3) over sets that
/// share x0/d.
inline ScalingReport fringe_scaling_check(const std::vector<ScalingPoint>& sets)
{
    dwq::detail::require(sets.size() >= 2, "scaling check needs at least two sets");
    for (const auto& s : sets) {
        dwq::detail::require(s.frequency_ratio > 0.0 && s.well_length > 0.0 && s.separation > 0.0,
                        "scaling point needs positive ratio, length and separation");
        dwq::detail::require(std::abs(s.start_ratio - sets.front().start_ratio) <= 1e-12 * sets.front().start_ratio,
                        "scaling check needs equal x0/d across sets");
    }
    ScalingReport r;
    for (const auto& s : sets)
        r.constants.push_back(s.separation / std::cbrt(s.frequency_ratio * s.frequency_ratio / s.well_length));
    r.constant = std::accumulate(r.constants.begin(), r.constants.end(), 0.0) / static_cast<double>(sets.size());
    for (double c : r.constants) r.residuals.push_back(c / r.constant - 1.0);
    const auto [lo, hi] = std::minmax_element(r.constants.begin(), r.constants.end());
    r.spread = *hi / *lo - 1.0;
    return r;
}

/// Linear convolution (a * b)[k] = sum_i a[i] b[k - i] for k in [0, 2n - 1),
/// by zero-padded FFT.
inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b)
{
    dwq::detail::require(!a.empty() && a.size() == b.size(), "convolve needs equal, nonempty inputs");
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n) m *= 2;
    ComplexVector fa(m, Complex{}), fb(m, Complex{});
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = a[i];
        fb[i] = b[i];
    }
    FftPlan plan(m);
    plan.forward(fa);
    plan.forward(fb);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    plan.backward(fa);
    std::vector<double> out(2 * n - 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = fa[k].real() / static_cast<double>(m);
    return out;
}

/// Cross-correlation C[r] = sum_i a[i] b[i - r], r = -(n-1) .. n-1 stored at
/// index r + n - 1. C is the convolution of a with reversed b.
inline std::vector<double> cross_correlate(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> rb(b.rbegin(), b.rend());
    return convolve(a, rb);
}

} // namespace dwq::analysis
