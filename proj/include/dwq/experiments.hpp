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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "classical.hpp"
#include "config.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "plan.hpp"
#include "propagator.hpp"
#include "quadrature.hpp"

namespace dwq::analysis {

/// Measured half period of the configuration's orbit, 1/omega_dw.
inline double orbit_t_max(const ExperimentConfig& c)
{
    const auto orbit = classical::integrate_orbit(c, 1e-4);
    if (!orbit.t_max) throw ToleranceError("classical orbit has no turning point");
    return *orbit.t_max;
}

/// psi(y) -> psi(y - shift), exact for band-limited states.
inline void shift_state(solver::WaveState& s, double shift)
{
    if (shift == 0.0) return;
    FftPlan plan(s.grid.n);
    plan.forward(s.psi);
    const double inv = 1.0 / static_cast<double>(s.grid.n);
    for (std::size_t j = 0; j < s.grid.n; ++j) s.psi[j] *= std::polar(inv, -s.grid.k(j) * shift);
    plan.backward(s.psi);
}

/// Fringe options with the search limited to four estimated fringe spacings
/// around the principal maximum, unless a reach is already set.
inline FringeOptions fringe_options(const ExperimentConfig& c, FringeOptions f = {})
{
    if (f.reach <= 0.0) f.reach = 4.0 * fringe_estimate(c);
    return f;
}

struct RunSettings {
    double dt = 1e-3;
    solver::PlanOptions plan = fringe_plan();
    unsigned workers = 1;
    FringeOptions fringe;

    /// Grid profile for runs that stop at t_max: 12 sigma span, 6 sigma
    /// momentum cut-off. Runs past t_max need the wider defaults.
    static solver::PlanOptions fringe_plan()
    {
        solver::PlanOptions p;
        p.span_sigmas = 12.0;
        p.momentum_sigmas = 6.0;
        return p;
    }
};

/// Single noiseless run to t_max; returns the co-moving density.
inline DistributionProfile coherent_profile(const ExperimentConfig& c, const RunSettings& rs = {},
                                            solver::GridPlan* plan_out = nullptr)
{
    const double t_max = orbit_t_max(c);
    auto po = rs.plan;
    po.dt = rs.dt;
    const auto plan = solver::choose_grid(c, t_max, 0.0, po);
    if (plan_out) *plan_out = plan;
    const auto model = solver::CoMovingModel::double_well(c, t_max + 0.1);
    solver::RunOptions ro;
    ro.dt = rs.dt;
    ro.t_end = t_max;
    ro.sample_every = 0;
    ro.snapshot_times = {t_max};
    const auto rec = solver::run_trajectory(model, plan.grid, ro);
    ProfileMeta meta;
    meta.label = c.label;
    meta.time = t_max;
    return make_profile(plan.grid, rec.snapshots[0].density(), meta);
}

// ---------------------------------------------------------------- imperfections

struct ImperfectionOptions {
    std::size_t position_nodes = 15;
    std::size_t momentum_nodes = 15;
    std::size_t time_nodes = 15;
    double prune = 1e-6;
    std::size_t noise_traj = 16; ///< realisations per node when gamma > 0
    std::uint64_t seed = 1;
    bool node_check = false;     ///< rerun with 21 nodes per dimension
    RunSettings run;
};

struct ImperfectionResult {
    DistributionProfile profile;
    std::vector<QuadratureNode> nodes;
    double pruned_weight = 0.0;
    std::optional<double> node_check_change; ///< relative visibility change 15 -> 21 nodes
    bool node_warning = false;
    solver::GridSpec grid;
};

namespace detail {

inline ImperfectionResult imperfection_once(const ExperimentConfig& c, double gamma, double sigma_s, double nbar,
                                            double sigma_t, const ImperfectionOptions& o)
{
    dwq::detail::require(sigma_s >= 0.0 && nbar >= 0.0 && sigma_t >= 0.0, "imperfection widths must be >= 0");
    dwq::detail::require(gamma >= 0.0, "gamma must be >= 0");
    const double t_max = orbit_t_max(c);
    // Thermal state = Gaussian mixture of coherent states with position
    // variance 2 nbar x_zpf^2 and momentum variance 2 nbar p_zpf^2.
    const double sx = std::sqrt(sigma_s * sigma_s + 2.0 * nbar);
    const double sp = std::sqrt(2.0 * nbar) * 0.5;
    ImperfectionResult res;
    res.nodes = tensor_rule(sx, sp, sigma_t, o.position_nodes, o.momentum_nodes, o.time_nodes, o.prune,
                            &res.pruned_weight);
    double tau_min = 0.0, tau_max = 0.0;
    for (const auto& q : res.nodes) {
        tau_min = std::min(tau_min, q.dt);
        tau_max = std::max(tau_max, q.dt);
    }
    dwq::detail::require(t_max + tau_min > 0.0, "timing spread reaches back to t = 0");
    const double t_end = t_max + tau_max;

    ExperimentConfig coherent = c;
    coherent.mean_phonons = 0.0; // every node is a coherent state
    auto po = o.run.plan;
    po.dt = o.run.dt;
    const auto plan = solver::choose_grid(coherent, t_end, gamma, po);
    res.grid = plan.grid;
    const auto nominal = solver::CoMovingModel::double_well(c, t_end + 0.1);
    const double x_ref = nominal.frame(t_max).x_c;

    // group nodes sharing an initial displacement into one run
    std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < res.nodes.size(); ++i) groups[{res.nodes[i].dx, res.nodes[i].dp}].push_back(i);
    std::vector<std::pair<std::pair<double, double>, std::vector<std::size_t>>> work(groups.begin(), groups.end());

    const std::size_t n = plan.grid.n;
    const double g_int = gamma * c.frequency_ratio();
    auto sum = blocked_sum(work.size(), o.run.workers, [&](std::size_t w) {
        const auto& [disp, members] = work[w];
        const auto model = solver::CoMovingModel::double_well(c, t_end + 0.1, disp.first, disp.second);
        solver::RunOptions ro;
        ro.dt = o.run.dt;
        ro.t_end = t_end;
        ro.sample_every = 0;
        for (auto i : members) ro.snapshot_times.push_back(t_max + res.nodes[i].dt);
        const std::size_t reps = g_int > 0.0 ? o.noise_traj : 1;
        std::vector<double> acc(n, 0.0);
        for (std::size_t r = 0; r < reps; ++r) {
            ro.noise = {g_int, o.seed, static_cast<std::uint32_t>(r), 0, 1.0};
            auto rec = solver::run_trajectory(model, plan.grid, ro);
            for (std::size_t m = 0; m < members.size(); ++m) {
                auto& snap = rec.snapshots[m];
                shift_state(snap, snap.frame.x_c - x_ref);
                const double wgt = res.nodes[members[m]].weight / static_cast<double>(reps);
                for (std::size_t j = 0; j < n; ++j) acc[j] += wgt * std::norm(snap.psi[j]);
            }
        }
        return acc;
    });
    ProfileMeta meta;
    meta.label = c.label;
    meta.time = t_max;
    meta.gamma = gamma;
    meta.n_traj = g_int > 0.0 ? o.noise_traj : 1;
    meta.sigma_s = sigma_s;
    meta.mean_phonons = nbar;
    meta.sigma_t = sigma_t;
    res.profile = make_profile(plan.grid, std::move(sum), meta);
    return res;
}

} // namespace detail

/// Position distribution at t_max averaged over initial-position
/// imprecision sigma_s (x_zpf), thermal occupation nbar and timing
/// imprecision sigma_t (1/omega_dw) with tensor Gauss-Hermite rules. Each
/// displaced initial state is evolved in the frame of its own classical
/// orbit, then shifted into the nominal frame at t_max; timing nodes are
/// snapshots at t_max + tau.
inline ImperfectionResult imperfection_average(const ExperimentConfig& c, double gamma, double sigma_s, double nbar,
                                               double sigma_t, const ImperfectionOptions& o = {})
{
    auto res = detail::imperfection_once(c, gamma, sigma_s, nbar, sigma_t, o);
    if (o.node_check && (sigma_s > 0.0 || nbar > 0.0 || sigma_t > 0.0)) {
        auto fine = o;
        fine.position_nodes = fine.momentum_nodes = fine.time_nodes = 21;
        const auto res21 = detail::imperfection_once(c, gamma, sigma_s, nbar, sigma_t, fine);
        const double v15 = fringe_report(res.profile, fringe_options(c, o.run.fringe)).visibility;
        const double v21 = fringe_report(res21.profile, fringe_options(c, o.run.fringe)).visibility;
        res.node_check_change = v21 > 0.0 ? std::abs(v15 / v21 - 1.0) : std::abs(v15 - v21);
        res.node_warning = *res.node_check_change > 0.02;
    }
    return res;
}

// ------------------------------------------------------------ Gamma sweeps

struct CurvePoint {
    double gamma = 0.0;     ///< units of omega_t
    double collapsed = 0.0; ///< Gamma eta^2 / omega_dw
    double visibility = 0.0;
    FringeReport report;
};

struct VisibilityCurve {
    std::string label;
    double eta = 0.0;
    std::vector<CurvePoint> points;
    solver::GridSpec grid;
};

struct SweepOptions {
    std::size_t n_traj = 16;
    std::uint64_t seed = 1;
    RunSettings run;
};

/// Ensemble-averaged visibility at t_max for each Gamma (units of omega_t).
/// All Gamma values share the seed, so realisation i sees the same normal
/// variates scaled by sqrt(Gamma): the curve is smooth in Gamma rather than
/// carrying independent sampling noise per point.
inline VisibilityCurve visibility_sweep(const ExperimentConfig& c, const std::vector<double>& gammas,
                                        const SweepOptions& o = {}, std::vector<DistributionProfile>* profiles = nullptr)
{
    dwq::detail::require(!gammas.empty(), "sweep needs at least one Gamma");
    for (double g : gammas) dwq::detail::require(g >= 0.0, "Gamma must be >= 0");
    const double t_max = orbit_t_max(c);
    auto po = o.run.plan;
    po.dt = o.run.dt;
    const double g_top = *std::max_element(gammas.begin(), gammas.end());
    const auto plan = solver::choose_grid(c, t_max, g_top, po);
    const auto model = solver::CoMovingModel::double_well(c, t_max + 0.1);
    VisibilityCurve curve;
    curve.label = c.label;
    curve.eta = delocalization(c);
    curve.grid = plan.grid;
    for (double g : gammas) {
        solver::RunOptions ro;
        ro.dt = o.run.dt;
        ro.t_end = t_max;
        ro.snapshot_times = {t_max};
        const double g_int = g * c.frequency_ratio();
        const auto ens = solver::run_ensemble(model, plan.grid, ro, g_int, o.n_traj, o.seed, o.run.workers);
        ProfileMeta meta;
        meta.label = c.label;
        meta.time = t_max;
        meta.gamma = g;
        meta.n_traj = g > 0.0 ? o.n_traj : 1;
        auto prof = make_profile(plan.grid, ens.density[0], meta, ens.std_error[0]);
        CurvePoint pt;
        pt.gamma = g;
        pt.collapsed = g_int * curve.eta * curve.eta;
        pt.report = fringe_report(prof, fringe_options(c, o.run.fringe));
        pt.visibility = pt.report.visibility;
        curve.points.push_back(pt);
        if (profiles) profiles->push_back(std::move(prof));
    }
    return curve;
}

struct CollapseReport {
    std::vector<double> levels;  ///< visibility levels compared
    std::vector<double> spreads; ///< x_max / x_min - 1 at each level
    double max_spread = 0.0;
};

namespace detail {

// Collapsed coordinate where a curve first falls to `level`, interpolating
// linearly in log(x) between bracketing points with x > 0.
inline std::optional<double> crossing(const VisibilityCurve& c, double level)
{
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
        const auto& a = c.points[i];
        const auto& b = c.points[i + 1];
        if (a.collapsed <= 0.0 || b.collapsed <= 0.0) continue;
        if (a.visibility >= level && b.visibility <= level && a.visibility != b.visibility) {
            const double s = (a.visibility - level) / (a.visibility - b.visibility);
            return std::exp(std::log(a.collapsed) + s * (std::log(b.collapsed) - std::log(a.collapsed)));
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Horizontal spread between visibility curves in the Gamma eta^2/omega_dw
/// coordinate, evaluated at `n_levels` visibility levels inside the range
/// all curves cover (curves sorted by Gamma).
inline CollapseReport scaling_collapse(const std::vector<VisibilityCurve>& curves, std::size_t n_levels = 5)
{
    dwq::detail::require(curves.size() >= 2, "collapse needs at least two curves");
    double hi = 1e300, lo = -1e300;
    for (const auto& c : curves) {
        dwq::detail::require(c.points.size() >= 3, "collapse needs at least three Gamma values per curve");
        double cmax = -1e300, cmin = 1e300;
        for (const auto& p : c.points) {
            if (p.collapsed <= 0.0) continue;
            cmax = std::max(cmax, p.visibility);
            cmin = std::min(cmin, p.visibility);
        }
        hi = std::min(hi, cmax);
        lo = std::max(lo, cmin);
    }
    if (!(hi > lo)) throw DomainError("visibility curves do not overlap; widen the Gamma range");
    CollapseReport r;
    for (std::size_t k = 1; k <= n_levels; ++k) {
        const double level = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_levels + 1);
        double xmin = 1e300, xmax = 0.0;
        bool ok = true;
        for (const auto& c : curves) {
            const auto x = detail::crossing(c, level);
            if (!x) {
                ok = false;
                break;
            }
            xmin = std::min(xmin, *x);
            xmax = std::max(xmax, *x);
        }
        if (!ok) continue;
        r.levels.push_back(level);
        r.spreads.push_back(xmax / xmin - 1.0);
        r.max_spread = std::max(r.max_spread, r.spreads.back());
    }
    if (r.levels.empty()) throw DomainError("no common visibility level is crossed by every curve");
    return r;
}

// ------------------------------------------------------------- two particles

enum class NoiseMode { collective, independent };

inline const char* to_string(NoiseMode m) { return m == NoiseMode::collective ? "collective" : "independent"; }

/// Co-moving density of one particle of a pair, with the noise realisation
/// that produced it. Particle 2 is simulated as its mirror image (starting at
/// +x0), so a lab-frame force f on it enters its run with sign -1.
struct TaggedDensity {
    solver::ForceNoise tag;
    std::vector<double> density;
};

/// P(r~) for r~ = x~1 - x~2 with x~i the displacement from each particle's
/// own classical trajectory, averaged over realisations. In the mirrored
/// coordinate y2 of particle 2, r~ = y1 + y2, so per realisation P(r~) is
/// the convolution of the two run densities (equivalently the cross-
/// correlation of P1 with the lab-oriented P2).
inline DistributionProfile relative_distribution(const solver::GridSpec& g, const std::vector<TaggedDensity>& first,
                                                 const std::vector<TaggedDensity>& second, NoiseMode mode,
                                                 ProfileMeta meta = {})
{
    if (first.size() != second.size() || first.empty()) throw DomainError("pair ensembles differ in size");
    std::vector<double> acc(2 * g.n - 1, 0.0), acc2(2 * g.n - 1, 0.0);
    for (std::size_t i = 0; i < first.size(); ++i) {
        const auto& a = first[i].tag;
        const auto& b = second[i].tag;
        const bool same_draws = a.seed == b.seed && a.trajectory == b.trajectory && a.stream == b.stream;
        const bool paired = mode == NoiseMode::collective
                                ? same_draws && a.sign == -b.sign && a.gamma == b.gamma
                                : a.seed == b.seed && a.trajectory == b.trajectory && a.stream != b.stream;
        if (!paired) throw DomainError("noise tags cannot be paired for " + std::string(to_string(mode)) + " mode");
        const auto c = convolve(first[i].density, second[i].density);
        for (std::size_t k = 0; k < acc.size(); ++k) {
            acc[k] += c[k];
            acc2[k] += c[k] * c[k];
        }
    }
    // y_j = (j - n/2) dx, so convolution index k = j1 + j2 sits at r~ = (k - n) dx
    const double half = g.interior_half_width();
    const auto reps = static_cast<double>(first.size());
    std::vector<double> r, d, e;
    for (std::size_t k = 0; k < acc.size(); ++k) {
        const double rk = (static_cast<double>(k) - static_cast<double>(g.n)) * g.dx;
        if (std::abs(rk) > half) continue;
        r.push_back(rk);
        const double mean = acc[k] / reps;
        d.push_back(mean * g.dx);
        if (first.size() > 1)
            e.push_back(g.dx * std::sqrt(std::max(0.0, acc2[k] / reps - mean * mean) / (reps - 1.0)));
    }
    meta.n_traj = first.size();
    return make_profile(std::move(r), std::move(d), meta, std::move(e));
}

struct PairResult {
    DistributionProfile relative;
    DistributionProfile single; ///< particle 1 alone, same realisations
    FringeReport relative_report;
    FringeReport single_report;
    solver::GridSpec grid;
};

struct PairOptions {
    std::size_t n_real = 16;
    std::uint64_t seed = 1;
    RunSettings run;
};

/// Evolves both particles of the mirror-symmetric pair for n_real noise
/// realisations and returns the averaged relative and single-particle
/// distributions at t_max. Gamma in units of omega_t.
inline PairResult run_pair(const ExperimentConfig& c, NoiseMode mode, double gamma, const PairOptions& o = {},
                           std::optional<solver::GridSpec> grid = {})
{
    dwq::detail::require(gamma >= 0.0, "gamma must be >= 0");
    const double t_max = orbit_t_max(c);
    auto po = o.run.plan;
    po.dt = o.run.dt;
    const auto g = grid ? *grid : solver::choose_grid(c, t_max, gamma, po).grid;
    const auto model = solver::CoMovingModel::double_well(c, t_max + 0.1);
    const double g_int = gamma * c.frequency_ratio();
    const std::size_t reps = g_int > 0.0 ? o.n_real : 1;
    const std::size_t n = g.n;

    std::vector<TaggedDensity> first(reps), second(reps);
    parallel_for(reps, o.run.workers, [&](std::size_t i) {
        solver::RunOptions ro;
        ro.dt = o.run.dt;
        ro.t_end = t_max;
        ro.sample_every = 0;
        ro.snapshot_times = {t_max};
        const auto traj = static_cast<std::uint32_t>(i);
        const solver::ForceNoise n1{g_int, o.seed, traj, 0, 1.0};
        const solver::ForceNoise n2 = mode == NoiseMode::collective ? solver::ForceNoise{g_int, o.seed, traj, 0, -1.0}
                                                                    : solver::ForceNoise{g_int, o.seed, traj, 1, -1.0};
        ro.noise = n1;
        first[i] = {n1, solver::run_trajectory(model, g, ro).snapshots[0].density()};
        if (g_int > 0.0) {
            ro.noise = n2;
            second[i] = {n2, solver::run_trajectory(model, g, ro).snapshots[0].density()};
        } else {
            // noiseless: both particles follow the same run
            second[i] = {n2, first[i].density};
        }
    });

    ProfileMeta meta;
    meta.label = c.label;
    meta.time = t_max;
    meta.gamma = gamma;
    PairResult out;
    out.grid = g;
    out.relative = relative_distribution(g, first, second, mode, meta);
    std::vector<double> p1(n, 0.0), p2(n, 0.0), se;
    for (const auto& f : first)
        for (std::size_t j = 0; j < n; ++j) {
            p1[j] += f.density[j] / static_cast<double>(reps);
            p2[j] += f.density[j] * f.density[j] / static_cast<double>(reps);
        }
    if (reps > 1) {
        se.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            se[j] = std::sqrt(std::max(0.0, p2[j] - p1[j] * p1[j]) / static_cast<double>(reps - 1));
    }
    meta.n_traj = reps;
    out.single = make_profile(g, std::move(p1), meta, std::move(se));
    out.relative_report = fringe_report(out.relative, fringe_options(c, o.run.fringe));
    out.single_report = fringe_report(out.single, fringe_options(c, o.run.fringe));
    return out;
}

} // namespace dwq::analysis
