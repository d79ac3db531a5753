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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/tools/roots.hpp>

#include <dwq/analysis.hpp>
#include <dwq/experiments.hpp>
#include <dwq/quadrature.hpp>

using namespace dwq;
using namespace dwq::analysis;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Zero of Ai' in [lo, hi], by TOMS 748.
double airy_prime_zero(double lo, double hi)
{
    auto f = [](double z) { return boost::math::airy_ai_prime(z); };
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

// Ai^2(-(x - a) / w): fringes on the x > a side.
DistributionProfile airy_profile(double a, double w, double dx, ProfileMeta meta = {})
{
    std::vector<double> x, y;
    for (double v = a - 8.0 * w; v < a + 12.0 * w; v += dx) {
        x.push_back(v);
        const double ai = boost::math::airy_ai(-(v - a) / w);
        y.push_back(ai * ai);
    }
    return make_profile(std::move(x), std::move(y), meta);
}

std::vector<double> gaussian_density(std::size_t n, double dx, double mu, double sigma)
{
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = (static_cast<double>(j) - static_cast<double>(n / 2)) * dx;
        g[j] = std::exp(-0.5 * std::pow((x - mu) / sigma, 2)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    return g;
}

} // namespace

TEST_CASE("fringe report on a squared Airy function", "[analysis][fringe]")
{
    const double a = -3.0, w = 1.3;
    const auto p = airy_profile(a, w, 0.01);
    const auto r = require_fringes(p);
    const double z1 = airy_prime_zero(-1.5, -0.5);  // first maximum of Ai^2
    const double z2 = airy_prime_zero(-3.5, -3.0);  // second maximum
    const double zero = boost::math::airy_ai_zero<double>(1);
    CHECK(r.direction == +1);
    CHECK_THAT(r.max1.x, WithinAbs(a - z1 * w, 1e-4));
    CHECK_THAT(r.min1.x, WithinAbs(a - zero * w, 2e-3));
    CHECK_THAT(r.max2.x, WithinAbs(a - z2 * w, 1e-4));
    CHECK_THAT(r.separation, WithinRel((z1 - z2) * w, 1e-4));
    CHECK_THAT(r.visibility, WithinAbs(1.0, 1e-4));
    // ordered along the decay direction
    CHECK(r.max1.x < r.min1.x);
    CHECK(r.min1.x < r.max2.x);
}

TEST_CASE("mirrored pattern is found on the other side", "[analysis][fringe]")
{
    auto p = airy_profile(0.0, 1.0, 0.01);
    std::reverse(p.density.begin(), p.density.end());
    const auto r = require_fringes(p);
    CHECK(r.direction == -1);
    CHECK(r.max2.x < r.min1.x);
    CHECK(r.min1.x < r.max1.x);
}

TEST_CASE("flat and single-peaked profiles have no fringes", "[analysis][fringe]")
{
    std::vector<double> x(200), y(200, 1.0);
    std::iota(x.begin(), x.end(), 0.0);
    const auto flat = make_profile(x, y);
    const auto r = fringe_report(flat);
    CHECK_FALSE(r.fringes);
    CHECK(r.visibility == 0.0);
    CHECK_THROWS_AS(require_fringes(flat), NoFringeError);

    const auto g = make_profile(x, gaussian_density(200, 1.0, 0.0, 10.0));
    CHECK_FALSE(fringe_report(g).fringes);
}

TEST_CASE("under-resolved and noisy fringes", "[analysis][fringe]")
{
    // four samples per fringe in a deterministic profile: refuse
    const auto coarse = airy_profile(0.0, 1.0, 0.5);
    CHECK_THROWS_AS(fringe_report(coarse), DomainError);

    // sample-to-sample ripple on ensemble data is stepped over
    ProfileMeta meta;
    meta.n_traj = 16;
    auto noisy = airy_profile(0.0, 1.0, 0.01, meta);
    for (std::size_t j = 0; j < noisy.density.size(); ++j) noisy.density[j] *= 1.0 + 0.01 * ((j % 2) ? 1.0 : -1.0);
    const auto clean = fringe_report(airy_profile(0.0, 1.0, 0.01));
    const auto r = fringe_report(noisy);
    REQUIRE(r.fringes);
    // a 1% ripple moves the flat-topped maxima by up to ~0.15 w each
    CHECK_THAT(r.separation, WithinAbs(clean.separation, 0.3));
    CHECK_THAT(r.visibility, WithinAbs(clean.visibility, 0.05));
}

TEST_CASE("profile normalisation and smoothing", "[analysis]")
{
    const double dx = 0.05;
    const auto g = gaussian_density(801, dx, 0.0, 1.0);
    std::vector<double> x(801);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (static_cast<double>(j) - 400.0) * dx;
    std::vector<double> half = g;
    for (auto& v : half) v *= 0.5;
    const auto p = make_profile(x, half);
    CHECK_THAT(p.lost_mass, WithinAbs(0.5, 1e-9));
    CHECK_THAT(p.integral(), WithinAbs(1.0, 1e-12));
    CHECK_NOTHROW(p.validate());

    // Gaussian kernel adds variances: 1 + 0.5^2
    const auto s = smooth(p, 0.5);
    const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi * 1.25);
    CHECK_THAT(s.density[400], WithinRel(peak, 1e-3));
    CHECK_THROWS_AS(smooth(p, -1.0), DomainError);
}

TEST_CASE("scaling constant", "[analysis][fringe]")
{
    std::vector<ScalingPoint> table;
    for (const char* name : {"XXL", "XL", "L"}) {
        const auto c = preset(name);
        table.push_back({name, c.frequency_ratio(), c.well_length, c.start_ratio, 2.5});
    }
    // the dimensionless product is one for every tabulated set
    const auto r = fringe_scaling_check(table);
    CHECK_THAT(r.constant, WithinRel(2.5, 1e-9));
    CHECK_THAT(r.spread, WithinAbs(0.0, 1e-9));

    table[1].separation = 2.75;
    CHECK_THAT(fringe_scaling_check(table).spread, WithinRel(0.1, 1e-9));
    table[1].start_ratio = 0.2;
    CHECK_THROWS_AS(fringe_scaling_check(table), DomainError);
}

TEST_CASE("convolution and correlation", "[analysis][pair]")
{
    const std::size_t n = 512;
    const double dx = 0.05;
    const auto a = gaussian_density(n, dx, 1.0, 0.7);
    const auto b = gaussian_density(n, dx, -2.0, 1.1);
    const auto c = convolve(a, b);
    REQUIRE(c.size() == 2 * n - 1);
    // index k sits at (k - n) dx for grids centred at n/2
    double mass = 0.0, mean = 0.0, var = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double r = (static_cast<double>(k) - static_cast<double>(n)) * dx;
        mass += c[k] * dx * dx;
        mean += r * c[k] * dx * dx;
    }
    mean /= mass;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double r = (static_cast<double>(k) - static_cast<double>(n)) * dx;
        var += (r - mean) * (r - mean) * c[k] * dx * dx;
    }
    var /= mass;
    CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
    CHECK_THAT(mean, WithinAbs(-1.0, 1e-9));
    CHECK_THAT(var, WithinRel(0.49 + 1.21, 1e-6));

    // an autocorrelation is symmetric about zero lag
    const auto ac = cross_correlate(b, b);
    for (std::size_t k = 0; k < n - 1; ++k) REQUIRE_THAT(ac[k], WithinAbs(ac[2 * n - 2 - k], 1e-12));
}

TEST_CASE("pair noise tags must match the mode", "[analysis][pair]")
{
    const solver::GridSpec g{64, 0.5, 0.05};
    const std::vector<double> d = gaussian_density(64, 0.5, 0.0, 1.0);
    const solver::ForceNoise a{0.1, 1, 0, 0, 1.0};
    const solver::ForceNoise same{0.1, 1, 0, 0, -1.0};
    const solver::ForceNoise other{0.1, 1, 0, 1, -1.0};
    CHECK_NOTHROW(relative_distribution(g, {{a, d}}, {{same, d}}, NoiseMode::collective));
    CHECK_NOTHROW(relative_distribution(g, {{a, d}}, {{other, d}}, NoiseMode::independent));
    CHECK_THROWS_AS(relative_distribution(g, {{a, d}}, {{other, d}}, NoiseMode::collective), DomainError);
    CHECK_THROWS_AS(relative_distribution(g, {{a, d}}, {{same, d}}, NoiseMode::independent), DomainError);
    // symmetric inputs give a symmetric relative distribution
    const auto r = relative_distribution(g, {{a, d}}, {{same, d}}, NoiseMode::collective);
    const std::size_t m = r.x.size();
    for (std::size_t k = 0; k < m / 2; ++k) REQUIRE_THAT(r.density[k], WithinAbs(r.density[m - 1 - k], 1e-12));
}

TEST_CASE("ensemble minima must beat the standard error", "[analysis][fringe]")
{
    // broad peak with a shallow dip on its flank
    std::vector<double> x, y;
    for (double v = -20.0; v <= 20.0; v += 0.05) {
        x.push_back(v);
        y.push_back(std::exp(-v * v / 50.0) * (1.0 - 0.3 * std::exp(-(v - 4.0) * (v - 4.0) / 0.5)));
    }
    ProfileMeta meta;
    meta.n_traj = 16;
    auto err_of = [&](double rel) {
        std::vector<double> e(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) e[j] = rel * y[j];
        return e;
    };
    const auto sharp = fringe_report(make_profile(x, y, meta, err_of(0.01)));
    CHECK(sharp.fringes);
    CHECK(sharp.direction == 1);
    const auto noisy = fringe_report(make_profile(x, y, meta, err_of(0.2)));
    CHECK_FALSE(noisy.fringes);
    // the error survives normalisation and smoothing
    const auto p = make_profile(x, y, meta, err_of(0.2));
    CHECK_THAT(p.std_error[400] / p.density[400], WithinRel(0.2, 1e-12));
    CHECK(smooth(p, 0.5).std_error.size() == p.x.size());
    CHECK_THROWS_AS(make_profile(x, y, meta, std::vector<double>(3, 0.0)), DomainError);
}

TEST_CASE("the first minimum must lie within reach", "[analysis][fringe]")
{
    std::vector<double> x, y;
    for (double v = -20.0; v <= 20.0; v += 0.05) {
        x.push_back(v);
        y.push_back(std::exp(-v * v / 50.0) * (1.0 - 0.5 * std::exp(-(v - 8.0) * (v - 8.0) / 0.5)));
    }
    const auto p = make_profile(x, y);
    const auto free = fringe_report(p);
    REQUIRE(free.fringes);
    CHECK_THAT(free.min1.x, WithinAbs(7.9, 0.2));
    FringeOptions o;
    o.reach = 10.0;
    CHECK(fringe_report(p, o).fringes);
    o.reach = 5.0;
    const auto near = fringe_report(p, o);
    CHECK_FALSE(near.fringes);
    CHECK(near.visibility == 0.0);
}

TEST_CASE("Gauss-Hermite rules", "[analysis][quadrature]")
{
    for (std::size_t n : {1u, 5u, 15u, 21u}) {
        const auto q = gauss_hermite(n);
        // exact for polynomials up to degree 2n - 1: E[z^k] = (k - 1)!! for even k
        for (std::size_t k = 0; k < 2 * n; ++k) {
            double s = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += q.weights[i] * std::pow(q.nodes[i], double(k));
                scale += q.weights[i] * std::pow(std::abs(q.nodes[i]), double(k));
            }
            double ref = 0.0;
            if (k % 2 == 0) {
                ref = 1.0;
                for (std::size_t m = k - 1; m >= 1 && m < k; m -= 2) ref *= double(m);
            }
            REQUIRE_THAT(s, WithinAbs(ref, 1e-10 * std::max(1.0, scale)));
        }
    }
    double pruned = 0.0;
    const auto t = tensor_rule(2.0, 1.0, 0.0, 15, 15, 15, 1e-6, &pruned);
    double w = 0.0, var = 0.0;
    for (const auto& q : t) {
        w += q.weight;
        var += q.weight * q.dx * q.dx;
        CHECK(q.dt == 0.0);
    }
    CHECK(t.size() < 225);
    CHECK(pruned > 0.0);
    CHECK_THAT(w, WithinAbs(1.0, 1e-12));
    CHECK_THAT(var, WithinRel(4.0, 1e-4));
}
