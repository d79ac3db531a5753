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

#include <dwq/gaussian.hpp>
#include <dwq/params.hpp>

using namespace dwq;
using namespace dwq::gaussian;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("ground state of the trap is stationary", "[gaussian]")
{
    const double r = 7.0;
    const auto tl = propagate_moments([&](double) { return r * r; }, r, 0.0, GaussianState{}, 10.0, 1e-3);
    for (const auto& s : tl) {
        REQUIRE_THAT(s.sxx, WithinAbs(1.0, 1e-9));
        REQUIRE_THAT(s.sxp, WithinAbs(0.0, 1e-9));
        REQUIRE_THAT(s.spp, WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("free spreading and momentum diffusion", "[gaussian]")
{
    const double r = 3.0, g = 0.2, t = 2.0;
    const auto s = propagate_moments([](double) { return 0.0; }, r, g, GaussianState{}, t, 1e-3).back();
    // M = [[1, r t], [0, 1]]; Q from d/dt Q = A Q + Q A^T + diag(0, 4 g)
    CHECK_THAT(s.spp, WithinRel(1.0 + 4.0 * g * t, 1e-10));
    CHECK_THAT(s.sxp, WithinRel(r * t + 2.0 * r * g * t * t, 1e-10));
    CHECK_THAT(s.sxx, WithinRel(1.0 + r * r * t * t + 4.0 / 3.0 * r * r * g * t * t * t, 1e-10));
    CHECK_THAT(s.det, WithinRel(s.sxx * s.spp - s.sxp * s.sxp, 1e-10));
}

TEST_CASE("inverted oscillator squeezes exponentially", "[gaussian]")
{
    const double r = 2.0, t = 3.0;
    const auto tl = propagate_moments([&](double) { return -r * r; }, r, 0.0, GaussianState{}, t, 1e-3);
    const auto& s = tl.back();
    CHECK_THAT(s.sxx, WithinRel(std::cosh(2.0 * r * t), 1e-9));
    CHECK_THAT(s.det, WithinRel(1.0, 1e-12));
    CHECK_THAT(squeezing_db(s), WithinRel(20.0 * r * t / std::log(10.0), 1e-6));
}

TEST_CASE("thermal states", "[gaussian]")
{
    const auto s = GaussianState::thermal(2.0);
    CHECK(s.sxx == 5.0);
    CHECK(s.spp == 5.0);
    CHECK_THAT(squeezing_db(s), WithinRel(-10.0 * std::log10(5.0), 1e-14));
    CHECK_THROWS_AS(GaussianState::thermal(-1.0), DomainError);
}

TEST_CASE("delocalisation and squeezing peak on a desk-scale set", "[gaussian]")
{
    const auto c = preset("M");
    const auto tr = classical::integrate_orbit(c, 1e-3);
    const auto tl = propagate_moments(tr, c, 0.0);
    double dx = 0.0, sq = 0.0, t_dx = 0.0;
    for (const auto& s : tl) {
        if (delta_x(s) > dx) {
            dx = delta_x(s);
            t_dx = s.t;
        }
        sq = std::max(sq, squeezing_db(s));
        REQUIRE_THAT(s.det, WithinRel(1.0, 1e-9));
    }
    const double eta = delocalization(c);
    CHECK_THAT(dx, WithinRel(eta, 0.05));
    CHECK_THAT(sq, WithinAbs(squeezing_s0(eta), 1.0));
    CHECK_THAT(t_dx, WithinAbs(*tr.t_d, 0.2));
}

TEST_CASE("decoherence broadens the Gaussian state", "[gaussian]")
{
    const auto c = preset("M");
    const auto tr = classical::integrate_orbit(c, 1e-3);
    const auto a = propagate_moments(tr, c, 0.0).back();
    const auto b = propagate_moments(tr, c, 1e-6).back();
    CHECK(b.sxx > a.sxx);
    CHECK(b.det > 1.0);
    CHECK(squeezing_db(b) < squeezing_db(a));
}
