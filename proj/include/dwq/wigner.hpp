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
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "wave.hpp"

namespace dwq::solver {

struct WignerWindow {
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t x_stride = 1; ///< every stride-th grid point
    double p_min = -5.0;
    double p_max = 5.0;
    double max_dp = 0.05; ///< requested momentum resolution, hbar/x_zpf
};

/// W(x, p) on a rectangular window, row-major in x: values[i * p.size() + m].
struct WignerMap {
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> values;
    double dp = 0.0;

    [[nodiscard]] double at(std::size_t i, std::size_t m) const { return values[i * p.size() + m]; }
    [[nodiscard]] double min() const { return *std::min_element(values.begin(), values.end()); }
    [[nodiscard]] double max() const { return *std::max_element(values.begin(), values.end()); }
};

/// Band-limited interpolation of psi onto a grid twice as fine.
inline ComplexVector upsample2(const WaveState& s)
{
    const std::size_t n = s.grid.n;
    ComplexVector a(s.psi.begin(), s.psi.end());
    FftPlan(n).forward(a);
    ComplexVector b(2 * n, Complex{});
    for (std::size_t j = 0; j < n / 2; ++j) b[j] = a[j];
    for (std::size_t j = n / 2 + 1; j < n; ++j) b[n + j] = a[j];
    // split the Nyquist bin so the interpolant stays real-symmetric
    b[n / 2] = 0.5 * a[n / 2];
    b[n + n / 2] = 0.5 * a[n / 2];
    FftPlan(2 * n).backward(b);
    for (auto& z : b) z /= static_cast<double>(n);
    return b;
}

/// W(x, p) = (1/pi) int dy exp(2 i p y) psi*(x + y) psi(x - y).
///
/// psi is first upsampled to spacing h = dx/2 so the p axis reaches the
/// grid Nyquist momentum pi/dx; the y-sum is then one FFT per x of length
/// M >= pi/(h max_dp), giving dp = pi/(M h). Over the full p period the
/// discrete marginal sum_p W dp equals |psi(x)|^2 exactly.
inline WignerMap wigner(const WaveState& s, const WignerWindow& w)
{
    const auto& g = s.grid;
    detail::require(w.x_min < w.x_max && w.p_min < w.p_max && w.max_dp > 0.0 && w.x_stride >= 1,
                    "invalid Wigner window");
    const double x_lo = g.x(0), x_hi = g.x(g.n - 1);
    if (w.x_min < x_lo || w.x_max > x_hi) throw GridError("Wigner window lies outside the grid");
    if (w.p_min < -g.k_nyquist() || w.p_max > g.k_nyquist())
        throw GridError("Wigner momentum window exceeds the grid Nyquist momentum");
    const double h = 0.5 * g.dx;
    const std::size_t n2 = 2 * g.n;
    auto m_len = std::bit_ceil(static_cast<std::size_t>(std::ceil(std::numbers::pi / (h * w.max_dp))));
    m_len = std::clamp<std::size_t>(m_len, 16, n2);
    const double dp = std::numbers::pi / (static_cast<double>(m_len) * h);
    if (dp > 2.0 * w.max_dp) throw GridError("grid span too small for the requested Wigner momentum resolution");

    const auto fine = upsample2(s);
    WignerMap map;
    map.dp = dp;
    std::vector<std::size_t> p_bins;
    for (std::size_t m = 0; m < m_len; ++m) {
        const auto mm = static_cast<double>(m < m_len / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(m_len));
        const double p = mm * dp;
        if (p >= w.p_min && p <= w.p_max) p_bins.push_back(m);
    }
    std::sort(p_bins.begin(), p_bins.end(), [&](std::size_t a, std::size_t b) {
        auto signed_of = [&](std::size_t m) { return m < m_len / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(m_len); };
        return signed_of(a) < signed_of(b);
    });
    for (auto m : p_bins) {
        const long mm = m < m_len / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(m_len);
        map.p.push_back(static_cast<double>(mm) * dp);
    }

    FftPlan plan(m_len);
    ComplexVector c(m_len);
    const long half = static_cast<long>(m_len / 2);
    for (std::size_t j = 0; j < g.n; j += w.x_stride) {
        const double x = g.x(j);
        if (x < w.x_min || x > w.x_max) continue;
        map.x.push_back(x);
        const long centre = static_cast<long>(2 * j);
        std::fill(c.begin(), c.end(), Complex{});
        for (long k = -half; k < half; ++k) {
            const long a = centre + k, b = centre - k;
            if (a < 0 || b < 0 || a >= static_cast<long>(n2) || b >= static_cast<long>(n2)) continue;
            c[static_cast<std::size_t>((k + static_cast<long>(m_len)) % static_cast<long>(m_len))] =
                std::conj(fine[static_cast<std::size_t>(a)]) * fine[static_cast<std::size_t>(b)];
        }
        plan.backward(c); // sum_k c_k exp(+2 pi i k m / M) = sum_k c_k exp(2 i p_m k h)
        for (auto m : p_bins) map.values.push_back(c[m].real() * h / std::numbers::pi);
    }
    return map;
}

} // namespace dwq::solver
