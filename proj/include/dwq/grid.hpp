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

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "errors.hpp"

namespace dwq::solver {

/// Uniform periodic grid in the co-moving coordinate, x_j = (j - n/2) dx in
/// units of x_zpf. The outer `absorb_fraction` of the span on each side is an
/// absorbing layer.
struct GridSpec {
    std::size_t n = 0;
    double dx = 0.0;
    double absorb_fraction = 0.05;

    [[nodiscard]] double span() const { return static_cast<double>(n) * dx; }
    [[nodiscard]] double x(std::size_t j) const
    {
        return (static_cast<double>(j) - static_cast<double>(n / 2)) * dx;
    }
    [[nodiscard]] double dk() const { return 2.0 * std::numbers::pi / span(); }
    [[nodiscard]] double k(std::size_t j) const
    {
        const auto jj = static_cast<double>(j);
        return dk() * (j < n / 2 ? jj : jj - static_cast<double>(n));
    }
    [[nodiscard]] double k_nyquist() const { return std::numbers::pi / dx; }
    [[nodiscard]] std::size_t absorb_points() const
    {
        return static_cast<std::size_t>(std::floor(absorb_fraction * static_cast<double>(n)));
    }
    /// Interior (non-absorbing) half width.
    [[nodiscard]] double interior_half_width() const
    {
        return (static_cast<double>(n / 2) - static_cast<double>(absorb_points())) * dx;
    }

    void validate() const
    {
        if (n < 8 || !std::has_single_bit(n)) throw GridError("grid size must be a power of two >= 8");
        if (!(dx > 0.0) || !std::isfinite(dx)) throw GridError("grid spacing must be > 0");
        if (absorb_fraction < 0.0 || absorb_fraction >= 0.5) throw GridError("absorb fraction must be in [0, 0.5)");
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

} // namespace dwq::solver
