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
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "wave.hpp"

namespace dwq::solver {

/// Direct integration of the master equation
///   d rho/dt = -i [H, rho] - (gamma/2) [y, [y, rho]]
/// on a small grid, with the same spectral kinetic operator as the
/// split-step solver. Each step is U(dt/2) E(dt) U(dt/2), where U is the
/// exact unitary of the (frozen) Hamiltonian and E the exact dephasing
/// channel rho_ij -> rho_ij exp(-gamma dt (y_i - y_j)^2 / 2).
class DensityMatrixOracle {
public:
    using Matrix = Eigen::MatrixXcd;
    static constexpr std::size_t max_points = 256;

    struct Options {
        double dt = 1e-3;
        std::size_t record_every = 1;
        bool static_hamiltonian = true; ///< diagonalise once instead of per step
        double trace_tolerance = 1e-8;
        double positivity_tolerance = 1e-8;
    };

    struct Record {
        std::vector<double> times;
        std::vector<std::vector<double>> density; ///< diag(rho) / dx
        std::vector<double> trace;
        std::vector<double> purity;
        std::vector<double> min_eigenvalue;
    };

    template <Model M>
    DensityMatrixOracle(const M& model, const GridSpec& grid, double gamma) : grid_(grid), gamma_(gamma)
    {
        grid.validate();
        if (grid.n > max_points) throw ResourceError("density-matrix oracle is limited to 256 grid points");
        detail::require(gamma >= 0.0, "gamma must be >= 0");
        const auto n = static_cast<Eigen::Index>(grid.n);
        Matrix f(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index l = 0; l < n; ++l)
                f(j, l) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j * l) / static_cast<double>(n));
        Eigen::VectorXd k2(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double k = grid.k(static_cast<std::size_t>(j));
            k2(j) = k * k;
        }
        kinetic_ = (f.adjoint() * (k2 / (2.0 * model.mass())).asDiagonal() * f) / static_cast<double>(n);
        p2_ = (f.adjoint() * k2.asDiagonal() * f) / static_cast<double>(n);
        mass_ = model.mass();
        potential_ = [model, grid](double t) {
            const auto q = model.effective(t);
            Eigen::VectorXd v(static_cast<Eigen::Index>(grid.n));
            for (std::size_t j = 0; j < grid.n; ++j) v(static_cast<Eigen::Index>(j)) = q(grid.x(j));
            return v;
        };
        decay_.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double d = grid.x(static_cast<std::size_t>(i)) - grid.x(static_cast<std::size_t>(j));
                decay_(i, j) = -0.5 * gamma * d * d;
            }
    }

    /// rho = |psi><psi| with unit trace.
    [[nodiscard]] Matrix pure(const WaveState& s) const
    {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(grid_.n));
        for (std::size_t j = 0; j < grid_.n; ++j) v(static_cast<Eigen::Index>(j)) = s.psi[j];
        v /= v.norm();
        return v * v.adjoint();
    }

    [[nodiscard]] Record evolve(Matrix rho, double t_end, const Options& opt) const
    {
        detail::require(opt.dt > 0.0 && t_end >= 0.0, "oracle needs dt > 0 and t_end >= 0");
        const auto steps = static_cast<std::size_t>(std::llround(t_end / opt.dt));
        Record rec;
        Matrix u;
        if (opt.static_hamiltonian) u = half_step(0.0, opt.dt);
        const Eigen::MatrixXd channel = (decay_ * opt.dt).array().exp().matrix();
        auto record = [&](double t) {
            rec.times.push_back(t);
            std::vector<double> d(grid_.n);
            for (std::size_t j = 0; j < grid_.n; ++j)
                d[j] = rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real() / grid_.dx;
            rec.density.push_back(std::move(d));
            const double tr = rho.trace().real();
            rec.trace.push_back(tr);
            rec.purity.push_back((rho * rho).trace().real());
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues().minCoeff();
            rec.min_eigenvalue.push_back(lo);
            if (std::abs(tr - 1.0) > opt.trace_tolerance) throw ToleranceError("oracle lost trace; reduce dt");
            if (lo < -opt.positivity_tolerance) throw ToleranceError("oracle lost positivity; reduce dt");
        };
        record(0.0);
        const std::size_t every = std::max<std::size_t>(opt.record_every, 1);
        for (std::size_t s = 0; s < steps; ++s) {
            const double t = static_cast<double>(s) * opt.dt;
            if (!opt.static_hamiltonian) u = half_step(t + 0.5 * opt.dt, opt.dt);
            rho = u * rho * u.adjoint();
            rho = rho.cwiseProduct(channel.cast<std::complex<double>>());
            rho = u * rho * u.adjoint();
            rho = 0.5 * (rho + rho.adjoint()).eval();
            if ((s + 1) % every == 0 || s + 1 == steps) record(static_cast<double>(s + 1) * opt.dt);
        }
        final_ = rho;
        return rec;
    }

    [[nodiscard]] const Matrix& final_state() const { return final_; }

    [[nodiscard]] double expect_x(const Matrix& rho) const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < grid_.n; ++j)
            s += grid_.x(j) * rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
        return s / rho.trace().real();
    }
    [[nodiscard]] double expect_p2(const Matrix& rho) const { return (rho * p2_).trace().real() / rho.trace().real(); }

private:
    [[nodiscard]] Matrix half_step(double t, double dt) const
    {
        Matrix h = kinetic_;
        h.diagonal() += potential_(t).cast<std::complex<double>>();
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Eigen::VectorXcd phase =
            (es.eigenvalues() * (-0.5 * dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
        return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    }

    GridSpec grid_;
    double gamma_;
    double mass_ = 1.0;
    Matrix kinetic_;
    Matrix p2_;
    Eigen::MatrixXd decay_;
    std::function<Eigen::VectorXd(double)> potential_;
    mutable Matrix final_;
};

} // namespace dwq::solver
