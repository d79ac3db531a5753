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
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace dwq {

/// Nodes and weights for averages over a standard normal variable:
/// E[f(z)] ~ sum_i w_i f(z_i), weights summing to one.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch: the nodes are the eigenvalues of the Jacobi matrix of the
/// probabilists' Hermite polynomials (off-diagonal sqrt(k)); the weights are
/// the squared first components of the normalised eigenvectors.
inline GaussHermite gauss_hermite(std::size_t n)
{
    detail::require(n >= 1 && n <= 200, "Gauss-Hermite order must lie in [1, 200]");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermite out;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        out.nodes.push_back(es.eigenvalues()(i));
        const double v = es.eigenvectors()(0, i);
        out.weights.push_back(v * v);
    }
    return out;
}

/// One node of a tensor rule over independent normals, already scaled.
struct QuadratureNode {
    double dx = 0.0;
    double dp = 0.0;
    double dt = 0.0;
    double weight = 1.0;
};

/// Tensor-product rule over (x, p, t) offsets with standard deviations
/// sigma_*. Dimensions with zero width collapse to one node. Nodes whose
/// weight falls below `prune` times the largest are dropped and the rest
/// renormalised; the dropped mass is returned through `pruned`.
inline std::vector<QuadratureNode> tensor_rule(double sigma_x, double sigma_p, double sigma_t, std::size_t nx,
                                               std::size_t np, std::size_t nt, double prune = 1e-6,
                                               double* pruned = nullptr)
{
    detail::require(sigma_x >= 0.0 && sigma_p >= 0.0 && sigma_t >= 0.0, "quadrature widths must be >= 0");
    auto rule = [](double sigma, std::size_t n) {
        if (sigma == 0.0) return GaussHermite{{0.0}, {1.0}};
        auto g = gauss_hermite(n);
        for (auto& z : g.nodes) z *= sigma;
        return g;
    };
    const auto gx = rule(sigma_x, nx), gp = rule(sigma_p, np), gt = rule(sigma_t, nt);
    std::vector<QuadratureNode> all;
    double wmax = 0.0;
    for (std::size_t a = 0; a < gx.nodes.size(); ++a)
        for (std::size_t b = 0; b < gp.nodes.size(); ++b)
            for (std::size_t c = 0; c < gt.nodes.size(); ++c) {
                const double w = gx.weights[a] * gp.weights[b] * gt.weights[c];
                all.push_back({gx.nodes[a], gp.nodes[b], gt.nodes[c], w});
                wmax = std::max(wmax, w);
            }
    std::vector<QuadratureNode> kept;
    double total = 0.0, dropped = 0.0;
    for (const auto& q : all) {
        if (q.weight >= prune * wmax) {
            kept.push_back(q);
            total += q.weight;
        } else {
            dropped += q.weight;
        }
    }
    for (auto& q : kept) q.weight /= total;
    if (pruned) *pruned = dropped;
    return kept;
}

} // namespace dwq
