// SPDX-License-Identifier: Apache-2.0
//
// iafpc: uplink interference-aware fractional power control for two-tier
// Poisson cellular networks, analysis and simulation.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef IAFPC_SINR_HPP
#define IAFPC_SINR_HPP

#include "analytic_core.hpp"
#include "interference_approx.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iafpc {

enum class LaplaceImpl
{
    exact,
    sigmoid,
    tda_exp,
    tda_alg
};

inline std::string_view to_string(LaplaceImpl i)
{
    switch (i)
    {
    case LaplaceImpl::exact: return "exact";
    case LaplaceImpl::sigmoid: return "sigmoid";
    case LaplaceImpl::tda_exp: return "tda_exp";
    case LaplaceImpl::tda_alg: return "tda_alg";
    }
    return "unknown";
}

/// Per-tier Laplace transform s -> L_I(s | X^(j)) for one implementation.
class LaplaceProvider
{
public:
    LaplaceProvider(LaplaceImpl impl, PowerPolicy const &policy, NetworkModel const &model,
                    std::span<const double> sigmoid_grid = {})
        : impl_(impl)
    {
        const auto grid = sigmoid_grid.empty() ? sigmoid_grid_db() : std::vector<double>(sigmoid_grid.begin(), sigmoid_grid.end());
        for (std::size_t j = 0; j < 2; ++j)
        {
            switch (impl)
            {
            case LaplaceImpl::exact: exact_[j] = std::make_shared<LaplaceCache>(policy, model, j); break;
            case LaplaceImpl::sigmoid: sigmoid_[j] = fit_sigmoid(j, policy, model, grid); break;
            case LaplaceImpl::tda_exp: tda_[j] = fit_tda(j, policy, model, TdaFamily::exponential); break;
            case LaplaceImpl::tda_alg: tda_[j] = fit_tda(j, policy, model, TdaFamily::algebraic); break;
            }
        }
    }

    LaplaceImpl impl() const { return impl_; }
    SigmoidFit const &sigmoid(std::size_t j) const { return sigmoid_.at(j); }
    TdaFit const &tda(std::size_t j) const { return tda_.at(j); }

    double operator()(std::size_t j, double s) const
    {
        if (s == 0.0)
            return 1.0;
        switch (impl_)
        {
        case LaplaceImpl::exact: return (*exact_.at(j))(s);
        case LaplaceImpl::sigmoid: return eval_approx_laplace(sigmoid_.at(j), s);
        case LaplaceImpl::tda_exp:
        case LaplaceImpl::tda_alg: return eval_approx_laplace(tda_.at(j), s);
        }
        return 0.0;
    }

private:
    LaplaceImpl impl_;
    std::array<std::shared_ptr<LaplaceCache>, 2> exact_{};
    std::array<SigmoidFit, 2> sigmoid_{};
    std::array<TdaFit, 2> tda_{};
};

/// SINR ccdf of the typical MT with a given Laplace provider.
inline double ccdf_sinr_point(double gamma, PowerPolicy const &policy, NetworkModel const &model,
                              LaplaceProvider const &lap, double rel_tol = 1e-6)
{
    if (!(gamma > 0.0))
        throw std::invalid_argument("ccdf_sinr: gamma must be positive");
    TwoTierGeometry geom(model);
    PowerLaw law(policy, model.pathloss);
    QuadratureSpec spec = analytic_quadrature(geom, rel_tol);
    spec.abs_tol = 1e-10;
    return pair_integral(
        geom, law,
        [&](std::size_t j, std::size_t, double v, double w) {
            const double s = gamma * model.pathloss.loss(v) / law(v, w);
            const double noise = std::exp(-s * model.noise_power);
            return noise == 0.0 ? 0.0 : noise * lap(j, s);
        },
        spec);
}

inline DistributionCurve ccdf_sinr(std::span<const double> gamma_grid, PowerPolicy const &policy,
                                   NetworkModel const &model, LaplaceProvider const &lap, double rel_tol = 1e-6)
{
    DistributionCurve out;
    out.kind = CurveKind::ccdf;
    for (double g : gamma_grid)
    {
        out.grid.push_back(g);
        out.values.push_back(ccdf_sinr_point(g, policy, model, lap, rel_tol));
    }
    return out;
}

inline DistributionCurve ccdf_sinr(std::span<const double> gamma_grid, PowerPolicy const &policy,
                                   NetworkModel const &model, LaplaceImpl impl, double rel_tol = 1e-6)
{
    LaplaceProvider lap(impl, policy, model);
    return ccdf_sinr(gamma_grid, policy, model, lap, rel_tol);
}

struct SeStats
{
    DistributionCurve ccdf; ///< over xi in bps/Hz
    double mean_se = 0.0;   ///< bps/Hz
    double xi_max = 0.0;    ///< truncation point of the mean integral
};

/**
 * SE ccdf F_SE(xi) = F_SINR(2^xi - 1) on `xi_grid` and the mean SE as the
 * integral of F_SE, truncated where F_SE < 1e-6. `ccdf` maps gamma to F_SINR(gamma).
 */
inline SeStats se_stats(std::span<const double> xi_grid, std::function<double(double)> const &ccdf,
                        double rel_tol = 1e-5)
{
    auto fse = [&](double xi) { return xi <= 0.0 ? 1.0 : ccdf(std::exp2(xi) - 1.0); };
    SeStats out;
    out.ccdf.kind = CurveKind::ccdf;
    for (double xi : xi_grid)
    {
        out.ccdf.grid.push_back(xi);
        out.ccdf.values.push_back(fse(xi));
    }
    double hi = 4.0;
    while (fse(hi) >= 1e-6)
    {
        hi *= 1.5;
        if (hi > 200.0)
            throw NumericError("se_stats: SE ccdf does not decay");
    }
    out.xi_max = hi;
    QuadratureSpec q;
    q.rel_tol = rel_tol;
    q.abs_tol = 1e-7;
    out.mean_se = integrate(fse, 0.0, hi, q);
    return out;
}

inline SeStats se_stats(std::span<const double> xi_grid, PowerPolicy const &policy, NetworkModel const &model,
                        LaplaceProvider const &lap, double rel_tol = 1e-5)
{
    return se_stats(
        xi_grid, [&](double g) { return ccdf_sinr_point(g, policy, model, lap, rel_tol / 10.0); }, rel_tol);
}

inline SeStats se_stats(std::span<const double> xi_grid, PowerPolicy const &policy, NetworkModel const &model,
                        LaplaceImpl impl, double rel_tol = 1e-5)
{
    LaplaceProvider lap(impl, policy, model);
    return se_stats(xi_grid, policy, model, lap, rel_tol);
}

} // namespace iafpc

#endif // IAFPC_SINR_HPP
