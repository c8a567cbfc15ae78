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

#ifndef IAFPC_ASYMPTOTICS_HPP
#define IAFPC_ASYMPTOTICS_HPP

#include "analytic_core.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace iafpc {

inline PowerPolicy with_regime(PowerPolicy p, Regime r)
{
    p.regime = r;
    return p;
}

/// Average transmit power without interference awareness (i0 -> inf).
inline double avg_tx_power_non_ia(PowerPolicy const &policy, NetworkModel const &model, double rel_tol = 1e-8)
{
    return avg_tx_power(with_regime(policy, Regime::non_ia), model, rel_tol);
}

/// Non-IA log-Laplace transform: single integral over the serving distance of the interferer.
inline double beta_non_ia(std::size_t j, double s, PowerPolicy const &policy, NetworkModel const &model,
                          double rel_tol = 1e-7)
{
    return beta_j(j, s, with_regime(policy, Regime::non_ia), model, rel_tol);
}

inline double laplace_non_ia(std::size_t j, double s, PowerPolicy const &policy, NetworkModel const &model,
                             double rel_tol = 1e-7)
{
    return std::exp(beta_non_ia(j, s, policy, model, rel_tol));
}

/// SINR ccdf without interference awareness as a two-fold integral.
inline DistributionCurve ccdf_sinr_non_ia(std::span<const double> gamma_grid, PowerPolicy const &policy,
                                          NetworkModel const &model, double rel_tol = 1e-6)
{
    TwoTierGeometry geom(model);
    const PowerPolicy pol = with_regime(policy, Regime::non_ia);
    PowerLaw law(pol, model.pathloss);
    QuadratureSpec outer = analytic_quadrature(geom, rel_tol);
    outer.abs_tol = 1e-10;
    const QuadratureSpec inner = outer.inner();
    const auto rb = law.r_breakpoints({});
    const double pi = std::numbers::pi;
    const double tau_a = std::pow(model.tau(), -model.alpha());
    DistributionCurve out;
    out.kind = CurveKind::ccdf;
    for (double gamma : gamma_grid)
    {
        double total = 0.0;
        for (std::size_t j = 0; j < 2; ++j)
        {
            auto f = [&](double v) {
                const double g = geom.marginal_density(j, v);
                if (g == 0.0)
                    return 0.0;
                const double s = gamma * model.pathloss.loss(v) / law(v, kInf);
                const double noise = std::exp(-s * model.noise_power);
                if (noise == 0.0)
                    return 0.0;
                LaplaceKernel kernel(model.alpha(), s);
                double beta = 0.0;
                for (std::size_t k = 0; k < 2; ++k)
                {
                    const double pk = geom.prob_assoc(k);
                    if (pk <= 0.0)
                        continue;
                    const double cjk = geom.ratio(j, k);
                    const double part = integrate(
                        [&](double r) {
                            const double gk = geom.marginal_density(k, r);
                            return gk == 0.0 ? 0.0 : gk * kernel(law(r, kInf) * tau_a, cjk * r);
                        },
                        0.0, kInf, inner, rb);
                    beta -= 2.0 * pi * geom.lambda(k) / pk * part;
                }
                return g * noise * std::exp(beta);
            };
            total += integrate(f, 0.0, kInf, outer, rb);
        }
        out.grid.push_back(gamma);
        out.values.push_back(total);
    }
    return out;
}

/// Low-i0 average power; closed form under equal weights, quadrature otherwise.
inline double avg_tx_power_low_i0(PowerPolicy const &policy, NetworkModel const &model, double rel_tol = 1e-8)
{
    model.require_two_tiers();
    if (model.tiers[0].assoc_weight == model.tiers[1].assoc_weight)
    {
        const double lambda = model.total_effective_density();
        const double al = model.alpha();
        return policy.i0 * std::pow(model.tau() / std::sqrt(std::numbers::pi * lambda), al) * gamma_fn(2.0 + al / 2.0);
    }
    return avg_tx_power(with_regime(policy, Regime::low_i0), model, rel_tol);
}

/// Low-i0 log-Laplace transform for general association weights.
inline double beta_low_i0(std::size_t j, double s, PowerPolicy const &policy, NetworkModel const &model,
                          double rel_tol = 1e-7)
{
    return beta_j(j, s, with_regime(policy, Regime::low_i0), model, rel_tol);
}

inline double laplace_low_i0(std::size_t j, double s, PowerPolicy const &policy, NetworkModel const &model,
                             double rel_tol = 1e-7)
{
    return std::exp(beta_low_i0(j, s, policy, model, rel_tol));
}

/// Low-i0 Laplace transform under minimum-path-loss association; depends on s i0 only.
inline double laplace_low_i0_minpl(double s, double i0, double alpha)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("laplace_low_i0_minpl: s must be non-negative");
    const double x = s * i0;
    if (x == 0.0)
        return 1.0;
    return std::exp(-4.0 * x / (alpha - 2.0) * hyp2f1(1.0, (alpha - 2.0) / alpha, 2.0 - 2.0 / alpha, -x));
}

/// Low-i0 SINR ccdf under minimum-path-loss association, by quadrature against the
/// nearest/second-nearest joint pdf of the merged tier.
inline DistributionCurve ccdf_sinr_low_i0_minpl(std::span<const double> gamma_grid, PowerPolicy const &policy,
                                                NetworkModel const &model, double rel_tol = 1e-8)
{
    const double lambda = model.total_effective_density();
    const double al = model.alpha();
    const double pi = std::numbers::pi;
    const Hyp2F1 f(1.0, (al - 2.0) / al, 2.0 - 2.0 / al);
    QuadratureSpec outer;
    outer.rel_tol = rel_tol;
    outer.abs_tol = 1e-12;
    outer.scale = 1.0 / std::sqrt(pi * lambda);
    const QuadratureSpec inner = outer.inner();
    DistributionCurve out;
    out.kind = CurveKind::ccdf;
    for (double gamma : gamma_grid)
    {
        auto fw = [&](double w) {
            auto fv = [&](double v) {
                const double x = std::pow(v / w, al);
                const double noise = std::exp(-gamma * model.noise_power / policy.i0 * x);
                const double lap = std::exp(-4.0 * gamma * x / (al - 2.0) * f(-gamma * x));
                return 4.0 * pi * pi * lambda * lambda * v * w * std::exp(-pi * lambda * w * w) * noise * lap;
            };
            return integrate(fv, 0.0, w, inner);
        };
        out.grid.push_back(gamma);
        out.values.push_back(integrate(fw, 0.0, kInf, outer));
    }
    return out;
}

/// Interference mean and variance in the low-i0 regime.
inline InterferenceMoments interference_moments_low_i0(PowerPolicy const &policy, NetworkModel const &model)
{
    return interference_moments(with_regime(policy, Regime::low_i0), model);
}

} // namespace iafpc

#endif // IAFPC_ASYMPTOTICS_HPP
