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

#ifndef IAFPC_UNITS_HPP
#define IAFPC_UNITS_HPP

#include "special_math.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace iafpc {

/// 10^(x/10); +inf maps to +inf and -inf to 0.
inline double db_to_linear(double x)
{
    if (std::isnan(x))
        throw std::invalid_argument("db_to_linear: NaN input");
    if (x == kInf)
        return kInf;
    if (x == -kInf)
        return 0.0;
    return std::pow(10.0, x / 10.0);
}

/// dBm to W.
inline double dbm_to_watt(double x)
{
    return db_to_linear(x) * 1e-3;
}

inline double linear_to_db(double x)
{
    if (std::isnan(x) || x < 0.0)
        throw std::invalid_argument("linear_to_db: negative or NaN input");
    if (x == 0.0)
        return -kInf;
    return 10.0 * std::log10(x);
}

inline double watt_to_dbm(double w)
{
    return linear_to_db(w * 1e3);
}

struct TierParams
{
    double density = 0.0;      ///< BS per m^2
    double assoc_weight = 1.0; ///< t^(j), linear

    void validate() const
    {
        if (!(density > 0.0) || !std::isfinite(density))
            throw std::invalid_argument("tier density must be positive and finite");
        if (!(assoc_weight > 0.0) || !std::isfinite(assoc_weight))
            throw std::invalid_argument("association weight must be positive and finite");
    }
};

/// Single-slope path loss L(R) = (tau R)^alpha.
struct PathlossModel
{
    double a_L = 0.0;   ///< dB
    double b_L = 0.0;   ///< dB per decade
    double alpha = 0.0; ///< b_L / 10
    double tau = 0.0;   ///< 10^((a_L - 3 b_L) / b_L), per metre

    /// Path loss (linear) at distance r in metres.
    double loss(double r) const { return std::pow(tau * r, alpha); }

    void validate() const
    {
        if (!(alpha > 2.0) || !std::isfinite(alpha))
            throw std::invalid_argument("path-loss exponent must exceed 2, got " + std::to_string(alpha));
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw std::invalid_argument("path-loss slope tau must be positive");
    }

    /// Builds the model from (alpha, tau) directly.
    static PathlossModel from_alpha_tau(double alpha, double tau)
    {
        PathlossModel pl;
        pl.alpha = alpha;
        pl.tau = tau;
        pl.b_L = 10.0 * alpha;
        pl.a_L = pl.b_L * std::log10(tau) + 3.0 * pl.b_L;
        pl.validate();
        return pl;
    }
};

/// 3GPP macro path loss with BS height h_bs (m) and carrier f_c (MHz).
inline PathlossModel pathloss_from_3gpp(double h_bs, double f_c)
{
    if (!(h_bs > 0.0) || !(f_c > 0.0))
        throw std::invalid_argument("pathloss_from_3gpp: h_bs and f_c must be positive");
    PathlossModel pl;
    pl.a_L = 80.0 - 18.0 * std::log10(h_bs) + 21.0 * std::log10(f_c);
    pl.b_L = 40.0 * (1.0 - 4e-3 * h_bs);
    if (!(pl.b_L > 20.0))
        throw std::invalid_argument("pathloss_from_3gpp: b_L = " + std::to_string(pl.b_L) +
                                    " dB/decade gives alpha <= 2");
    pl.alpha = pl.b_L / 10.0;
    pl.tau = std::pow(10.0, (pl.a_L - 3.0 * pl.b_L) / pl.b_L);
    return pl;
}

/// Lognormal shadowing with unit mean, S = 10^(X/10), X ~ N(mu_dB, sigma_dB^2).
struct ShadowingParams
{
    double sigma_db = 0.0;

    double mu_db() const { return -std::numbers::ln10 * sigma_db * sigma_db / 20.0; }

    void validate() const
    {
        if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db))
            throw std::invalid_argument("shadowing sigma must be non-negative and finite");
    }
};

/// Density scaling of the PPP displaced by R -> S^(-1/alpha) R.
enum class DisplacementConvention
{
    theorem,      ///< E[S^(2/alpha)], exact for the displacement above
    unsquared_sigma ///< exp(ln10 mu/(5 alpha) + (ln10 sigma/(5 alpha))/2), square dropped
};

inline double displacement_factor(ShadowingParams const &s, double alpha,
                                  DisplacementConvention conv = DisplacementConvention::theorem)
{
    s.validate();
    if (s.sigma_db == 0.0 || std::isinf(alpha))
        return 1.0;
    const double k = std::numbers::ln10 / (5.0 * alpha);
    if (conv == DisplacementConvention::theorem)
        return std::exp(k * s.mu_db() + 0.5 * (k * s.sigma_db) * (k * s.sigma_db));
    return std::exp(k * s.mu_db() + 0.5 * (k * s.sigma_db));
}

inline double displaced_density(TierParams const &tier, ShadowingParams const &s, double alpha,
                                DisplacementConvention conv = DisplacementConvention::theorem)
{
    return tier.density * displacement_factor(s, alpha, conv);
}

/// Noise power in W from thermal density (dBm/Hz), bandwidth (Hz) and noise figure (dB).
inline double noise_power_w(double thermal_dbm_hz, double bandwidth_hz, double noise_figure_db)
{
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("bandwidth must be positive");
    return dbm_to_watt(thermal_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

struct NetworkModel
{
    std::vector<TierParams> tiers;
    PathlossModel pathloss;
    ShadowingParams shadowing;
    double noise_power = 0.0;        ///< W
    double mt_density = 0.0;         ///< MT per m^2
    double bandwidth = 0.0;          ///< Hz
    double noise_figure_db = 0.0;    ///< dB
    double thermal_density_dbm_hz = -174.0;
    DisplacementConvention displacement = DisplacementConvention::theorem;

    std::size_t num_tiers() const { return tiers.size(); }

    double alpha() const { return pathloss.alpha; }
    double tau() const { return pathloss.tau; }

    /// Density of tier j in the equivalent-distance domain.
    double effective_density(std::size_t j) const
    {
        return displaced_density(tiers.at(j), shadowing, pathloss.alpha, displacement);
    }

    double total_effective_density() const
    {
        double sum = 0.0;
        for (std::size_t j = 0; j < tiers.size(); ++j)
            sum += effective_density(j);
        return sum;
    }

    /// Validation shared by every consumer; the analytic core additionally requires two tiers.
    void validate() const
    {
        if (tiers.empty())
            throw std::invalid_argument("network model needs at least one tier");
        for (auto const &t : tiers)
            t.validate();
        pathloss.validate();
        shadowing.validate();
        if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
            throw std::invalid_argument("noise power must be non-negative and finite");
        if (!(mt_density >= 0.0))
            throw std::invalid_argument("MT density must be non-negative");
    }

    void require_two_tiers() const
    {
        if (tiers.size() != 2)
            throw std::invalid_argument("analytic expressions require exactly two tiers");
    }
};

enum class Regime
{
    iafpc,
    non_ia,
    low_i0
};

struct PowerPolicy
{
    double p0 = 1e-10;   ///< W
    double epsilon = 1.0;
    double i0 = kInf;    ///< W
    double pmax = kInf;  ///< W
    Regime regime = Regime::iafpc;

    void validate() const
    {
        if (!(p0 > 0.0) || !std::isfinite(p0))
            throw std::invalid_argument("p0 must be positive and finite");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("epsilon must lie in [0, 1]");
        if (!(i0 > 0.0))
            throw std::invalid_argument("i0 must be positive (use +inf to disable)");
        if (!(pmax > 0.0))
            throw std::invalid_argument("pmax must be positive (use +inf to disable)");
    }
};

} // namespace iafpc

#endif // IAFPC_UNITS_HPP
