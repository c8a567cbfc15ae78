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

#ifndef IAFPC_ANALYTIC_CORE_HPP
#define IAFPC_ANALYTIC_CORE_HPP

#include "power_control.hpp"
#include "special_math.hpp"
#include "units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace iafpc {

/// Event X^(j,m): served by tier j, most-interfered BS in tier m.
struct AssocPair
{
    std::size_t j = 0;
    std::size_t m = 0;
};

/**
 * Distance statistics of the typical point in a two-tier network, in the
 * equivalent-distance domain (densities are the displaced ones).
 */
class TwoTierGeometry
{
public:
    explicit TwoTierGeometry(NetworkModel const &model) : alpha_(model.alpha())
    {
        model.validate();
        model.require_two_tiers();
        for (std::size_t k = 0; k < 2; ++k)
        {
            lambda_[k] = model.effective_density(k);
            weight_[k] = model.tiers[k].assoc_weight;
        }
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t m = 0; m < 2; ++m)
                pair_prob_[j][m] = compute_pair_prob(j, m);
    }

    double alpha() const { return alpha_; }
    double lambda(std::size_t k) const { return lambda_.at(k); }
    double weight(std::size_t k) const { return weight_.at(k); }
    double lambda_total() const { return lambda_[0] + lambda_[1]; }

    /// (t_a / t_b)^(1/alpha).
    double ratio(std::size_t a, std::size_t b) const { return std::pow(weight_.at(a) / weight_.at(b), 1.0 / alpha_); }

    /// Characteristic length 1/sqrt(pi lambda_total), used as the quadrature map scale.
    double scale() const { return 1.0 / std::sqrt(std::numbers::pi * lambda_total()); }

    double prob_assoc(std::size_t j) const
    {
        double den = 0.0;
        for (std::size_t k = 0; k < 2; ++k)
            den += std::pow(weight_[k] / weight_.at(j), 2.0 / alpha_) * lambda_[k];
        return lambda_[j] / den;
    }

    double prob_assoc_pair(std::size_t j, std::size_t m) const { return pair_prob_.at(j).at(m); }
    double prob_assoc_pair(AssocPair p) const { return prob_assoc_pair(p.j, p.m); }

    /// Pr(Q^(m)): most-interfered BS in tier m.
    double prob_interfered(std::size_t m) const { return pair_prob_[0].at(m) + pair_prob_[1].at(m); }

    /// Lower end of the support of w = U given (v, X^(j,m)).
    double u_lower(std::size_t j, std::size_t m, double v) const { return j == m ? v : ratio(m, j) * v; }

    /// Pr(X^(j,m)) f(v, w | X^(j,m)); zero outside the support.
    double pair_density(std::size_t j, std::size_t m, double v, double w) const
    {
        if (!(v > 0.0) || !(w > u_lower(j, m, v)))
            return 0.0;
        const double pi = std::numbers::pi;
        if (j != m)
        {
            const double mx = std::max(v, w);
            return 2.0 * pi * lambda_[m] * w * std::exp(-pi * lambda_[m] * w * w) * 2.0 * pi * lambda_[j] * v *
                   std::exp(-pi * lambda_[j] * mx * mx);
        }
        const std::size_t jt = 1 - j;
        const double mx = std::max(ratio(jt, j) * v, w);
        return std::exp(-pi * lambda_[jt] * mx * mx) * 4.0 * pi * pi * lambda_[j] * lambda_[j] * v * w *
               std::exp(-pi * lambda_[j] * w * w);
    }

    /// Conditional joint pdf f(v, w | X^(j,m)); zero when Pr(X^(j,m)) = 0.
    double joint_pdf(std::size_t j, std::size_t m, double v, double w) const
    {
        const double p = prob_assoc_pair(j, m);
        return p > 0.0 ? pair_density(j, m, v, w) / p : 0.0;
    }

    /// Pr(X^(j)) f(v | X^(j)).
    double marginal_density(std::size_t j, double v) const
    {
        if (!(v > 0.0))
            return 0.0;
        const double pi = std::numbers::pi;
        const std::size_t jt = 1 - j;
        const double c = ratio(jt, j);
        return 2.0 * pi * lambda_[j] * v * std::exp(-pi * (lambda_[j] + lambda_[jt] * c * c) * v * v);
    }

    /// f(v | X^(j)).
    double marginal_pdf(std::size_t j, double v) const
    {
        const double p = prob_assoc(j);
        return p > 0.0 ? marginal_density(j, v) / p : 0.0;
    }

    /// Kinks of pair_density in w for fixed v.
    void add_w_breakpoints(std::size_t j, std::size_t m, double v, std::vector<double> &out) const
    {
        if (j != m)
            out.push_back(v);
        else
            out.push_back(ratio(1 - j, j) * v);
    }

private:
    double compute_pair_prob(std::size_t j, std::size_t m) const
    {
        const double lj = lambda_[j];
        if (j != m)
        {
            const double lm = lambda_[m];
            const double tt = std::pow(weight_[j] / weight_[m], 2.0 / alpha_);
            const double s = lj + lm;
            if (weight_[j] <= weight_[m])
                return lj * lm * tt / (s * s);
            return lm * (2.0 * lj + lm) / (s * s) - lm / (lj * tt + lm);
        }
        const std::size_t jt = 1 - j;
        const double lt = lambda_[jt];
        const double s = lj + lt;
        if (weight_[jt] <= weight_[j])
            return lj * lj / (s * s);
        const double tt = std::pow(weight_[j] / weight_[jt], 2.0 / alpha_);
        return lj * lj * tt * (lj - lt * (tt - 2.0)) / (s * s * (lt + lj * tt));
    }

    double alpha_;
    std::array<double, 2> lambda_{};
    std::array<double, 2> weight_{};
    std::array<std::array<double, 2>, 2> pair_prob_{};
};

inline double prob_assoc(std::size_t j, NetworkModel const &model)
{
    return TwoTierGeometry(model).prob_assoc(j);
}

inline double prob_assoc_pair(AssocPair pair, NetworkModel const &model)
{
    return TwoTierGeometry(model).prob_assoc_pair(pair);
}

inline double joint_pdf_r_u(double v, double w, AssocPair pair, NetworkModel const &model)
{
    return TwoTierGeometry(model).joint_pdf(pair.j, pair.m, v, w);
}

/// Transmit-power law of the selected regime together with its interference-cap geometry.
class PowerLaw
{
public:
    PowerLaw(PowerPolicy const &policy, PathlossModel const &pl) : policy_(policy), pl_(pl)
    {
        policy.validate();
        pl.validate();
        capped_ = policy.regime == Regime::low_i0 || (policy.regime == Regime::iafpc && std::isfinite(policy.i0));
    }

    PowerPolicy const &policy() const { return policy_; }
    PathlossModel const &pathloss() const { return pl_; }

    /// True when the power depends on the distance to the most-interfered BS.
    bool depends_on_u() const { return capped_; }

    double operator()(double r, double u) const { return p_mt_regime(r, u, policy_, pl_); }

    /// Distance below which an interferer of power p would exceed i0 at a BS (0 without a cap).
    double exclusion_radius(double p) const
    {
        if (!capped_)
            return 0.0;
        return std::pow(p / policy_.i0, 1.0 / pl_.alpha) / pl_.tau;
    }

    /// Largest u at which the i0 cap binds for serving distance r (IAFPC only).
    double cap_threshold(double r) const
    {
        if (policy_.regime != Regime::iafpc || !capped_)
            return 0.0;
        const double p = std::min(fpc_power(r, policy_, pl_), policy_.pmax);
        return std::pow(p / policy_.i0, 1.0 / pl_.alpha) / pl_.tau;
    }

    /// Serving distance at which pmax starts to bind (inf when it never does).
    double pmax_radius() const
    {
        if (std::isinf(policy_.pmax) || policy_.epsilon == 0.0 || policy_.regime == Regime::low_i0)
            return kInf;
        return std::pow(policy_.pmax / policy_.p0, 1.0 / (pl_.alpha * policy_.epsilon)) / pl_.tau;
    }

    /// Kinks of the power law and of the exclusion radius along r, for the given u/r ratios.
    std::vector<double> r_breakpoints(std::span<const double> ratios) const
    {
        std::vector<double> out;
        const double rp = pmax_radius();
        if (std::isfinite(rp))
            out.push_back(rp);
        if (policy_.regime == Regime::iafpc && capped_)
        {
            const double e = policy_.epsilon;
            for (double c : ratios)
            {
                if (!(c > 0.0))
                    continue;
                if (e < 1.0)
                    out.push_back(std::pow(std::pow(policy_.p0 / policy_.i0, 1.0 / pl_.alpha) *
                                               std::pow(pl_.tau, e - 1.0) / c,
                                           1.0 / (1.0 - e)));
                if (std::isfinite(policy_.pmax))
                    out.push_back(std::pow(policy_.pmax / policy_.i0, 1.0 / pl_.alpha) / pl_.tau / c);
            }
        }
        out.erase(std::remove_if(out.begin(), out.end(), [](double x) { return !(x > 0.0) || !std::isfinite(x); }),
                  out.end());
        return out;
    }

private:
    PowerPolicy policy_;
    PathlossModel pl_;
    bool capped_ = false;
};

/// Default quadrature for the analytic expressions of a model.
inline QuadratureSpec analytic_quadrature(TwoTierGeometry const &geom, double rel_tol = 1e-7)
{
    QuadratureSpec q;
    q.rel_tol = rel_tol;
    q.abs_tol = 0.0;
    q.max_subdivisions = 4000;
    q.scale = geom.scale();
    return q;
}

/**
 * Sum over association pairs (j, m) of the double integral
 *   int_0^inf dv int_{w_min(v)}^inf dw Pr(X^(j,m)) f(v, w | X^(j,m)) h(j, m, v, w),
 * with h restricted to the pairs accepted by `use_pair`.
 * `u_ratios` lists multiples c for which w = c v is a kink of h.
 */
template <class H, class Use>
double pair_integral(TwoTierGeometry const &geom, PowerLaw const &law, H &&h, Use &&use_pair,
                     QuadratureSpec const &spec, std::span<const double> u_ratios = {})
{
    const QuadratureSpec inner = spec.inner();
    double total = 0.0;
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t m = 0; m < 2; ++m)
        {
            if (!use_pair(j, m) || geom.prob_assoc_pair(j, m) <= 0.0)
                continue;
            std::vector<double> ratios(u_ratios.begin(), u_ratios.end());
            ratios.push_back(j == m ? 1.0 : geom.ratio(m, j));
            if (j == m)
                ratios.push_back(geom.ratio(1 - j, j));
            const auto rb = law.r_breakpoints(ratios);
            auto outer = [&](double v) {
                const double lo = geom.u_lower(j, m, v);
                std::vector<double> wb;
                geom.add_w_breakpoints(j, m, v, wb);
                if (law.depends_on_u())
                    wb.push_back(law.cap_threshold(v));
                for (double c : u_ratios)
                    wb.push_back(c * v);
                auto fw = [&](double w) {
                    const double g = geom.pair_density(j, m, v, w);
                    return g == 0.0 ? 0.0 : g * h(j, m, v, w);
                };
                return integrate(fw, lo, kInf, inner, wb);
            };
            total += integrate(outer, 0.0, kInf, spec, rb);
        }
    return total;
}

template <class H>
double pair_integral(TwoTierGeometry const &geom, PowerLaw const &law, H &&h, QuadratureSpec const &spec,
                     std::span<const double> u_ratios = {})
{
    return pair_integral(geom, law, std::forward<H>(h), [](std::size_t, std::size_t) { return true; }, spec,
                         u_ratios);
}

/// Average transmit power of the typical MT for the regime in `policy`.
inline double avg_tx_power(PowerPolicy const &policy, NetworkModel const &model, double rel_tol = 1e-8)
{
    TwoTierGeometry geom(model);
    PowerLaw law(policy, model.pathloss);
    QuadratureSpec spec = analytic_quadrature(geom, rel_tol);
    if (!law.depends_on_u())
    {
        const auto rb = law.r_breakpoints({});
        double total = 0.0;
        for (std::size_t j = 0; j < 2; ++j)
            total += integrate([&](double v) { return geom.marginal_density(j, v) * law(v, kInf); }, 0.0, kInf, spec,
                               rb);
        return total;
    }
    return pair_integral(geom, law, [&](std::size_t, std::size_t, double v, double w) { return law(v, w); }, spec);
}

/// chi(s, rho) = s a rho^(2-alpha)/(alpha-2) 2F1(1, 1-2/alpha; 2-2/alpha; -s a rho^-alpha) with a = p tau^-alpha.
class LaplaceKernel
{
public:
    LaplaceKernel(double alpha, double s)
        : alpha_(alpha), s_(s), f_(1.0, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha),
          asym_(std::tgamma(2.0 - 2.0 / alpha) * std::tgamma(2.0 / alpha) / (alpha - 2.0))
    {
    }

    double operator()(double a, double rho) const
    {
        if (s_ == 0.0 || a == 0.0)
            return 0.0;
        const double x = s_ * a * std::pow(rho, -alpha_);
        if (x > 1e30 || !std::isfinite(x))
            return asym_ * std::pow(s_ * a, 2.0 / alpha_);
        return x * rho * rho / (alpha_ - 2.0) * f_(-x);
    }

private:
    double alpha_, s_;
    Hyp2F1 f_;
    double asym_;
};

/**
 * Interference field functional
 *   sum_k 2 pi lambda_k sum_n Pr(Q^n | X^k) E[kernel(p tau^-alpha, rho_min) | X^(k,n)]
 * seen by a BS of tier j, with rho_min = max((t_j/t_k)^(1/alpha) r, exclusion radius).
 * beta_j(s) is minus this functional with the Laplace kernel.
 */
template <class Kernel>
double field_integral(TwoTierGeometry const &geom, PowerLaw const &law, std::size_t j, Kernel &&kernel,
                      QuadratureSpec const &spec)
{
    const double pi = std::numbers::pi;
    const double tau_a = std::pow(law.pathloss().tau, -law.pathloss().alpha);
    double total = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
    {
        const double pk = geom.prob_assoc(k);
        if (pk <= 0.0)
            continue;
        const double cjk = geom.ratio(j, k);
        double part = 0.0;
        if (!law.depends_on_u())
        {
            const auto rb = law.r_breakpoints({});
            part = integrate(
                [&](double r) {
                    const double g = geom.marginal_density(k, r);
                    if (g == 0.0)
                        return 0.0;
                    const double p = law(r, kInf);
                    return g * kernel(p * tau_a, cjk * r);
                },
                0.0, kInf, spec, rb);
        }
        else
        {
            const double ratios[] = {cjk};
            part = pair_integral(
                geom, law,
                [&](std::size_t, std::size_t, double r, double u) {
                    const double p = law(r, u);
                    return kernel(p * tau_a, std::max(cjk * r, law.exclusion_radius(p)));
                },
                [&](std::size_t kk, std::size_t) { return kk == k; }, spec, ratios);
        }
        total += 2.0 * pi * geom.lambda(k) / pk * part;
    }
    return total;
}

/// beta_j(s), the log-Laplace transform of the interference at a tier-j BS.
inline double beta_j(std::size_t j, double s, PowerPolicy const &policy, NetworkModel const &model,
                     double rel_tol = 1e-7)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("beta_j: s must be non-negative");
    if (s == 0.0)
        return 0.0;
    TwoTierGeometry geom(model);
    PowerLaw law(policy, model.pathloss);
    return -field_integral(geom, law, j, LaplaceKernel(model.alpha(), s), analytic_quadrature(geom, rel_tol));
}

/// beta_j'(0) from the closed first-moment kernel.
inline double beta_prime_0(std::size_t j, PowerPolicy const &policy, NetworkModel const &model, double rel_tol = 1e-8)
{
    TwoTierGeometry geom(model);
    PowerLaw law(policy, model.pathloss);
    const double al = model.alpha();
    return -field_integral(
        geom, law, j, [al](double a, double rho) { return a * std::pow(rho, 2.0 - al) / (al - 2.0); },
        analytic_quadrature(geom, rel_tol));
}

/// beta_j''(0) from the closed second-moment kernel.
inline double beta_second_0(std::size_t j, PowerPolicy const &policy, NetworkModel const &model,
                            double rel_tol = 1e-8)
{
    TwoTierGeometry geom(model);
    PowerLaw law(policy, model.pathloss);
    const double al = model.alpha();
    return field_integral(
        geom, law, j, [al](double a, double rho) { return a * a * std::pow(rho, 2.0 - 2.0 * al) / (al - 1.0); },
        analytic_quadrature(geom, rel_tol));
}

/// L_I(s | X^(j)) = exp(beta_j(s)). With i0 = +inf this is the non-IA single-integral transform.
inline double laplace_interference(std::size_t j, double s, PowerPolicy const &policy, NetworkModel const &model,
                                   double rel_tol = 1e-7)
{
    return std::exp(beta_j(j, s, policy, model, rel_tol));
}

struct InterferenceMoments
{
    double mean = 0.0;     ///< W
    double variance = 0.0; ///< W^2
    std::array<double, 2> beta1{}; ///< beta_j'(0)
    std::array<double, 2> beta2{}; ///< beta_j''(0)
};

/// Mean and variance of the interference at the probe BS, unconditioned on the serving tier.
inline InterferenceMoments interference_moments(PowerPolicy const &policy, NetworkModel const &model,
                                                double rel_tol = 1e-8)
{
    TwoTierGeometry geom(model);
    InterferenceMoments out;
    double second = 0.0;
    for (std::size_t j = 0; j < 2; ++j)
    {
        out.beta1[j] = beta_prime_0(j, policy, model, rel_tol);
        out.beta2[j] = beta_second_0(j, policy, model, rel_tol);
        if (!std::isfinite(out.beta1[j]) || !std::isfinite(out.beta2[j]))
            throw NumericError("interference_moments: divergent moment integral");
        const double pj = geom.prob_assoc(j);
        out.mean -= pj * out.beta1[j];
        second += pj * (out.beta2[j] + out.beta1[j] * out.beta1[j]);
    }
    out.variance = second - out.mean * out.mean;
    return out;
}

/**
 * Memoised beta_j(s) on a log-spaced grid with cubic interpolation of
 * log(-beta) against log(s). Below the grid the second-order Taylor expansion
 * from the closed moment kernels is used; far above, L_I is below e^-60.
 * Safe for concurrent use.
 */
class LaplaceCache
{
public:
    LaplaceCache(PowerPolicy const &policy, NetworkModel const &model, std::size_t j, int per_decade = 20,
                 double rel_tol = 1e-7)
        : policy_(policy), model_(model), j_(j), per_decade_(per_decade), rel_tol_(rel_tol)
    {
        if (per_decade < 2)
            throw std::invalid_argument("LaplaceCache: need at least 2 nodes per decade");
        d1_ = beta_prime_0(j, policy, model);
        d2_ = beta_second_0(j, policy, model);
    }

    std::size_t tier() const { return j_; }
    double beta_prime() const { return d1_; }
    double beta_second() const { return d2_; }

    double beta(double s) const
    {
        if (!(s >= 0.0))
            throw std::invalid_argument("LaplaceCache: s must be non-negative");
        if (s == 0.0)
            return 0.0;
        if (-d1_ * s < kTaylorLimit)
            return d1_ * s + 0.5 * d2_ * s * s;
        const double x = std::log10(s) * per_decade_;
        const long k = static_cast<long>(std::floor(x));
        const double t = x - static_cast<double>(k);
        const double y1 = node(k);
        const double y2 = node(k + 1);
        if (y1 > kSaturate)
            return -std::exp(y1);
        const double y0 = node(k - 1);
        const double y3 = node(k + 2);
        // Catmull-Rom on the uniform log grid.
        const double y = y1 + 0.5 * t * (y2 - y0 + t * (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3 + t * (3.0 * (y1 - y2) + y3 - y0)));
        return -std::exp(y);
    }

    double operator()(double s) const { return std::exp(beta(s)); }

    std::size_t nodes_evaluated() const
    {
        std::lock_guard<std::mutex> lock(mu_);
        return nodes_.size();
    }

private:
    static constexpr double kTaylorLimit = 1e-4;
    static constexpr double kSaturate = 4.1; // log(60)

    double node(long k) const
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = nodes_.find(k); it != nodes_.end())
            return it->second;
        const double s = std::pow(10.0, static_cast<double>(k) / per_decade_);
        const double b = beta_j(j_, s, policy_, model_, rel_tol_);
        const double y = std::log(std::max(-b, std::numeric_limits<double>::min()));
        nodes_.emplace(k, y);
        return y;
    }

    PowerPolicy policy_;
    NetworkModel model_;
    std::size_t j_;
    int per_decade_;
    double rel_tol_;
    double d1_ = 0.0, d2_ = 0.0;
    mutable std::mutex mu_;
    mutable std::map<long, double> nodes_;
};

enum class CurveKind
{
    ccdf,
    laplace
};

/// Monotone grid of (argument, value) pairs.
struct DistributionCurve
{
    std::vector<double> grid;
    std::vector<double> values;
    CurveKind kind = CurveKind::ccdf;

    /// Values in [0, 1] and non-increasing along the grid, up to `tol`.
    bool is_valid(double tol = 1e-9) const
    {
        if (grid.size() != values.size())
            return false;
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            if (!(values[i] >= -tol && values[i] <= 1.0 + tol))
                return false;
            if (i > 0 && (grid[i] < grid[i - 1] || values[i] > values[i - 1] + tol))
                return false;
        }
        return true;
    }
};

} // namespace iafpc

#endif // IAFPC_ANALYTIC_CORE_HPP
