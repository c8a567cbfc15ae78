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

#ifndef IAFPC_MONTECARLO_HPP
#define IAFPC_MONTECARLO_HPP

#include "analytic_core.hpp"
#include "point_process.hpp"
#include "power_control.hpp"
#include "units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace iafpc {

enum class InterfererModel
{
    actual,
    thinned
};

struct SimConfig
{
    std::size_t realizations = 10000;
    double window_half = 5000.0; ///< m
    std::uint64_t master_seed = 1;
    InterfererModel interferer_model = InterfererModel::actual;
    PowerPolicy policy;
    NetworkModel model;
    /// Half-width of the central square, as a fraction of the window, whose MTs enter the network-average power.
    double inner_fraction = 0.5;
    /// Shadowing dB values are clipped at mu +/- clip_sigmas sigma.
    double clip_sigmas = 5.0;
    /// Keep BS/MT patterns and per-MT truncation states in each realization.
    bool record_patterns = false;
    /// Interferer disc radius of the thinned model, as a multiple of window_half.
    double thinned_radius_factor = 4.0;

    void validate() const
    {
        if (realizations < 1)
            throw std::invalid_argument("SimConfig: realizations must be >= 1");
        if (!(window_half > 0.0))
            throw std::invalid_argument("SimConfig: window_half must be positive");
        if (!(inner_fraction > 0.0 && inner_fraction <= 1.0))
            throw std::invalid_argument("SimConfig: inner_fraction must lie in (0, 1]");
        if (!(thinned_radius_factor > 0.0))
            throw std::invalid_argument("SimConfig: thinned_radius_factor must be positive");
        policy.validate();
        model.validate();
    }
};

struct MetricEstimate
{
    double mean = 0.0;
    double ci_halfwidth_95 = 0.0;
    std::size_t n = 0;
};

struct InterfererRecord
{
    double x = 0.0; ///< m, relative to the window (actual) or the probe BS (thinned)
    double y = 0.0;
    double r = 0.0; ///< own serving equivalent distance
    double u = 0.0; ///< own most-interfered equivalent distance
    double d = 0.0; ///< equivalent distance to the probe BS
    double power = 0.0;
    TruncationState state = TruncationState::untruncated;
};

struct SimRealization
{
    std::size_t index = 0;
    PointPattern bs_pattern;          ///< filled when record_patterns
    PointPattern mt_pattern;          ///< filled when record_patterns
    std::vector<TruncationState> mt_states; ///< filled when record_patterns
    LinkGeometry probe_link;
    std::vector<InterfererRecord> interferers;
    double probe_power = 0.0;  ///< W
    double probe_fading = 0.0;
    double interference = 0.0; ///< W
    double probe_sinr = 0.0;
    double network_power_sum = 0.0; ///< sum of MT powers in the inner square
    std::size_t network_power_count = 0;
    bool probe_near_edge = false;

    double network_power_mean() const
    {
        return network_power_count > 0 ? network_power_sum / static_cast<double>(network_power_count) : 0.0;
    }
};

namespace detail {

struct MtLink
{
    std::size_t serving = 0;
    std::size_t interfered = 0;
    double r = 0.0;
    double u = 0.0;
};

/// Weighted association of point (x, y) with link id `id` against all BSs, pruned by the shadowing bounds.
inline MtLink associate_in_grid(double x, double y, std::uint64_t id, std::vector<Point> const &bs, BsGrid const &grid,
                                LinkShadowing const &shadow, std::vector<double> const &tinv, double tinv_min)
{
    const double gmin = shadow.min_factor();
    double best_w = kInf, best_d = kInf;
    std::size_t best = bs.size();
    double d1 = kInf, d2 = kInf;
    std::size_t i1 = bs.size(), i2 = bs.size();
    for (int k = 0;; ++k)
    {
        const bool inside = grid.visit_ring(x, y, k, [&](std::size_t b) {
            const double dist = std::sqrt((bs[b].x - x) * (bs[b].x - x) + (bs[b].y - y) * (bs[b].y - y));
            const double lb = gmin * dist;
            if (lb >= d2 && lb * tinv[bs[b].tier] >= best_w)
                return;
            const double d = dist * shadow.factor(id, b);
            const double w = tinv[bs[b].tier] * d;
            if (w < best_w)
            {
                best_w = w;
                best_d = d;
                best = b;
            }
            if (d < d1)
            {
                d2 = d1;
                i2 = i1;
                d1 = d;
                i1 = b;
            }
            else if (d < d2)
            {
                d2 = d;
                i2 = b;
            }
        });
        const double bound = gmin * k * grid.cell();
        if (!inside || (bound >= d2 && bound * tinv_min >= best_w))
            break;
    }
    if (best == bs.size() || i2 == bs.size())
        throw std::runtime_error("simulate_actual: fewer than two BSs in the window");
    MtLink out;
    out.serving = best;
    out.r = best_d;
    if (best == i1)
    {
        out.interfered = i2;
        out.u = d2;
    }
    else
    {
        out.interfered = i1;
        out.u = d1;
    }
    return out;
}

} // namespace detail

inline constexpr std::uint64_t kProbeId = std::uint64_t{1} << 62;

/**
 * Full spatial simulation with the actual uplink interferer process: every BS
 * schedules one uniformly chosen MT among those associated with it; the probe
 * MT sits at the origin and is the scheduled MT of its own cell.
 */
inline void simulate_actual(SimConfig const &cfg, std::function<void(SimRealization const &)> const &sink)
{
    cfg.validate();
    auto const &model = cfg.model;
    auto const &pl = model.pathloss;
    const double w = cfg.window_half;
    const std::size_t nt = model.num_tiers();
    std::vector<double> tinv(nt);
    double tinv_min = kInf;
    for (std::size_t k = 0; k < nt; ++k)
    {
        tinv[k] = std::pow(model.tiers[k].assoc_weight, -1.0 / pl.alpha);
        tinv_min = std::min(tinv_min, tinv[k]);
    }
    double lambda_bs = 0.0;
    for (auto const &t : model.tiers)
        lambda_bs += t.density;
    const double cell = std::min(w, 1.0 / std::sqrt(lambda_bs));
    const double inner = cfg.inner_fraction * w;

    std::vector<Point> bs;
    std::vector<std::vector<std::size_t>> members;
    std::vector<detail::MtLink> links;
    std::vector<double> powers;
    std::vector<TruncationState> states;

    for (std::size_t it = 0; it < cfg.realizations; ++it)
    {
        Rng rng = make_stream(cfg.master_seed, it);
        const LinkShadowing shadow(derive_seed(cfg.master_seed ^ 0x5EEDull, it), model.shadowing, pl.alpha,
                                   cfg.clip_sigmas);
        bs.clear();
        for (std::size_t k = 0; k < nt; ++k)
        {
            auto p = sample_ppp(model.tiers[k].density, w, rng, k);
            bs.insert(bs.end(), p.points.begin(), p.points.end());
        }
        if (bs.size() < 2)
            throw std::runtime_error("simulate_actual: fewer than two BSs in the window");
        const PointPattern mts = sample_ppp(model.mt_density, w, rng);
        const BsGrid grid(bs, w, cell);

        const std::size_t nm = mts.points.size();
        links.resize(nm);
        powers.resize(nm);
        states.resize(nm);
        members.assign(bs.size(), {});
        SimRealization out;
        out.index = it;
        for (std::size_t i = 0; i < nm; ++i)
        {
            auto const &m = mts.points[i];
            links[i] = detail::associate_in_grid(m.x, m.y, i, bs, grid, shadow, tinv, tinv_min);
            const TxPower tx = p_mt(links[i].r, links[i].u, cfg.policy, pl);
            powers[i] = tx.power;
            states[i] = tx.state;
            members[links[i].serving].push_back(i);
            if (std::abs(m.x) <= inner && std::abs(m.y) <= inner)
            {
                out.network_power_sum += tx.power;
                ++out.network_power_count;
            }
        }

        const detail::MtLink probe = detail::associate_in_grid(0.0, 0.0, kProbeId, bs, grid, shadow, tinv, tinv_min);
        out.probe_link = {probe.r, probe.u, bs[probe.serving].tier, bs[probe.interfered].tier};
        out.probe_power = p_mt(probe.r, probe.u, cfg.policy, pl).power;
        auto const &bs0 = bs[probe.serving];
        out.probe_near_edge = std::max(std::abs(bs0.x), std::abs(bs0.y)) > w / 2.0;

        std::exponential_distribution<double> fading(1.0);
        double interference = 0.0;
        for (std::size_t b = 0; b < bs.size(); ++b)
        {
            if (b == probe.serving || members[b].empty())
                continue;
            std::uniform_int_distribution<std::size_t> pick(0, members[b].size() - 1);
            const std::size_t i = members[b][pick(rng)];
            auto const &m = mts.points[i];
            const double d = std::hypot(m.x - bs0.x, m.y - bs0.y) * shadow.factor(i, probe.serving);
            const double h = fading(rng);
            interference += h * powers[i] * std::pow(pl.tau * d, -pl.alpha);
            out.interferers.push_back({m.x, m.y, links[i].r, links[i].u, d, powers[i], states[i]});
        }
        out.interference = interference;
        out.probe_fading = fading(rng);
        out.probe_sinr =
            out.probe_fading * out.probe_power * std::pow(pl.tau * probe.r, -pl.alpha) / (interference + model.noise_power);
        if (cfg.record_patterns)
        {
            out.bs_pattern.points = bs;
            out.bs_pattern.window_half = w;
            out.mt_pattern = mts;
            out.mt_states = states;
        }
        sink(out);
    }
}

/**
 * Probe link of realization `it` of simulate_actual, drawn without the MT
 * process: same BS layout, shadowing and association search, a fraction of the cost.
 */
inline LinkGeometry probe_link_actual(SimConfig const &cfg, std::size_t it)
{
    auto const &model = cfg.model;
    auto const &pl = model.pathloss;
    const std::size_t nt = model.num_tiers();
    std::vector<double> tinv(nt);
    double tinv_min = kInf, lambda_bs = 0.0;
    for (std::size_t k = 0; k < nt; ++k)
    {
        tinv[k] = std::pow(model.tiers[k].assoc_weight, -1.0 / pl.alpha);
        tinv_min = std::min(tinv_min, tinv[k]);
        lambda_bs += model.tiers[k].density;
    }
    const double w = cfg.window_half;
    Rng rng = make_stream(cfg.master_seed, it);
    const LinkShadowing shadow(derive_seed(cfg.master_seed ^ 0x5EEDull, it), model.shadowing, pl.alpha,
                               cfg.clip_sigmas);
    std::vector<Point> bs;
    for (std::size_t k = 0; k < nt; ++k)
    {
        auto p = sample_ppp(model.tiers[k].density, w, rng, k);
        bs.insert(bs.end(), p.points.begin(), p.points.end());
    }
    if (bs.size() < 2)
        throw std::runtime_error("probe_link_actual: fewer than two BSs in the window");
    const BsGrid grid(bs, w, std::min(w, 1.0 / std::sqrt(lambda_bs)));
    const detail::MtLink probe = detail::associate_in_grid(0.0, 0.0, kProbeId, bs, grid, shadow, tinv, tinv_min);
    return {probe.r, probe.u, bs[probe.serving].tier, bs[probe.interfered].tier};
}

/**
 * Simulation of the analytic interference model: interferers of tier k form a
 * PPP of the displaced density around the probe BS, each with its own link
 * geometry drawn conditionally on association with tier k, thinned by the
 * association event and by the i0 cap at the probe BS.
 */
inline void simulate_thinned(SimConfig const &cfg, std::function<void(SimRealization const &)> const &sink)
{
    cfg.validate();
    auto const &model = cfg.model;
    model.require_two_tiers();
    auto const &pl = model.pathloss;
    const double radius = cfg.thinned_radius_factor * cfg.window_half;
    const double pi = std::numbers::pi;
    constexpr std::size_t kMaxRejections = 1000000;
    const bool capped = std::isfinite(cfg.policy.i0) && cfg.policy.regime != Regime::non_ia;

    for (std::size_t it = 0; it < cfg.realizations; ++it)
    {
        Rng rng = make_stream(cfg.master_seed, it);
        std::exponential_distribution<double> fading(1.0);
        SimRealization out;
        out.index = it;
        out.probe_link = sample_typical_geometry(model, rng);
        const std::size_t j = out.probe_link.serving_tier;
        out.probe_power = p_mt_regime(out.probe_link.r, out.probe_link.u, cfg.policy, pl);
        out.network_power_sum = out.probe_power;
        out.network_power_count = 1;

        double interference = 0.0;
        for (std::size_t k = 0; k < 2; ++k)
        {
            const double cjk = std::pow(model.tiers[j].assoc_weight / model.tiers[k].assoc_weight, 1.0 / pl.alpha);
            std::poisson_distribution<long long> count(model.effective_density(k) * pi * radius * radius);
            const long long n = count(rng);
            for (long long c = 0; c < n; ++c)
            {
                const double d = radius * std::sqrt(uniform01(rng));
                const double ang = 2.0 * pi * uniform01(rng);
                LinkGeometry g;
                std::size_t rejected = 0;
                do
                {
                    g = sample_typical_geometry(model, rng);
                    if (g.serving_tier != k && ++rejected > kMaxRejections)
                        throw NumericError("simulate_thinned: more than 1e6 rejected geometry draws");
                } while (g.serving_tier != k);
                const double p = p_mt_regime(g.r, g.u, cfg.policy, pl);
                if (!(d > cjk * g.r))
                    continue;
                const double rx = p * std::pow(pl.tau * d, -pl.alpha);
                if (capped && !(rx < cfg.policy.i0))
                    continue;
                interference += fading(rng) * rx;
                out.interferers.push_back({d * std::cos(ang), d * std::sin(ang), g.r, g.u, d, p,
                                           p_mt(g.r, g.u, cfg.policy, pl).state});
            }
        }
        out.interference = interference;
        out.probe_fading = fading(rng);
        out.probe_sinr = out.probe_fading * out.probe_power * std::pow(pl.tau * out.probe_link.r, -pl.alpha) /
                         (interference + model.noise_power);
        sink(out);
    }
}

inline void simulate(SimConfig const &cfg, std::function<void(SimRealization const &)> const &sink)
{
    if (cfg.interferer_model == InterfererModel::actual)
        simulate_actual(cfg, sink);
    else
        simulate_thinned(cfg, sink);
}

/// Neumaier-compensated running sum.
class CompensatedSum
{
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    void merge(CompensatedSum const &o)
    {
        add(o.sum_);
        add(o.c_);
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

/// First four raw moments of a stream of values; a commutative monoid under merge().
class Accumulator
{
public:
    void add(double x)
    {
        ++n_;
        s1_.add(x);
        s2_.add(x * x);
        s3_.add(x * x * x);
        s4_.add(x * x * x * x);
    }

    void merge(Accumulator const &o)
    {
        n_ += o.n_;
        s1_.merge(o.s1_);
        s2_.merge(o.s2_);
        s3_.merge(o.s3_);
        s4_.merge(o.s4_);
    }

    std::size_t count() const { return n_; }
    double mean() const { return n_ ? s1_.value() / n_ : 0.0; }

    /// Unbiased sample variance.
    double variance() const
    {
        if (n_ < 2)
            return 0.0;
        const double m = mean();
        const double v = (s2_.value() - n_ * m * m) / (n_ - 1.0);
        return std::max(v, 0.0);
    }

    /// Fourth central moment (biased plug-in).
    double central4() const
    {
        if (n_ == 0)
            return 0.0;
        const double n = static_cast<double>(n_);
        const double m = mean();
        const double e2 = s2_.value() / n, e3 = s3_.value() / n, e4 = s4_.value() / n;
        return std::max(e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m * m * m * m, 0.0);
    }

    /// Mean with the normal-approximation 95% half-width 1.96 sd / sqrt(n).
    MetricEstimate mean_estimate() const
    {
        return {mean(), n_ > 1 ? 1.96 * std::sqrt(variance() / n_) : 0.0, n_};
    }

    /// Sample variance with a 95% half-width from the asymptotic variance (mu4 - sigma^4) / n.
    MetricEstimate variance_estimate() const
    {
        const double v = variance();
        if (n_ < 4)
            return {v, 0.0, n_};
        const double n = static_cast<double>(n_);
        const double var_of_var = std::max((central4() - v * v * (n - 3.0) / (n - 1.0)) / n, 0.0);
        return {v, 1.96 * std::sqrt(var_of_var), n_};
    }

private:
    std::size_t n_ = 0;
    CompensatedSum s1_, s2_, s3_, s4_;
};

/// Proportion estimate p with half-width 1.96 sqrt(p (1-p) / n).
inline MetricEstimate proportion_estimate(std::size_t hits, std::size_t n)
{
    if (n == 0)
        return {};
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, 1.96 * std::sqrt(p * (1.0 - p) / n), n};
}

/// Streaming estimator for every simulated metric.
class SimSummary
{
public:
    SimSummary(std::vector<double> gamma_grid = {}, std::vector<double> s_grid = {})
        : gamma_(std::move(gamma_grid)), s_(std::move(s_grid)), ccdf_hits_(gamma_.size(), 0)
    {
        for (auto &l : lap_)
            l.resize(s_.size());
    }

    void add(SimRealization const &r)
    {
        ++n_;
        probe_power_.add(r.probe_power);
        if (r.network_power_count > 0)
            network_power_.add(r.network_power_mean());
        interference_.add(r.interference);
        se_.add(std::log2(1.0 + r.probe_sinr));
        for (std::size_t i = 0; i < gamma_.size(); ++i)
            if (r.probe_sinr > gamma_[i])
                ++ccdf_hits_[i];
        const std::size_t t = std::min<std::size_t>(r.probe_link.serving_tier, 1);
        for (std::size_t i = 0; i < s_.size(); ++i)
        {
            const double e = std::exp(-s_[i] * r.interference);
            lap_[2][i].add(e);
            lap_[t][i].add(e);
        }
        if (r.probe_near_edge)
            ++edge_;
    }

    std::size_t count() const { return n_; }
    std::size_t edge_warnings() const { return edge_; }
    MetricEstimate avg_power() const { return network_power_.mean_estimate(); }
    MetricEstimate probe_power() const { return probe_power_.mean_estimate(); }
    MetricEstimate mean_interference() const { return interference_.mean_estimate(); }
    MetricEstimate var_interference() const { return interference_.variance_estimate(); }
    MetricEstimate mean_se() const { return se_.mean_estimate(); }
    std::vector<double> const &gamma_grid() const { return gamma_; }
    std::vector<double> const &s_grid() const { return s_; }

    /// Empirical survival function of the SINR at the gamma grid (non-increasing by construction).
    std::vector<MetricEstimate> ccdf_sinr() const
    {
        std::vector<MetricEstimate> out;
        for (std::size_t h : ccdf_hits_)
            out.push_back(proportion_estimate(h, n_));
        return out;
    }

    /// Empirical E[exp(-s I)] at the s grid, over all realizations.
    std::vector<MetricEstimate> laplace() const { return laplace_of(lap_[2]); }

    /// Empirical E[exp(-s I)] over the realizations whose probe MT is served by tier `tier` (0 or 1).
    std::vector<MetricEstimate> laplace(std::size_t tier) const { return laplace_of(lap_.at(tier)); }

private:
    static std::vector<MetricEstimate> laplace_of(std::vector<Accumulator> const &acc)
    {
        std::vector<MetricEstimate> out;
        for (auto const &a : acc)
            out.push_back(a.mean_estimate());
        return out;
    }

    std::vector<double> gamma_, s_;
    std::size_t n_ = 0, edge_ = 0;
    Accumulator probe_power_, network_power_, interference_, se_;
    std::vector<std::size_t> ccdf_hits_;
    std::array<std::vector<Accumulator>, 3> lap_; ///< tier 0, tier 1, all
};

/// Runs the configured simulator and folds every realization into a summary.
inline SimSummary run_simulation(SimConfig const &cfg, std::vector<double> gamma_grid = {},
                                 std::vector<double> s_grid = {})
{
    SimSummary sum(std::move(gamma_grid), std::move(s_grid));
    simulate(cfg, [&](SimRealization const &r) { sum.add(r); });
    return sum;
}

} // namespace iafpc

#endif // IAFPC_MONTECARLO_HPP
