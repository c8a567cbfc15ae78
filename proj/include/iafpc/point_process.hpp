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

#ifndef IAFPC_POINT_PROCESS_HPP
#define IAFPC_POINT_PROCESS_HPP

#include "power_control.hpp"
#include "units.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace iafpc {

/// SplitMix64 finaliser; used to derive independent stream seeds and hash link indices.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

using Rng = std::mt19937_64;

/// Independent generator for realization `index` of a run seeded with `master`.
inline Rng make_stream(std::uint64_t master, std::uint64_t index)
{
    return Rng(derive_seed(master, index));
}

/// Uniform in (0, 1) from the top 53 bits, never 0 or 1.
inline double u01_open(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

inline double uniform01(Rng &rng)
{
    return u01_open(rng());
}

/// Inverse of the standard normal cdf (Acklam's rational approximation, relative error below 1.2e-9).
inline double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow)
    {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    else if (p <= 1.0 - plow)
    {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    else
    {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

/// normal_quantile refined by one Halley step against erfc (near machine precision).
inline double normal_quantile_refined(double p)
{
    const double x = normal_quantile(p);
    // upper tail evaluated through 1 - p, which is exact for p > 1/2
    const double e = p > 0.5 ? (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2)
                             : 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

/**
 * Per-link lognormal shadowing derived from a hash of (seed, a, b), so the value
 * of a link is fixed within a realization no matter in which order links are
 * visited. The dB value is clipped at mu +/- clip_sigmas * sigma, which gives the
 * hard bounds used to prune nearest-BS searches.
 */
class LinkShadowing
{
public:
    LinkShadowing(std::uint64_t seed, ShadowingParams const &s, double alpha, double clip_sigmas = 5.0)
        : seed_(splitmix64(seed ^ 0xA0761D6478BD642Full)), sigma_(s.sigma_db), mu_(s.mu_db()), alpha_(alpha),
          clip_(clip_sigmas), k_(std::numbers::ln10 / (10.0 * alpha))
    {
        s.validate();
        if (!(alpha > 0.0))
            throw std::invalid_argument("LinkShadowing: alpha must be positive");
    }

    /// Shadowing S_dB of link (a, b).
    double s_db(std::uint64_t a, std::uint64_t b) const
    {
        if (sigma_ == 0.0)
            return 0.0;
        const std::uint64_t h = splitmix64(seed_ ^ splitmix64(a * 0xD1B54A32D192ED03ull + splitmix64(b)));
        const double z = std::clamp(normal_quantile(u01_open(h)), -clip_, clip_);
        return mu_ + sigma_ * z;
    }

    /// Equivalent-distance multiplier S^(-1/alpha).
    double factor(std::uint64_t a, std::uint64_t b) const
    {
        if (sigma_ == 0.0)
            return 1.0;
        return std::exp(-s_db(a, b) * k_);
    }

    double min_factor() const { return std::pow(10.0, -(mu_ + clip_ * sigma_) / (10.0 * alpha_)); }
    double max_factor() const { return std::pow(10.0, -(mu_ - clip_ * sigma_) / (10.0 * alpha_)); }

private:
    std::uint64_t seed_;
    double sigma_, mu_, alpha_, clip_, k_;
};

struct Point
{
    double x = 0.0;
    double y = 0.0;
    std::size_t tier = 0;
};

struct PointPattern
{
    std::vector<Point> points;
    double window_half = 0.0;
};

/// Homogeneous PPP of the given density in [-w, w]^2, all points labelled `tier`.
inline PointPattern sample_ppp(double density, double window_half, Rng &rng, std::size_t tier = 0)
{
    if (!(density >= 0.0) || !(window_half > 0.0))
        throw std::invalid_argument("sample_ppp: density must be >= 0 and window_half > 0");
    PointPattern pat;
    pat.window_half = window_half;
    const double side = 2.0 * window_half;
    const double mean = density * side * side;
    if (mean == 0.0)
        return pat;
    std::poisson_distribution<long long> count_dist(mean);
    const long long n = count_dist(rng);
    pat.points.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
    {
        const double x = -window_half + side * uniform01(rng);
        const double y = -window_half + side * uniform01(rng);
        pat.points.push_back({x, y, tier});
    }
    return pat;
}

/// Lognormal S draw (linear) with the given parameters.
inline double draw_shadowing(ShadowingParams const &s, Rng &rng)
{
    if (s.sigma_db == 0.0)
        return 1.0;
    std::normal_distribution<double> n(s.mu_db(), s.sigma_db);
    return db_to_linear(n(rng));
}

/// Equivalent distances S^(-1/alpha) |p - origin| with independent S per point.
inline std::vector<double> apply_shadowing(PointPattern const &pat, Point const &origin, ShadowingParams const &s,
                                           double alpha, Rng &rng)
{
    std::vector<double> out;
    out.reserve(pat.points.size());
    for (auto const &p : pat.points)
    {
        const double d = std::hypot(p.x - origin.x, p.y - origin.y);
        out.push_back(std::pow(draw_shadowing(s, rng), -1.0 / alpha) * d);
    }
    return out;
}

/// One BS as seen from a query point.
struct BsDistance
{
    double distance = 0.0; ///< equivalent distance, m
    std::size_t tier = 0;
    std::size_t index = 0;
};

struct Association
{
    LinkGeometry geom;
    std::size_t serving_index = 0;
    std::size_t interfered_index = 0;
};

/// Serving BS maximises t^(j) (tau R)^(-alpha); the most-interfered BS is the nearest other BS.
inline Association associate(std::span<const BsDistance> bs, std::span<const double> weights, double alpha)
{
    if (bs.size() < 2)
        throw std::invalid_argument("link_geometry: at least two BSs are required");
    std::size_t best = 0;
    double best_w = kInf;
    for (std::size_t i = 0; i < bs.size(); ++i)
    {
        const double w = std::pow(weights[bs[i].tier], -1.0 / alpha) * bs[i].distance;
        if (w < best_w)
        {
            best_w = w;
            best = i;
        }
    }
    std::size_t other = bs.size();
    for (std::size_t i = 0; i < bs.size(); ++i)
        if (i != best && (other == bs.size() || bs[i].distance < bs[other].distance))
            other = i;
    Association a;
    a.geom = {bs[best].distance, bs[other].distance, bs[best].tier, bs[other].tier};
    a.serving_index = bs[best].index;
    a.interfered_index = bs[other].index;
    return a;
}

inline LinkGeometry link_geometry(std::span<const BsDistance> bs, std::span<const double> weights, double alpha)
{
    return associate(bs, weights, alpha).geom;
}

/// Per-tier association weights of a model.
inline std::vector<double> tier_weights(NetworkModel const &model)
{
    std::vector<double> w;
    for (auto const &t : model.tiers)
        w.push_back(t.assoc_weight);
    return w;
}

/**
 * Draws the link geometry of a typical point directly in the equivalent-distance
 * domain: per tier the two nearest displaced distances come from the radial
 * Poisson construction R_1^2 ~ Exp(pi lambda), R_2^2 - R_1^2 ~ Exp(pi lambda).
 */
inline LinkGeometry sample_typical_geometry(NetworkModel const &model, Rng &rng)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<BsDistance> nearest;
    nearest.reserve(2 * model.num_tiers());
    for (std::size_t k = 0; k < model.num_tiers(); ++k)
    {
        const double pl = std::numbers::pi * model.effective_density(k);
        const double a = e(rng) / pl;
        const double b = a + e(rng) / pl;
        nearest.push_back({std::sqrt(a), k, 2 * k});
        nearest.push_back({std::sqrt(b), k, 2 * k + 1});
    }
    const auto w = tier_weights(model);
    return link_geometry(nearest, w, model.alpha());
}

/// Uniform bucket grid over [-w, w]^2 for ring-by-ring neighbour searches.
class BsGrid
{
public:
    BsGrid(std::vector<Point> const &pts, double window_half, double cell)
        : pts_(&pts), w_(window_half), cell_(cell)
    {
        if (!(cell > 0.0) || !(window_half > 0.0))
            throw std::invalid_argument("BsGrid: cell and window must be positive");
        n_ = std::max(1, static_cast<int>(std::ceil(2.0 * w_ / cell_)));
        buckets_.assign(static_cast<std::size_t>(n_) * n_, {});
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            auto [cx, cy] = cell_of(pts[i].x, pts[i].y);
            buckets_[static_cast<std::size_t>(cy) * n_ + cx].push_back(i);
        }
    }

    double cell() const { return cell_; }
    int cells_per_side() const { return n_; }

    std::pair<int, int> cell_of(double x, double y) const
    {
        const int cx = std::clamp(static_cast<int>(std::floor((x + w_) / cell_)), 0, n_ - 1);
        const int cy = std::clamp(static_cast<int>(std::floor((y + w_) / cell_)), 0, n_ - 1);
        return {cx, cy};
    }

    /**
     * Visits the buckets at Chebyshev ring k around (x, y), calling f(index) for
     * every point. Returns false once the ring lies entirely outside the grid.
     * Every point not visited after rings 0..k is farther than k * cell from (x, y)
     * when (x, y) is inside the window.
     */
    template <class F>
    bool visit_ring(double x, double y, int k, F &&f) const
    {
        auto [cx, cy] = cell_of(x, y);
        if (cx - k < 0 && cy - k < 0 && cx + k >= n_ && cy + k >= n_)
            return false;
        auto visit = [&](int ix, int iy) {
            if (ix < 0 || iy < 0 || ix >= n_ || iy >= n_)
                return;
            for (std::size_t i : buckets_[static_cast<std::size_t>(iy) * n_ + ix])
                f(i);
        };
        if (k == 0)
        {
            visit(cx, cy);
            return true;
        }
        for (int ix = cx - k; ix <= cx + k; ++ix)
        {
            visit(ix, cy - k);
            visit(ix, cy + k);
        }
        for (int iy = cy - k + 1; iy <= cy + k - 1; ++iy)
        {
            visit(cx - k, iy);
            visit(cx + k, iy);
        }
        return true;
    }

private:
    std::vector<Point> const *pts_;
    double w_, cell_;
    int n_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

/// Writes `x_m,y_m,tier,truncation_state`; `states` may be empty.
inline void write_pattern_csv(std::ostream &os, PointPattern const &pat, std::span<const TruncationState> states = {})
{
    os << "x_m,y_m,tier,truncation_state\n";
    for (std::size_t i = 0; i < pat.points.size(); ++i)
    {
        auto const &p = pat.points[i];
        os << p.x << ',' << p.y << ',' << p.tier << ',';
        if (i < states.size())
            os << to_string(states[i]);
        os << '\n';
    }
}

} // namespace iafpc

#endif // IAFPC_POINT_PROCESS_HPP
