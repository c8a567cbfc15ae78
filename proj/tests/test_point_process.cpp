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

#include "iafpc/analytic_core.hpp"
#include "iafpc/config.hpp"
#include "iafpc/point_process.hpp"

#include <catch_amalgamated.hpp>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

using namespace iafpc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Kolmogorov-Smirnov statistic of a sample against a continuous cdf.
template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double f = cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

} // namespace

TEST_CASE("seed derivation is deterministic and spreads indices", "[point_process]")
{
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 4; ++m)
        for (std::uint64_t i = 0; i < 1000; ++i)
            seen.insert(derive_seed(m, i));
    CHECK(seen.size() == 4000);
    Rng a = make_stream(11, 5), b = make_stream(11, 5);
    for (int i = 0; i < 10; ++i)
        CHECK(a() == b());
    CHECK(u01_open(0) > 0.0);
    CHECK(u01_open(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("normal quantile accuracy", "[point_process]")
{
    const boost::math::normal n;
    for (double p : {1e-12, 1e-6, 0.01, 0.02425, 0.2, 0.5, 0.8, 0.97575, 0.999, 1.0 - 1e-9})
    {
        const double ref = boost::math::quantile(n, p);
        CHECK_THAT(normal_quantile(p), WithinAbs(ref, 1.2e-9 * std::max(1.0, std::abs(ref))));
        CHECK_THAT(normal_quantile_refined(p), WithinAbs(ref, 1e-13 * std::max(1.0, std::abs(ref))));
    }
}

TEST_CASE("hashed link shadowing: deterministic, clipped, lognormal moments", "[point_process]")
{
    const ShadowingParams sp{4.0};
    const double alpha = 3.84;
    const LinkShadowing sh(42, sp, alpha, 5.0);
    CHECK(sh.s_db(3, 9) == sh.s_db(3, 9));
    CHECK(sh.s_db(3, 9) != sh.s_db(9, 3));
    CHECK(LinkShadowing(43, sp, alpha).s_db(3, 9) != sh.s_db(3, 9));
    double sum = 0.0, sum2 = 0.0, lin = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double x = sh.s_db(static_cast<std::uint64_t>(i), 17);
        CHECK(std::abs(x - sp.mu_db()) <= 5.0 * sp.sigma_db + 1e-12);
        const double f = sh.factor(static_cast<std::uint64_t>(i), 17);
        CHECK(f >= sh.min_factor() * (1 - 1e-12));
        CHECK(f <= sh.max_factor() * (1 + 1e-12));
        sum += x;
        sum2 += x * x;
        lin += db_to_linear(x);
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    CHECK_THAT(mean, WithinAbs(sp.mu_db(), 4.0 * sp.sigma_db / std::sqrt(n)));
    CHECK_THAT(std::sqrt(var), WithinRel(sp.sigma_db, 0.01));
    // unit mean of the linear shadowing
    CHECK_THAT(lin / n, WithinAbs(1.0, 0.02));
    CHECK(LinkShadowing(1, ShadowingParams{0.0}, alpha).factor(1, 2) == 1.0);
}

TEST_CASE("PPP counts are Poisson", "[point_process]")
{
    Rng rng = make_stream(5, 0);
    const double lambda = 4e-6, w = 1000.0;
    const double mean_ref = lambda * 4.0 * w * w;
    double s = 0.0, s2 = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i)
    {
        const auto p = sample_ppp(lambda, w, rng, 1);
        for (auto const &pt : p.points)
        {
            REQUIRE(std::abs(pt.x) <= w);
            REQUIRE(std::abs(pt.y) <= w);
            REQUIRE(pt.tier == 1);
        }
        const double c = static_cast<double>(p.points.size());
        s += c;
        s2 += c * c;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK_THAT(mean, WithinAbs(mean_ref, 4.0 * std::sqrt(mean_ref / n)));
    CHECK_THAT(var, WithinRel(mean_ref, 0.1));
}

TEST_CASE("shadowed nearest distance follows the displaced PPP (KS test)", "[point_process]")
{
    const ShadowingParams sp{8.0};
    const double alpha = 3.84, lambda = 2e-6, w = 4000.0;
    const double lam_eff = lambda * displacement_factor(sp, alpha);
    Rng rng = make_stream(9, 1);
    std::vector<double> nearest;
    const int n = 3000;
    for (int i = 0; i < n; ++i)
    {
        const auto pat = sample_ppp(lambda, w, rng);
        const auto d = apply_shadowing(pat, Point{}, sp, alpha, rng);
        nearest.push_back(*std::min_element(d.begin(), d.end()));
    }
    const double pi = std::numbers::pi;
    const double ks = ks_statistic(nearest, [&](double r) { return 1.0 - std::exp(-pi * lam_eff * r * r); });
    CHECK(ks < 1.63 / std::sqrt(n)); // 1% critical value
    // the unshadowed density is rejected
    const double ks_raw = ks_statistic(nearest, [&](double r) { return 1.0 - std::exp(-pi * lambda * r * r); });
    CHECK(ks_raw > 1.63 / std::sqrt(n));
}

TEST_CASE("association pair frequencies in spatial draws match the closed form within 3 sigma", "[point_process]")
{
    const ScenarioConfig cfg;
    const auto model = cfg.model();
    const TwoTierGeometry geo(model);
    const auto weights = tier_weights(model);
    const double w = 2500.0;
    const int n = 20000;
    std::array<std::array<int, 2>, 2> hits{};
    for (int i = 0; i < n; ++i)
    {
        Rng rng = make_stream(21, static_cast<std::uint64_t>(i));
        std::vector<BsDistance> bs;
        for (std::size_t k = 0; k < 2; ++k)
        {
            const auto pat = sample_ppp(model.tiers[k].density, w, rng, k);
            const auto d = apply_shadowing(pat, Point{}, model.shadowing, model.alpha(), rng);
            for (std::size_t q = 0; q < d.size(); ++q)
                bs.push_back({d[q], k, bs.size()});
        }
        const auto g = link_geometry(bs, weights, model.alpha());
        ++hits[g.serving_tier][g.interfered_tier];
    }
    double total = 0.0;
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t m = 0; m < 2; ++m)
        {
            const double p = geo.prob_assoc_pair(j, m);
            total += p;
            const double sd = std::sqrt(p * (1.0 - p) / n);
            INFO("pair (" << j << "," << m << ") p = " << p);
            CHECK_THAT(hits[j][m] / double(n), WithinAbs(p, 3.0 * sd));
        }
    CHECK_THAT(total, WithinAbs(1.0, 1e-14));
}

TEST_CASE("typical-geometry sampler reproduces the pair probabilities", "[point_process]")
{
    const auto model = ScenarioConfig{}.model();
    const TwoTierGeometry geo(model);
    Rng rng = make_stream(3, 0);
    const int n = 200000;
    std::array<std::array<int, 2>, 2> hits{};
    for (int i = 0; i < n; ++i)
    {
        const auto g = sample_typical_geometry(model, rng);
        REQUIRE(g.u > 0.0);
        ++hits[g.serving_tier][g.interfered_tier];
    }
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t m = 0; m < 2; ++m)
        {
            const double p = geo.prob_assoc_pair(j, m);
            CHECK_THAT(hits[j][m] / double(n), WithinAbs(p, 3.0 * std::sqrt(p * (1.0 - p) / n)));
        }
}

TEST_CASE("weighted association and most-interfered BS", "[point_process]")
{
    // tier 0 has weight 8 (factor 2 in distance at alpha = 3)
    const std::vector<BsDistance> bs{{150.0, 0, 0}, {100.0, 1, 1}, {120.0, 1, 2}};
    const std::vector<double> wts{8.0, 1.0};
    const auto a = associate(bs, wts, 3.0);
    CHECK(a.serving_index == 0);
    CHECK(a.interfered_index == 1);
    CHECK(a.geom.r == 150.0);
    CHECK(a.geom.u == 100.0);
    CHECK(a.geom.serving_tier == 0);
    CHECK(a.geom.interfered_tier == 1);
    const auto b = associate(bs, std::vector<double>{1.0, 1.0}, 3.0);
    CHECK(b.serving_index == 1);
    CHECK(b.geom.u == 120.0);
    CHECK_THROWS(associate(std::span<const BsDistance>(bs.data(), 1), wts, 3.0));
}

TEST_CASE("bucket grid rings cover every point exactly once", "[point_process]")
{
    Rng rng = make_stream(8, 0);
    const auto pat = sample_ppp(6e-6, 3000.0, rng);
    const BsGrid grid(pat.points, 3000.0, 400.0);
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{-2990.0, 2990.0}, std::pair{1234.0, -567.0}})
    {
        std::vector<int> count(pat.points.size(), 0);
        for (int k = 0; grid.visit_ring(x, y, k, [&](std::size_t i) { ++count[i]; }); ++k)
        {
        }
        CHECK(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
    }
}

TEST_CASE("pattern CSV schema", "[point_process]")
{
    PointPattern p;
    p.points = {{1.5, -2.0, 0}, {3.0, 4.0, 1}};
    const std::vector<TruncationState> st{TruncationState::by_i0, TruncationState::untruncated};
    std::ostringstream os;
    write_pattern_csv(os, p, st);
    CHECK(os.str() == "x_m,y_m,tier,truncation_state\n1.5,-2,0,by_i0\n3,4,1,untruncated\n");
}
