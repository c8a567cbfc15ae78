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
#include "iafpc/montecarlo.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace iafpc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig small_config(double i0_dbm, InterfererModel im, std::size_t n, double window = 2000.0)
{
    ScenarioConfig sc;
    sc.i0_dbm = i0_dbm;
    SimConfig c;
    c.model = sc.model();
    c.policy = sc.policy();
    c.realizations = n;
    c.window_half = window;
    c.interferer_model = im;
    c.master_seed = 7;
    return c;
}

} // namespace

TEST_CASE("accumulator statistics", "[montecarlo]")
{
    Accumulator c;
    for (int i = 0; i < 100; ++i)
        c.add(3.25);
    CHECK(c.mean() == 3.25);
    CHECK(c.mean_estimate().ci_halfwidth_95 == 0.0);
    CHECK(c.variance_estimate().mean == 0.0);

    std::mt19937_64 rng(3);
    std::bernoulli_distribution b(0.5);
    Accumulator a, lo, hi;
    for (int i = 0; i < 10000; ++i)
    {
        const double x = b(rng) ? 1.0 : 0.0;
        a.add(x);
        (i < 4000 ? lo : hi).add(x);
    }
    CHECK_THAT(a.mean_estimate().ci_halfwidth_95, WithinAbs(0.0098, 1e-4));
    lo.merge(hi);
    CHECK(lo.count() == a.count());
    CHECK_THAT(lo.mean(), WithinRel(a.mean(), 1e-14));
    CHECK_THAT(lo.variance(), WithinRel(a.variance(), 1e-12));

    const auto p = proportion_estimate(5000, 10000);
    CHECK(p.mean == 0.5);
    CHECK_THAT(p.ci_halfwidth_95, WithinAbs(0.0098, 1e-4));
}

TEST_CASE("variance CI of a normal sample", "[montecarlo]")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(0.0, 2.0);
    Accumulator a;
    for (int i = 0; i < 40000; ++i)
        a.add(nd(rng));
    const auto v = a.variance_estimate();
    // var of the sample variance ~ 2 sigma^4 / n
    CHECK_THAT(v.ci_halfwidth_95, WithinRel(1.959964 * std::sqrt(2.0 * 16.0 / 40000.0), 0.05));
    CHECK(std::abs(v.mean - 4.0) < v.ci_halfwidth_95 * 1.5);
}

TEST_CASE("compensated sum", "[montecarlo]")
{
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i)
        s.add(1e-16);
    CHECK_THAT(s.value(), WithinRel(1.0 + 1e-13, 1e-15));
}

TEST_CASE("actual simulator invariants", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::actual, 20);
    std::size_t count = 0, interferers = 0;
    simulate(cfg, [&](SimRealization const &r) {
        ++count;
        CHECK(r.probe_link.r > 0.0);
        CHECK(std::isfinite(r.probe_link.u));
        CHECK(r.probe_sinr > 0.0);
        for (auto const &f : r.interferers)
        {
            ++interferers;
            REQUIRE(f.power * std::pow(cfg.model.pathloss.tau * f.u, -cfg.model.pathloss.alpha) <=
                    cfg.policy.i0 * (1.0 + 1e-12));
            REQUIRE(f.d > 0.0);
        }
    });
    CHECK(count == 20);
    CHECK(interferers > 100);
}

TEST_CASE("no mobiles gives a noise-limited probe", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::actual, 5);
    cfg.model.mt_density = 0.0;
    simulate(cfg, [&](SimRealization const &r) {
        CHECK(r.interference == 0.0);
        CHECK(r.interferers.empty());
        const auto &pl = cfg.model.pathloss;
        const double expect =
            r.probe_fading * r.probe_power * std::pow(pl.tau * r.probe_link.r, -pl.alpha) / cfg.model.noise_power;
        CHECK_THAT(r.probe_sinr, WithinRel(expect, 1e-14));
    });
}

TEST_CASE("thinned interferers respect the cap, and an infinite cap never binds", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::thinned, 10, 1000.0);
    simulate(cfg, [&](SimRealization const &r) {
        for (auto const &f : r.interferers)
            REQUIRE(f.power * std::pow(cfg.model.pathloss.tau * f.d, -cfg.model.pathloss.alpha) < cfg.policy.i0);
    });

    auto inf = small_config(kInf, InterfererModel::thinned, 10, 1000.0);
    auto huge = inf;
    huge.policy.i0 = 1e300;
    huge.policy.regime = Regime::iafpc;
    std::vector<double> a, b;
    simulate(inf, [&](SimRealization const &r) { a.push_back(r.interference); });
    simulate(huge, [&](SimRealization const &r) { b.push_back(r.interference); });
    CHECK(a == b);
}

TEST_CASE("summaries are deterministic and monotone", "[montecarlo]")
{
    const std::vector<double> gamma{0.1, 1.0, 10.0, 100.0};
    const std::vector<double> s{1e10, 1e12};
    for (auto im : {InterfererModel::actual, InterfererModel::thinned})
    {
        auto cfg = small_config(-90.0, im, 30, 1500.0);
        const auto x = run_simulation(cfg, gamma, s);
        const auto y = run_simulation(cfg, gamma, s);
        CHECK(x.mean_interference().mean == y.mean_interference().mean);
        CHECK(x.probe_power().mean == y.probe_power().mean);
        CHECK(x.mean_se().mean == y.mean_se().mean);
        const auto c = x.ccdf_sinr();
        for (std::size_t i = 1; i < c.size(); ++i)
            CHECK(c[i].mean <= c[i - 1].mean);
        const auto l = x.laplace();
        CHECK(l[1].mean <= l[0].mean);
        CHECK(x.laplace(0)[0].n + x.laplace(1)[0].n == x.count());
        cfg.master_seed = 8;
        CHECK(run_simulation(cfg, gamma, s).mean_interference().mean != x.mean_interference().mean);
    }
}

TEST_CASE("probe link helper reproduces the simulator's probe association", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::actual, 6, 1500.0);
    simulate(cfg, [&](SimRealization const &r) {
        const auto g = probe_link_actual(cfg, r.index);
        CHECK(g.r == r.probe_link.r);
        CHECK(g.u == r.probe_link.u);
        CHECK(g.serving_tier == r.probe_link.serving_tier);
        CHECK(g.interfered_tier == r.probe_link.interfered_tier);
    });
}

TEST_CASE("patterns are recorded on request", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::actual, 1, 1000.0);
    cfg.record_patterns = true;
    simulate(cfg, [&](SimRealization const &r) {
        CHECK(!r.bs_pattern.points.empty());
        CHECK(r.mt_pattern.points.size() == r.mt_states.size());
        CHECK(r.network_power_count > 0);
    });
}

TEST_CASE("thinned simulator agrees with the analytic mean interference", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::thinned, 2000, 5000.0);
    const auto sum = run_simulation(cfg);
    const auto m = interference_moments(cfg.policy, cfg.model);
    const auto est = sum.mean_interference();
    INFO("sim " << est.mean << " +- " << est.ci_halfwidth_95 << " analytic " << m.mean);
    CHECK(std::abs(est.mean - m.mean) < 1.5 * est.ci_halfwidth_95 * 1.0);
    const auto p = sum.probe_power();
    const double ap = avg_tx_power(cfg.policy, cfg.model);
    CHECK(std::abs(p.mean - ap) < 1.5 * p.ci_halfwidth_95);
}

TEST_CASE("simulation config validation", "[montecarlo]")
{
    auto cfg = small_config(-90.0, InterfererModel::actual, 1);
    cfg.realizations = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.realizations = 1;
    cfg.inner_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
