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

#include "iafpc/asymptotics.hpp"
#include "iafpc/config.hpp"
#include "iafpc/sinr.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace iafpc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScenarioConfig equal_weights(double lambda_total, double i0_dbm)
{
    ScenarioConfig c;
    c.t1_over_t2_db = 0.0;
    c.lambda1_per_m2 = lambda_total / 3.0;
    c.lambda2_per_m2 = 2.0 * lambda_total / 3.0;
    c.i0_dbm = i0_dbm;
    return c;
}

} // namespace

TEST_CASE("low-i0 Laplace transform under equal weights does not depend on the BS density", "[asymptotics]")
{
    const double i0 = dbm_to_watt(-120.0);
    for (double lambda : {2e-6, 2e-5})
    {
        const auto cfg = equal_weights(lambda, -120.0);
        const auto model = cfg.model();
        const auto pol = cfg.policy();
        for (double x : {0.01, 0.3, 1.0, 5.0, 40.0})
        {
            const double s = x / i0;
            const double closed = laplace_low_i0_minpl(s, i0, model.alpha());
            for (std::size_t j = 0; j < 2; ++j)
            {
                INFO("lambda = " << lambda << " s i0 = " << x << " tier " << j);
                CHECK_THAT(laplace_low_i0(j, s, pol, model, 1e-10), WithinAbs(closed, 1e-6));
            }
        }
    }
    CHECK(laplace_low_i0_minpl(0.0, i0, 3.84) == 1.0);
    // alpha = 4: 2F1(1, 1/2; 3/2; -x) = arctan(sqrt x)/sqrt x
    const double x = 2.5;
    CHECK_THAT(laplace_low_i0_minpl(x, 1.0, 4.0), WithinRel(std::exp(-2.0 * std::sqrt(x) * std::atan(std::sqrt(x))), 1e-12));
}

TEST_CASE("noise-free low-i0 SINR ccdf is the same for every i0 and density", "[asymptotics]")
{
    const std::vector<double> gamma{db_to_linear(-10.0), 1.0, db_to_linear(10.0), db_to_linear(25.0)};
    std::vector<double> ref;
    for (double lambda : {2e-6, 2e-5})
        for (double i0 : {-120.0, -90.0})
        {
            const auto cfg = equal_weights(lambda, i0);
            auto model = cfg.model();
            model.noise_power = 0.0;
            const auto c = ccdf_sinr_low_i0_minpl(gamma, cfg.policy(), model);
            REQUIRE(c.is_valid());
            if (ref.empty())
                ref = c.values;
            for (std::size_t i = 0; i < gamma.size(); ++i)
                CHECK_THAT(c.values[i], WithinAbs(ref[i], 1e-6));
        }
}

TEST_CASE("low-i0 power: closed form against quadrature and against full IAFPC", "[asymptotics]")
{
    const auto eq = equal_weights(6e-6, -120.0);
    const auto m = eq.model();
    const auto p = eq.policy();
    CHECK_THAT(avg_tx_power_low_i0(p, m), WithinRel(avg_tx_power(with_regime(p, Regime::low_i0), m, 1e-10), 1e-7));

    const ScenarioConfig base;
    for (double i0 : {-120.0, -60.0})
    {
        auto cfg = base;
        cfg.i0_dbm = i0;
        const double full = avg_tx_power(cfg.policy(), cfg.model());
        const double low = avg_tx_power_low_i0(cfg.policy(), cfg.model());
        INFO("i0 = " << i0 << " full " << watt_to_dbm(full) << " low " << watt_to_dbm(low));
        if (i0 == -120.0)
            CHECK(std::abs(low / full - 1.0) < 0.02);
        else
            CHECK(std::abs(low / full - 1.0) > 0.10);
    }
}

TEST_CASE("IAFPC and non-IA powers coincide for large i0", "[asymptotics]")
{
    ScenarioConfig cfg;
    cfg.i0_dbm = -60.0;
    const double ia = avg_tx_power(cfg.policy(), cfg.model());
    const double non = avg_tx_power_non_ia(cfg.policy(), cfg.model());
    CHECK(std::abs(ia / non - 1.0) < 0.02);
    cfg.i0_dbm = -90.0;
    CHECK(avg_tx_power(cfg.policy(), cfg.model()) < non);
}

TEST_CASE("two-fold non-IA SINR ccdf equals the generic evaluation", "[asymptotics]")
{
    const ScenarioConfig cfg; // i0 = inf
    const auto model = cfg.model();
    const auto pol = cfg.policy();
    const std::vector<double> gamma{db_to_linear(-5.0), db_to_linear(5.0), db_to_linear(15.0)};
    const auto two = ccdf_sinr_non_ia(gamma, pol, model, 1e-7);
    const auto gen = ccdf_sinr(gamma, pol, model, LaplaceImpl::exact, 1e-7);
    REQUIRE(two.is_valid());
    for (std::size_t i = 0; i < gamma.size(); ++i)
        CHECK_THAT(two.values[i], WithinAbs(gen.values[i], 2e-5));
    for (std::size_t j = 0; j < 2; ++j)
        CHECK_THAT(laplace_non_ia(j, 1e11, pol, model), WithinRel(laplace_interference(j, 1e11, pol, model), 1e-12));
}

TEST_CASE("low-i0 moments stay finite", "[asymptotics]")
{
    ScenarioConfig cfg;
    cfg.i0_dbm = -120.0;
    const auto low = interference_moments_low_i0(cfg.policy(), cfg.model());
    const auto full = interference_moments(cfg.policy(), cfg.model());
    CHECK(std::isfinite(low.mean));
    CHECK(low.variance > 0.0);
    CHECK(std::abs(low.mean / full.mean - 1.0) < 0.05);
}
