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

#include "iafpc/experiment.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace iafpc;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string slurp(std::string const &path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir(std::string const &tag)
{
    const auto p = fs::temp_directory_path() / ("iafpc_test_" + tag);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("value lists and ranges", "[experiment]")
{
    const auto v = detail::expand_values("-120:10:-60", "values", 1);
    REQUIRE(v.size() == 7);
    CHECK(v.front() == "-120");
    CHECK(v.back() == "-60");
    const auto e = detail::expand_values("0:0.1:1", "values", 1);
    REQUIRE(e.size() == 11);
    CHECK(e[3] == "0.3");
    const auto s = detail::expand_values("inf, 5", "values", 1);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == "inf");
    CHECK(detail::parse_reals("1, 2.5", "x", 1) == std::vector<double>{1.0, 2.5});
    CHECK_THROWS_AS(detail::expand_values("1:0:3", "values", 4), ConfigError);
}

TEST_CASE("experiment parsing errors name the accepted values", "[experiment]")
{
    try
    {
        parse_experiment_string("name = x\npipelines = analytic_magic\noutputs = ccdf_sinr\n");
        FAIL("no throw");
    }
    catch (ConfigError const &e)
    {
        CHECK(e.line() == 2);
        CHECK_THAT(std::string(e.what()), ContainsSubstring("analytic_sigmoid"));
    }
    CHECK_THROWS_AS(parse_experiment_string("name = x\npipelines = analytic_exact\noutputs = ccdf_sinr\nsweep = nope\nvalues = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_string("name = x\npipelines = analytic_sigmoid\noutputs = avg_power_dbm\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_string("name = x\npipelines = analytic_exact\noutputs = pattern\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_string("name = x\npipelines = analytic_exact\noutputs = ccdf_sinr\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_string("name = x\npipelines = analytic_exact\noutputs = ccdf_sinr\nset.bogus = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_string("pipelines = analytic_exact\noutputs = ccdf_sinr\n"), ConfigError);
}

TEST_CASE("shipped recipes parse", "[experiment]")
{
    std::size_t n = 0;
    for (auto const &entry : fs::directory_iterator(IAFPC_RECIPE_DIR))
    {
        if (entry.path().extension() != ".recipe")
            continue;
        ++n;
        const auto spec = load_experiment(entry.path().string());
        CHECK(spec.name == entry.path().stem().string());
        CHECK(!spec.description.empty());
    }
    CHECK(n >= 9);
}

TEST_CASE("analytic recipe output is reproducible byte for byte", "[experiment]")
{
    const auto spec = parse_experiment_string("name = t\ndescription = d\npipelines = analytic_exact, asymptotic_non_ia\n"
                                              "outputs = avg_power_dbm, mean_interference_w\nsweep = i0_dbm\n"
                                              "values = -120, -90\n");
    const ScenarioConfig base;
    const auto d1 = scratch_dir("a1"), d2 = scratch_dir("a2");
    RunOptions opt;
    opt.seed = 5;
    const auto p1 = run_experiment(spec, base, d1.string(), opt);
    opt.threads = 2;
    const auto p2 = run_experiment(spec, base, d2.string(), opt);
    REQUIRE(p1.size() == 2);
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(slurp(p1[i]) == slurp(p2[i]));
    const auto text = slurp((d1 / "t_avg_power_dbm.csv").string());
    CHECK(text.rfind("pipeline,i0_dbm,metric,value,ci95,n,seed\n", 0) == 0);
    CHECK_THAT(text, ContainsSubstring("analytic_exact,-90,avg_power_dbm,"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("simulation recipe output is reproducible", "[experiment]")
{
    const auto spec = parse_experiment_string("name = s\npipelines = sim_actual, sim_thinned\noutputs = ccdf_sinr, mean_se_bps_hz\n"
                                              "gamma_db = 0, 10\nset.i0_dbm = -90\nset.window_half_m = 1500\n");
    const ScenarioConfig base;
    RunOptions opt;
    opt.realizations = 3;
    const auto d1 = scratch_dir("s1"), d2 = scratch_dir("s2");
    const auto p1 = run_experiment(spec, base, d1.string(), opt);
    const auto p2 = run_experiment(spec, base, d2.string(), opt);
    REQUIRE(p1.size() == 2);
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(slurp(p1[i]) == slurp(p2[i]));
    CHECK_THAT(slurp((d1 / "s_ccdf_sinr.csv").string()), ContainsSubstring("sim_thinned,10,ccdf_sinr,"));
    opt.seed = 2;
    const auto d3 = scratch_dir("s3");
    const auto p3 = run_experiment(spec, base, d3.string(), opt);
    CHECK(slurp(p1[0]) != slurp(p3[0]));
    for (auto const &d : {d1, d2, d3})
        fs::remove_all(d);
}

TEST_CASE("pattern output", "[experiment]")
{
    const auto spec = parse_experiment_string("name = p\npipelines = sim_actual\noutputs = pattern\n"
                                              "sweep = i0_dbm\nvalues = -90, -60\nset.window_half_m = 1000\n");
    const auto d = scratch_dir("p");
    const auto paths = run_experiment(spec, ScenarioConfig{}, d.string(), RunOptions{});
    REQUIRE(paths.size() == 4);
    CHECK(fs::exists(d / "p_pattern_0_bs.csv"));
    CHECK(fs::exists(d / "p_pattern_1_mt.csv"));
    fs::remove_all(d);
}

TEST_CASE("validate echo", "[experiment]")
{
    const auto cfg = load_config(std::string(IAFPC_CONFIG_DIR) + "/table1.cfg");
    const auto text = validate_config(cfg);
    CHECK_THAT(text, ContainsSubstring("alpha = 3.84\n"));
    CHECK_THAT(text, ContainsSubstring("tau = 2.6292"));
    CHECK_THAT(text, ContainsSubstring("noise_power_dbm = -95.457"));
    CHECK_THAT(text, ContainsSubstring("displacement_factor = 0.89955609"));
    CHECK_THAT(text, ContainsSubstring("regime = iafpc"));
    ScenarioConfig small;
    small.window_half_m = 300.0;
    CHECK_THAT(validate_config(small), ContainsSubstring("warning: window_half_m"));
}
