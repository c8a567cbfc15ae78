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

#ifndef IAFPC_EXPERIMENT_HPP
#define IAFPC_EXPERIMENT_HPP

#include "analytic_core.hpp"
#include "asymptotics.hpp"
#include "config.hpp"
#include "interference_approx.hpp"
#include "montecarlo.hpp"
#include "sinr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace iafpc {

enum class Pipeline
{
    analytic_exact,
    analytic_sigmoid,
    analytic_tda_exp,
    analytic_tda_alg,
    asymptotic_non_ia,
    asymptotic_low_i0,
    sim_actual,
    sim_thinned
};

enum class Metric
{
    avg_power,
    mean_interference,
    var_interference,
    laplace,
    ccdf_sinr,
    mean_se,
    pattern
};

namespace detail {

template <class E, std::size_t N>
std::string joined_names(std::array<std::pair<E, char const *>, N> const &table)
{
    std::string s;
    for (auto const &[e, n] : table)
        s += (s.empty() ? "" : ", ") + std::string(n);
    return s;
}

inline constexpr std::array<std::pair<Pipeline, char const *>, 8> kPipelineNames{{
    {Pipeline::analytic_exact, "analytic_exact"},
    {Pipeline::analytic_sigmoid, "analytic_sigmoid"},
    {Pipeline::analytic_tda_exp, "analytic_tda_exp"},
    {Pipeline::analytic_tda_alg, "analytic_tda_alg"},
    {Pipeline::asymptotic_non_ia, "asymptotic_non_ia"},
    {Pipeline::asymptotic_low_i0, "asymptotic_low_i0"},
    {Pipeline::sim_actual, "sim_actual"},
    {Pipeline::sim_thinned, "sim_thinned"},
}};

inline constexpr std::array<std::pair<Metric, char const *>, 7> kMetricNames{{
    {Metric::avg_power, "avg_power_dbm"},
    {Metric::mean_interference, "mean_interference_w"},
    {Metric::var_interference, "var_interference_w2"},
    {Metric::laplace, "laplace"},
    {Metric::ccdf_sinr, "ccdf_sinr"},
    {Metric::mean_se, "mean_se_bps_hz"},
    {Metric::pattern, "pattern"},
}};

/// Splits on commas and whitespace; empty fields are dropped.
inline std::vector<std::string> split_list(std::string const &text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text)
    {
        if (c == ',' || c == ' ' || c == '\t')
        {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

/// Expands `a:step:b` ranges (inclusive, tolerant to rounding) and plain entries.
inline std::vector<std::string> expand_values(std::string const &text, std::string const &key, int line)
{
    std::vector<std::string> out;
    for (auto const &item : split_list(text))
    {
        const auto c1 = item.find(':');
        if (c1 == std::string::npos)
        {
            out.push_back(item);
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw ConfigError("'" + key + "': range must read start:step:stop, got '" + item + "'", line);
        const double a = parse_real(item.substr(0, c1), key, line);
        const double step = parse_real(item.substr(c1 + 1, c2 - c1 - 1), key, line);
        const double b = parse_real(item.substr(c2 + 1), key, line);
        if (!(step != 0.0) || !std::isfinite(a) || !std::isfinite(b) || (b - a) / step < 0.0)
            throw ConfigError("'" + key + "': empty or unbounded range '" + item + "'", line);
        const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= n; ++i)
        {
            char buf[64];
            double v = a + static_cast<double>(i) * step;
            if (std::abs(v) < 1e-12 * std::max(std::abs(a), std::abs(b)))
                v = 0.0;
            std::snprintf(buf, sizeof buf, "%.10g", v);
            out.emplace_back(buf);
        }
    }
    return out;
}

inline std::vector<double> parse_reals(std::string const &text, std::string const &key, int line)
{
    std::vector<double> out;
    for (auto const &v : expand_values(text, key, line))
        out.push_back(parse_real(v, key, line));
    return out;
}

inline std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

inline std::string_view to_string(Pipeline p)
{
    for (auto const &[e, n] : detail::kPipelineNames)
        if (e == p)
            return n;
    return "unknown";
}

inline std::string_view to_string(Metric m)
{
    for (auto const &[e, n] : detail::kMetricNames)
        if (e == m)
            return n;
    return "unknown";
}

inline Pipeline parse_pipeline(std::string const &name, int line = 0)
{
    for (auto const &[e, n] : detail::kPipelineNames)
        if (name == n)
            return e;
    throw ConfigError("unknown pipeline '" + name + "'; accepted: " + detail::joined_names(detail::kPipelineNames),
                      line);
}

inline Metric parse_metric(std::string const &name, int line = 0)
{
    for (auto const &[e, n] : detail::kMetricNames)
        if (name == n)
            return e;
    throw ConfigError("unknown output '" + name + "'; accepted: " + detail::joined_names(detail::kMetricNames), line);
}

inline bool is_simulation(Pipeline p) { return p == Pipeline::sim_actual || p == Pipeline::sim_thinned; }

/// Whether `pipeline` can produce `metric`.
inline bool supports(Pipeline p, Metric m)
{
    switch (m)
    {
    case Metric::avg_power:
    case Metric::mean_interference:
    case Metric::var_interference:
        return p == Pipeline::analytic_exact || p == Pipeline::asymptotic_non_ia || p == Pipeline::asymptotic_low_i0 ||
               is_simulation(p);
    case Metric::laplace:
    case Metric::ccdf_sinr:
    case Metric::mean_se: return true;
    case Metric::pattern: return p == Pipeline::sim_actual;
    }
    return false;
}

/**
 * One experiment: every pipeline evaluated on the grid (series x sweep), with
 * fixed configuration overrides, producing one CSV per output metric.
 */
struct ExperimentSpec
{
    std::string name;
    std::string description;
    std::vector<Pipeline> pipelines;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    std::string series_key;
    std::vector<std::string> series_values;
    std::vector<Metric> outputs;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<double> gamma_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::vector<double> s_db = detail::parse_reals("40:10:220", "s_db", 0);
    std::size_t laplace_tier = 0;
    std::size_t realizations = 10000;

    void validate() const
    {
        if (name.empty())
            throw ConfigError("experiment: missing 'name'");
        for (char c : name)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
                throw ConfigError("experiment: name may contain only letters, digits, '_' and '-'");
        if (pipelines.empty())
            throw ConfigError("experiment: missing 'pipelines'");
        if (outputs.empty())
            throw ConfigError("experiment: missing 'outputs'");
        for (auto const *k : {&sweep_key, &series_key})
            if (!k->empty() && !ScenarioConfig::is_key(*k))
                throw ConfigError("experiment: unknown sweep key '" + *k + "'; accepted keys: " +
                                  ScenarioConfig::accepted_keys());
        if (!sweep_key.empty() && sweep_values.empty())
            throw ConfigError("experiment: sweep '" + sweep_key + "' has no values");
        if (!series_key.empty() && series_values.empty())
            throw ConfigError("experiment: series '" + series_key + "' has no values");
        if (!sweep_key.empty() && sweep_key == series_key)
            throw ConfigError("experiment: sweep and series keys must differ");
        for (auto const &[k, v] : overrides)
            if (!ScenarioConfig::is_key(k))
                throw ConfigError("experiment: unknown override key '" + k + "'; accepted keys: " +
                                  ScenarioConfig::accepted_keys());
        if (laplace_tier > 1)
            throw ConfigError("experiment: laplace_tier must be 0 or 1");
        if (realizations < 1)
            throw ConfigError("experiment: realizations must be >= 1");
        for (Pipeline p : pipelines)
            for (Metric m : outputs)
                if (!supports(p, m))
                    throw ConfigError("experiment: pipeline " + std::string(to_string(p)) + " cannot produce " +
                                      std::string(to_string(m)));
        for (double g : gamma_db)
            if (!std::isfinite(g))
                throw ConfigError("experiment: gamma_db entries must be finite");
        for (double s : s_db)
            if (!std::isfinite(s))
                throw ConfigError("experiment: s_db entries must be finite");
    }

    static std::string accepted_keys()
    {
        return "name, description, pipelines, outputs, sweep, values, series, series_values, gamma_db, s_db, "
               "laplace_tier, realizations, set.<config key>";
    }
};

inline ExperimentSpec parse_experiment(std::istream &in)
{
    ExperimentSpec spec;
    for (auto const &[kv, line] : detail::read_key_values(in))
    {
        auto const &[key, value] = kv;
        if (key == "name")
            spec.name = value;
        else if (key == "description")
            spec.description = value;
        else if (key == "pipelines")
            for (auto const &p : detail::split_list(value))
                spec.pipelines.push_back(parse_pipeline(p, line));
        else if (key == "outputs")
            for (auto const &m : detail::split_list(value))
                spec.outputs.push_back(parse_metric(m, line));
        else if (key == "sweep")
            spec.sweep_key = value;
        else if (key == "values")
            spec.sweep_values = detail::expand_values(value, key, line);
        else if (key == "series")
            spec.series_key = value;
        else if (key == "series_values")
            spec.series_values = detail::expand_values(value, key, line);
        else if (key == "gamma_db")
            spec.gamma_db = detail::parse_reals(value, key, line);
        else if (key == "s_db")
            spec.s_db = detail::parse_reals(value, key, line);
        else if (key == "laplace_tier")
            spec.laplace_tier = static_cast<std::size_t>(detail::parse_real(value, key, line));
        else if (key == "realizations")
        {
            const double r = detail::parse_real(value, key, line);
            if (!(r >= 1.0) || r != std::floor(r) || !std::isfinite(r))
                throw ConfigError("'realizations' must be a positive integer", line);
            spec.realizations = static_cast<std::size_t>(r);
        }
        else if (key.rfind("set.", 0) == 0)
        {
            const std::string k = key.substr(4);
            if (!ScenarioConfig::is_key(k))
                throw ConfigError("unknown override key '" + k + "'; accepted keys: " + ScenarioConfig::accepted_keys(),
                                  line);
            spec.overrides.emplace_back(k, value);
        }
        else
            throw ConfigError("unknown experiment key '" + key + "'; accepted keys: " + ExperimentSpec::accepted_keys(),
                              line);
    }
    spec.validate();
    return spec;
}

inline ExperimentSpec parse_experiment_string(std::string const &text)
{
    std::istringstream in(text);
    return parse_experiment(in);
}

inline ExperimentSpec load_experiment(std::string const &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open experiment file '" + path + "'");
    return parse_experiment(in);
}

/// One output row; `x` is the curve abscissa for laplace (s in dB) and ccdf_sinr (gamma in dB).
struct ResultRow
{
    Metric metric = Metric::avg_power;
    std::optional<double> x;
    double value = 0.0;
    std::optional<double> ci95;
    std::size_t n = 0;
};

struct RunOptions
{
    std::uint64_t seed = 1;
    std::optional<std::size_t> realizations; ///< overrides the recipe value
    unsigned threads = 1;
    double rel_tol = 1e-6;
};

namespace detail {

inline std::vector<double> db_grid_to_linear(std::vector<double> const &db)
{
    std::vector<double> out;
    for (double g : db)
        out.push_back(db_to_linear(g));
    return out;
}

inline double mean_se_two_fold_non_ia(PowerPolicy const &policy, NetworkModel const &model, double rel_tol)
{
    return se_stats(
               {},
               [&](double g) {
                   const double grid[1] = {g};
                   return ccdf_sinr_non_ia(grid, policy, model, rel_tol / 10.0).values[0];
               },
               rel_tol * 10.0)
        .mean_se;
}

inline std::optional<LaplaceImpl> laplace_impl_of(Pipeline p)
{
    switch (p)
    {
    case Pipeline::analytic_exact: return LaplaceImpl::exact;
    case Pipeline::analytic_sigmoid: return LaplaceImpl::sigmoid;
    case Pipeline::analytic_tda_exp: return LaplaceImpl::tda_exp;
    case Pipeline::analytic_tda_alg: return LaplaceImpl::tda_alg;
    default: return std::nullopt;
    }
}

/// Analytic and asymptotic pipelines at one grid point.
inline std::vector<ResultRow> evaluate_analytic(Pipeline p, ExperimentSpec const &spec, ScenarioConfig const &cfg,
                                                RunOptions const &opt)
{
    const NetworkModel model = cfg.model();
    PowerPolicy policy = cfg.policy();
    if (p == Pipeline::asymptotic_non_ia)
        policy = with_regime(policy, Regime::non_ia);
    else if (p == Pipeline::asymptotic_low_i0)
    {
        if (!std::isfinite(policy.i0))
            throw ConfigError("asymptotic_low_i0 needs a finite i0_dbm");
        policy = with_regime(policy, Regime::low_i0);
    }
    const bool equal_weights = model.tiers[0].assoc_weight == model.tiers[1].assoc_weight;
    const auto gamma = db_grid_to_linear(spec.gamma_db);
    const std::size_t tier = spec.laplace_tier;

    std::optional<LaplaceProvider> lap;
    auto provider = [&]() -> LaplaceProvider const & {
        if (!lap)
            lap.emplace(laplace_impl_of(p).value_or(LaplaceImpl::exact), policy, model);
        return *lap;
    };

    std::vector<ResultRow> rows;
    std::optional<InterferenceMoments> mom;
    for (Metric m : spec.outputs)
    {
        switch (m)
        {
        case Metric::avg_power:
        {
            const double w = p == Pipeline::asymptotic_low_i0 ? avg_tx_power_low_i0(policy, model)
                                                               : avg_tx_power(policy, model);
            rows.push_back({m, std::nullopt, watt_to_dbm(w), std::nullopt, 0});
            break;
        }
        case Metric::mean_interference:
        case Metric::var_interference:
            if (!mom)
                mom = interference_moments(policy, model);
            rows.push_back({m, std::nullopt, m == Metric::mean_interference ? mom->mean : mom->variance, std::nullopt, 0});
            break;
        case Metric::laplace:
            for (double sdb : spec.s_db)
            {
                const double s = db_to_linear(sdb);
                double v;
                if (laplace_impl_of(p) && p != Pipeline::analytic_exact)
                    v = provider()(tier, s);
                else
                    v = std::exp(beta_j(tier, s, policy, model));
                rows.push_back({m, sdb, v, std::nullopt, 0});
            }
            break;
        case Metric::ccdf_sinr:
        {
            DistributionCurve c;
            if (p == Pipeline::asymptotic_non_ia)
                c = ccdf_sinr_non_ia(gamma, policy, model, opt.rel_tol);
            else if (p == Pipeline::asymptotic_low_i0 && equal_weights)
                c = ccdf_sinr_low_i0_minpl(gamma, policy, model);
            else
                c = ccdf_sinr(gamma, policy, model, provider(), opt.rel_tol);
            if (!c.is_valid(1e-6))
                throw NumericError("ccdf_sinr: curve outside [0, 1] or increasing");
            for (std::size_t i = 0; i < gamma.size(); ++i)
                rows.push_back({m, spec.gamma_db[i], c.values[i], std::nullopt, 0});
            break;
        }
        case Metric::mean_se:
        {
            double v;
            if (p == Pipeline::asymptotic_non_ia)
                v = mean_se_two_fold_non_ia(policy, model, 1e-5);
            else if (p == Pipeline::asymptotic_low_i0 && equal_weights)
                v = se_stats(
                        {},
                        [&](double g) {
                            const double grid[1] = {g};
                            return ccdf_sinr_low_i0_minpl(grid, policy, model, 1e-7).values[0];
                        },
                        1e-5)
                        .mean_se;
            else
                v = se_stats({}, policy, model, provider()).mean_se;
            rows.push_back({m, std::nullopt, v, std::nullopt, 0});
            break;
        }
        case Metric::pattern: break;
        }
    }
    return rows;
}

inline SimConfig sim_config(Pipeline p, ScenarioConfig const &cfg, std::size_t realizations, std::uint64_t seed)
{
    SimConfig sc;
    sc.realizations = realizations;
    sc.window_half = cfg.window_half_m;
    sc.master_seed = seed;
    sc.interferer_model = p == Pipeline::sim_actual ? InterfererModel::actual : InterfererModel::thinned;
    sc.policy = cfg.policy();
    sc.model = cfg.model();
    return sc;
}

/// Simulation pipelines at one grid point; one run feeds every metric.
inline std::vector<ResultRow> evaluate_simulation(Pipeline p, ExperimentSpec const &spec, ScenarioConfig const &cfg,
                                                  RunOptions const &opt)
{
    const std::size_t n = opt.realizations.value_or(spec.realizations);
    const SimConfig sc = sim_config(p, cfg, n, opt.seed);
    std::vector<double> s_lin = db_grid_to_linear(spec.s_db);
    const SimSummary sum = run_simulation(sc, db_grid_to_linear(spec.gamma_db), s_lin);
    if (sum.edge_warnings() > 0)
        std::fprintf(stderr, "warning: %s: probe BS within w/2 of the window edge in %zu of %zu realizations\n",
                     std::string(to_string(p)).c_str(), sum.edge_warnings(), sum.count());
    std::vector<ResultRow> rows;
    auto scalar = [&](Metric m, MetricEstimate e, bool dbm = false) {
        if (dbm)
        {
            const double v = watt_to_dbm(e.mean);
            const double ci = e.mean > 0.0 ? 10.0 * std::log10((e.mean + e.ci_halfwidth_95) / e.mean) : 0.0;
            rows.push_back({m, std::nullopt, v, ci, e.n});
        }
        else
            rows.push_back({m, std::nullopt, e.mean, e.ci_halfwidth_95, e.n});
    };
    for (Metric m : spec.outputs)
    {
        switch (m)
        {
        case Metric::avg_power: scalar(m, sum.avg_power(), true); break;
        case Metric::mean_interference: scalar(m, sum.mean_interference()); break;
        case Metric::var_interference: scalar(m, sum.var_interference()); break;
        case Metric::mean_se: scalar(m, sum.mean_se()); break;
        case Metric::laplace:
        {
            const auto l = sum.laplace(spec.laplace_tier);
            for (std::size_t i = 0; i < l.size(); ++i)
                rows.push_back({m, spec.s_db[i], l[i].mean, l[i].ci_halfwidth_95, l[i].n});
            break;
        }
        case Metric::ccdf_sinr:
        {
            const auto c = sum.ccdf_sinr();
            for (std::size_t i = 0; i < c.size(); ++i)
                rows.push_back({m, spec.gamma_db[i], c[i].mean, c[i].ci_halfwidth_95, c[i].n});
            break;
        }
        case Metric::pattern: break;
        }
    }
    return rows;
}

} // namespace detail

/// Result of one pipeline at one (series, sweep) grid point.
struct PointResult
{
    Pipeline pipeline = Pipeline::analytic_exact;
    std::string series_value;
    std::string sweep_value;
    std::vector<ResultRow> rows;
};

/// Applies the recipe overrides and the grid point to a base configuration.
inline ScenarioConfig point_config(ScenarioConfig cfg, ExperimentSpec const &spec, std::string const &series_value,
                                   std::string const &sweep_value)
{
    for (auto const &[k, v] : spec.overrides)
        cfg.set(k, v);
    if (!spec.series_key.empty())
        cfg.set(spec.series_key, series_value);
    if (!spec.sweep_key.empty())
        cfg.set(spec.sweep_key, sweep_value);
    cfg.check();
    return cfg;
}

/// Evaluates every (pipeline, series, sweep) point; points run on up to `opt.threads` threads.
inline std::vector<PointResult> evaluate_experiment(ExperimentSpec const &spec, ScenarioConfig const &base,
                                                    RunOptions const &opt)
{
    spec.validate();
    const std::vector<std::string> series = spec.series_key.empty() ? std::vector<std::string>{""} : spec.series_values;
    const std::vector<std::string> sweep = spec.sweep_key.empty() ? std::vector<std::string>{""} : spec.sweep_values;
    std::vector<PointResult> jobs;
    for (Pipeline p : spec.pipelines)
        for (auto const &sv : series)
            for (auto const &wv : sweep)
                jobs.push_back({p, sv, wv, {}});
    for (auto &j : jobs)
        point_config(base, spec, j.series_value, j.sweep_value);

    auto run = [&](PointResult &j) {
        const ScenarioConfig cfg = point_config(base, spec, j.series_value, j.sweep_value);
        j.rows = is_simulation(j.pipeline) ? detail::evaluate_simulation(j.pipeline, spec, cfg, opt)
                                           : detail::evaluate_analytic(j.pipeline, spec, cfg, opt);
    };
    const unsigned threads = std::max(1u, opt.threads);
    if (threads == 1)
    {
        for (auto &j : jobs)
            run(j);
        return jobs;
    }
    std::size_t next = 0;
    while (next < jobs.size())
    {
        std::vector<std::future<void>> batch;
        for (unsigned t = 0; t < threads && next < jobs.size(); ++t, ++next)
            batch.push_back(std::async(std::launch::async, run, std::ref(jobs[next])));
        for (auto &f : batch)
            f.get();
    }
    return jobs;
}

/// Writes one CSV per metric into `out_dir`; returns the written paths.
inline std::vector<std::string> write_experiment_csv(ExperimentSpec const &spec, std::vector<PointResult> const &res,
                                                     std::string const &out_dir, std::uint64_t seed)
{
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    for (Metric m : spec.outputs)
    {
        if (m == Metric::pattern)
            continue;
        const bool curve = m == Metric::laplace || m == Metric::ccdf_sinr;
        const std::string path = (std::filesystem::path(out_dir) / (spec.name + "_" + std::string(to_string(m)) + ".csv")).string();
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot write '" + path + "'");
        os << "pipeline";
        if (!spec.series_key.empty())
            os << ',' << spec.series_key;
        if (!spec.sweep_key.empty())
            os << ',' << spec.sweep_key;
        if (curve)
            os << ',' << (m == Metric::laplace ? "s_db" : "gamma_db");
        os << ",metric,value,ci95,n,seed\n";
        for (auto const &r : res)
            for (auto const &row : r.rows)
            {
                if (row.metric != m)
                    continue;
                os << to_string(r.pipeline);
                if (!spec.series_key.empty())
                    os << ',' << r.series_value;
                if (!spec.sweep_key.empty())
                    os << ',' << r.sweep_value;
                if (curve)
                    os << ',' << detail::fmt(row.x.value_or(0.0));
                os << ',' << to_string(m) << ',' << detail::fmt(row.value) << ',';
                if (row.ci95)
                    os << detail::fmt(*row.ci95);
                os << ',' << row.n << ',' << seed << '\n';
            }
        paths.push_back(path);
    }
    return paths;
}

/// Dumps BS and MT positions with truncation states of one sim_actual realization per grid point.
inline std::vector<std::string> write_patterns(ExperimentSpec const &spec, ScenarioConfig const &base,
                                               std::string const &out_dir, std::uint64_t seed)
{
    std::vector<std::string> paths;
    if (std::find(spec.outputs.begin(), spec.outputs.end(), Metric::pattern) == spec.outputs.end())
        return paths;
    std::filesystem::create_directories(out_dir);
    const std::vector<std::string> series = spec.series_key.empty() ? std::vector<std::string>{""} : spec.series_values;
    const std::vector<std::string> sweep = spec.sweep_key.empty() ? std::vector<std::string>{""} : spec.sweep_values;
    std::size_t point = 0;
    for (auto const &sv : series)
        for (auto const &wv : sweep)
        {
            const ScenarioConfig cfg = point_config(base, spec, sv, wv);
            SimConfig sc = detail::sim_config(Pipeline::sim_actual, cfg, 1, seed);
            sc.record_patterns = true;
            simulate_actual(sc, [&](SimRealization const &r) {
                const std::string stem = spec.name + "_pattern" + (series.size() * sweep.size() > 1 ? "_" + std::to_string(point) : "");
                const auto base_path = std::filesystem::path(out_dir);
                const std::string bs_path = (base_path / (stem + "_bs.csv")).string();
                const std::string mt_path = (base_path / (stem + "_mt.csv")).string();
                std::ofstream bs(bs_path, std::ios::binary), mt(mt_path, std::ios::binary);
                if (!bs || !mt)
                    throw std::runtime_error("cannot write pattern files in '" + out_dir + "'");
                write_pattern_csv(bs, r.bs_pattern);
                write_pattern_csv(mt, r.mt_pattern, r.mt_states);
                paths.push_back(bs_path);
                paths.push_back(mt_path);
            });
            ++point;
        }
    return paths;
}

/// Runs a recipe end to end and writes its CSV files.
inline std::vector<std::string> run_experiment(ExperimentSpec const &spec, ScenarioConfig const &base,
                                               std::string const &out_dir, RunOptions const &opt)
{
    const bool only_pattern =
        std::all_of(spec.outputs.begin(), spec.outputs.end(), [](Metric m) { return m == Metric::pattern; });
    std::vector<std::string> paths;
    if (!only_pattern)
        paths = write_experiment_csv(spec, evaluate_experiment(spec, base, opt), out_dir, opt.seed);
    auto pat = write_patterns(spec, base, out_dir, opt.seed);
    paths.insert(paths.end(), pat.begin(), pat.end());
    return paths;
}

/// Human-readable echo of a configuration with derived quantities and warnings.
inline std::string validate_config(ScenarioConfig const &cfg)
{
    const NetworkModel model = cfg.model();
    const PowerPolicy policy = cfg.policy();
    std::ostringstream os;
    auto line = [&](std::string const &k, std::string const &v) { os << k << " = " << v << '\n'; };
    auto const fmt = detail::fmt;
    line("fc_mhz", fmt(cfg.fc_mhz));
    line("h_bs_m", fmt(cfg.h_bs_m));
    line("bw_mhz", fmt(cfg.bw_mhz));
    line("t1_over_t2_db", fmt(cfg.t1_over_t2_db));
    line("lambda1_per_m2", fmt(cfg.lambda1_per_m2));
    line("lambda2_per_m2", fmt(cfg.lambda2_per_m2));
    line("lambda_mt_per_m2", fmt(cfg.lambda_mt_per_m2));
    line("n_thermal_dbm_hz", fmt(cfg.n_thermal_dbm_hz));
    line("n_f_db", fmt(cfg.n_f_db));
    line("sigma_s_db", fmt(cfg.sigma_s_db));
    line("p0_dbm", fmt(cfg.p0_dbm));
    line("pmax_dbm", fmt(cfg.pmax_dbm));
    line("i0_dbm", fmt(cfg.i0_dbm) + (std::isinf(cfg.i0_dbm) ? " (non-IA)" : ""));
    line("epsilon", fmt(cfg.epsilon));
    line("window_half_m", fmt(cfg.window_half_m));
    line("displacement", cfg.displacement == DisplacementConvention::theorem ? "theorem" : "unsquared_sigma");
    os << "# derived\n";
    line("alpha", fmt(model.alpha()));
    line("tau", fmt(model.tau()));
    line("noise_power_dbm", fmt(watt_to_dbm(model.noise_power)));
    line("displacement_factor", fmt(displacement_factor(model.shadowing, model.alpha(), model.displacement)));
    line("effective_lambda1_per_m2", fmt(model.effective_density(0)));
    line("effective_lambda2_per_m2", fmt(model.effective_density(1)));
    line("regime", policy.regime == Regime::non_ia ? "non_ia" : "iafpc");
    std::vector<std::string> warnings;
    const double lmin = std::min(model.effective_density(0), model.effective_density(1));
    const double need = 5.0 / std::sqrt(std::numbers::pi * lmin);
    if (cfg.window_half_m < need)
        warnings.push_back("window_half_m = " + fmt(cfg.window_half_m) + " is below 5 mean BS distances (" +
                           fmt(need) + " m); edge effects expected");
    if (model.alpha() < 2.5)
        warnings.push_back("path-loss exponent " + fmt(model.alpha()) + " is close to 2; interference integrals converge slowly");
    if (model.mt_density == 0.0)
        warnings.push_back("lambda_mt_per_m2 = 0; simulations have no interferers");
    for (auto const &w : warnings)
        os << "warning: " << w << '\n';
    return os.str();
}

} // namespace iafpc

#endif // IAFPC_EXPERIMENT_HPP
