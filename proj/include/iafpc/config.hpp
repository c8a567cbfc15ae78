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

#ifndef IAFPC_CONFIG_HPP
#define IAFPC_CONFIG_HPP

#include "units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iafpc {

/// Configuration or experiment-spec error; `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string const &msg, int line = 0, std::string key = {})
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line),
          key_(std::move(key)), msg_(msg)
    {
    }
    int line() const { return line_; }
    /// Offending key, when known.
    std::string const &key() const { return key_; }
    /// Message without the line prefix.
    std::string const &message() const { return msg_; }

private:
    int line_;
    std::string key_;
    std::string msg_;
};

namespace detail {

inline std::string trim(std::string const &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Parses a real, accepting inf / +inf / -inf.
inline double parse_real(std::string const &text, std::string const &key, int line)
{
    std::string t = trim(text);
    std::string lower = t;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "+inf" || lower == "infinity")
        return kInf;
    if (lower == "-inf" || lower == "-infinity")
        return -kInf;
    double v = 0.0;
    const char *first = t.data();
    const char *last = t.data() + t.size();
    if (!t.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || t.empty())
        throw ConfigError("value of '" + key + "' is not a number: '" + t + "'", line);
    return v;
}

/// Reads `key = value` lines; '#' starts a comment. Duplicate keys are rejected.
inline std::vector<std::pair<std::pair<std::string, std::string>, int>> read_key_values(std::istream &in)
{
    std::vector<std::pair<std::pair<std::string, std::string>, int>> out;
    std::map<std::string, int> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw))
    {
        ++line;
        const auto hash = raw.find('#');
        std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value', got '" + body + "'", line);
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError("empty key", line);
        if (value.empty())
            throw ConfigError("empty value for key '" + key + "'", line);
        if (auto it = seen.find(key); it != seen.end())
            throw ConfigError("duplicate key '" + key + "' (first seen on line " + std::to_string(it->second) + ")",
                              line);
        seen[key] = line;
        out.push_back({{key, value}, line});
    }
    return out;
}

} // namespace detail

/// Scenario parameters as written in the configuration file (dB / dBm / MHz units).
struct ScenarioConfig
{
    double fc_mhz = 2000.0;
    double h_bs_m = 10.0;
    double bw_mhz = 9.0;
    double t1_over_t2_db = 9.0;
    double lambda1_per_m2 = 2e-6;
    double lambda2_per_m2 = 4e-6;
    double lambda_mt_per_m2 = 80e-6;
    double n_thermal_dbm_hz = -174.0;
    double n_f_db = 9.0;
    double sigma_s_db = 4.0;
    double p0_dbm = -70.0;
    double pmax_dbm = kInf;
    double i0_dbm = kInf;
    double epsilon = 1.0;
    double window_half_m = 5000.0;
    DisplacementConvention displacement = DisplacementConvention::theorem;

    static std::vector<std::string> const &keys()
    {
        static const std::vector<std::string> k{
            "fc_mhz",     "h_bs_m",  "bw_mhz",  "t1_over_t2_db", "lambda1_per_m2", "lambda2_per_m2",
            "lambda_mt_per_m2", "n_thermal_dbm_hz", "n_f_db", "sigma_s_db", "p0_dbm", "pmax_dbm",
            "i0_dbm",     "epsilon", "window_half_m", "displacement"};
        return k;
    }

    static std::string accepted_keys()
    {
        std::string s;
        for (auto const &k : keys())
            s += (s.empty() ? "" : ", ") + k;
        return s;
    }

    static bool is_key(std::string const &key)
    {
        auto const &k = keys();
        return std::find(k.begin(), k.end(), key) != k.end();
    }

    /// Assigns one key from its textual value.
    void set(std::string const &key, std::string const &value, int line = 0)
    {
        if (key == "displacement")
        {
            if (value == "theorem")
                displacement = DisplacementConvention::theorem;
            else if (value == "unsquared_sigma")
                displacement = DisplacementConvention::unsquared_sigma;
            else
                throw ConfigError("displacement must be 'theorem' or 'unsquared_sigma', got '" + value + "'", line);
            return;
        }
        const double v = detail::parse_real(value, key, line);
        set(key, v, line);
    }

    void set(std::string const &key, double v, int line = 0)
    {
        if (key == "fc_mhz") fc_mhz = v;
        else if (key == "h_bs_m") h_bs_m = v;
        else if (key == "bw_mhz") bw_mhz = v;
        else if (key == "t1_over_t2_db") t1_over_t2_db = v;
        else if (key == "lambda1_per_m2") lambda1_per_m2 = v;
        else if (key == "lambda2_per_m2") lambda2_per_m2 = v;
        else if (key == "lambda_mt_per_m2") lambda_mt_per_m2 = v;
        else if (key == "n_thermal_dbm_hz") n_thermal_dbm_hz = v;
        else if (key == "n_f_db") n_f_db = v;
        else if (key == "sigma_s_db") sigma_s_db = v;
        else if (key == "p0_dbm") p0_dbm = v;
        else if (key == "pmax_dbm") pmax_dbm = v;
        else if (key == "i0_dbm") i0_dbm = v;
        else if (key == "epsilon") epsilon = v;
        else if (key == "window_half_m") window_half_m = v;
        else
            throw ConfigError("unknown key '" + key + "'; accepted keys: " + accepted_keys(), line);
    }

    /// Checks ranges; throws ConfigError naming the offending key.
    void check() const
    {
        auto need = [](bool ok, std::string const &key, std::string const &what) {
            if (!ok)
                throw ConfigError("invalid '" + key + "': " + what, 0, key);
        };
        need(std::isfinite(fc_mhz) && fc_mhz > 0.0, "fc_mhz", "must be positive");
        need(std::isfinite(h_bs_m) && h_bs_m > 0.0, "h_bs_m", "must be positive");
        need(40.0 * (1.0 - 4e-3 * h_bs_m) > 20.0, "h_bs_m", "gives path-loss exponent <= 2");
        need(std::isfinite(bw_mhz) && bw_mhz > 0.0, "bw_mhz", "must be positive");
        need(std::isfinite(t1_over_t2_db), "t1_over_t2_db", "must be finite");
        need(std::isfinite(lambda1_per_m2) && lambda1_per_m2 > 0.0, "lambda1_per_m2", "must be positive");
        need(std::isfinite(lambda2_per_m2) && lambda2_per_m2 > 0.0, "lambda2_per_m2", "must be positive");
        need(std::isfinite(lambda_mt_per_m2) && lambda_mt_per_m2 >= 0.0, "lambda_mt_per_m2", "must be >= 0");
        need(std::isfinite(n_thermal_dbm_hz), "n_thermal_dbm_hz", "must be finite");
        need(std::isfinite(n_f_db), "n_f_db", "must be finite");
        need(std::isfinite(sigma_s_db) && sigma_s_db >= 0.0, "sigma_s_db", "must be >= 0");
        need(std::isfinite(p0_dbm), "p0_dbm", "must be finite");
        need(!std::isnan(pmax_dbm) && pmax_dbm > -kInf, "pmax_dbm", "must be finite or inf");
        need(!std::isnan(i0_dbm) && i0_dbm > -kInf, "i0_dbm", "must be finite or inf");
        need(epsilon >= 0.0 && epsilon <= 1.0, "epsilon", "must lie in [0, 1]");
        need(std::isfinite(window_half_m) && window_half_m > 0.0, "window_half_m", "must be positive");
    }

    NetworkModel model() const
    {
        check();
        NetworkModel m;
        const double t1 = db_to_linear(t1_over_t2_db);
        m.tiers = {TierParams{lambda1_per_m2, t1}, TierParams{lambda2_per_m2, 1.0}};
        m.pathloss = pathloss_from_3gpp(h_bs_m, fc_mhz);
        m.shadowing = ShadowingParams{sigma_s_db};
        m.bandwidth = bw_mhz * 1e6;
        m.noise_figure_db = n_f_db;
        m.thermal_density_dbm_hz = n_thermal_dbm_hz;
        m.noise_power = noise_power_w(n_thermal_dbm_hz, m.bandwidth, n_f_db);
        m.mt_density = lambda_mt_per_m2;
        m.displacement = displacement;
        m.validate();
        return m;
    }

    PowerPolicy policy() const
    {
        check();
        PowerPolicy p;
        p.p0 = dbm_to_watt(p0_dbm);
        p.epsilon = epsilon;
        p.i0 = dbm_to_watt(i0_dbm);
        p.pmax = dbm_to_watt(pmax_dbm);
        p.regime = std::isinf(i0_dbm) ? Regime::non_ia : Regime::iafpc;
        p.validate();
        return p;
    }
};

/// Parses a configuration stream; unspecified keys keep the Table I defaults, except
/// pmax_dbm and i0_dbm which default to +inf.
inline ScenarioConfig parse_config(std::istream &in)
{
    ScenarioConfig cfg;
    std::map<std::string, int> lines;
    for (auto const &[kv, line] : detail::read_key_values(in))
    {
        if (!ScenarioConfig::is_key(kv.first))
            throw ConfigError("unknown key '" + kv.first + "'; accepted keys: " + ScenarioConfig::accepted_keys(),
                              line);
        cfg.set(kv.first, kv.second, line);
        lines[kv.first] = line;
    }
    try
    {
        cfg.check();
    }
    catch (ConfigError const &e)
    {
        auto it = lines.find(e.key());
        if (it == lines.end())
            throw;
        throw ConfigError(e.message(), it->second, e.key());
    }
    return cfg;
}

inline ScenarioConfig parse_config_string(std::string const &text)
{
    std::istringstream in(text);
    return parse_config(in);
}

inline ScenarioConfig load_config(std::string const &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

} // namespace iafpc

#endif // IAFPC_CONFIG_HPP
