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

#ifndef IAFPC_POWER_CONTROL_HPP
#define IAFPC_POWER_CONTROL_HPP

#include "units.hpp"

#include <cmath>
#include <cstddef>
#include <string_view>

namespace iafpc {

enum class TruncationState
{
    untruncated,
    by_i0,
    by_pmax
};

inline std::string_view to_string(TruncationState s)
{
    switch (s)
    {
    case TruncationState::untruncated: return "untruncated";
    case TruncationState::by_i0: return "by_i0";
    case TruncationState::by_pmax: return "by_pmax";
    }
    return "unknown";
}

/// Equivalent distances of a link plus the tiers they belong to.
struct LinkGeometry
{
    double r = 0.0; ///< to the serving BS, m
    double u = kInf; ///< to the most-interfered BS, m
    std::size_t serving_tier = 0;
    std::size_t interfered_tier = 0;
};

struct TxPower
{
    double power = 0.0; ///< W
    TruncationState state = TruncationState::untruncated;
};

/// Open-loop fractional power p0 (tau r)^(alpha eps).
inline double fpc_power(double r, PowerPolicy const &policy, PathlossModel const &pl)
{
    if (policy.epsilon == 0.0)
        return policy.p0;
    return policy.p0 * std::pow(pl.tau * r, pl.alpha * policy.epsilon);
}

/// Interference cap i0 (tau u)^alpha; +inf when i0 or u is infinite.
inline double cap_power(double u, PowerPolicy const &policy, PathlossModel const &pl)
{
    if (std::isinf(policy.i0) || std::isinf(u))
        return kInf;
    return policy.i0 * std::pow(pl.tau * u, pl.alpha);
}

/// IAFPC power min(p0 (tau r)^(alpha eps), i0 (tau u)^alpha, pmax); ties favour untruncated, then by_i0.
inline TxPower p_mt(double r, double u, PowerPolicy const &policy, PathlossModel const &pl)
{
    const double open = fpc_power(r, policy, pl);
    const double cap = cap_power(u, policy, pl);
    TxPower out{open, TruncationState::untruncated};
    if (cap < out.power)
        out = {cap, TruncationState::by_i0};
    if (policy.pmax < out.power)
        out = {policy.pmax, TruncationState::by_pmax};
    return out;
}

inline TxPower p_mt(LinkGeometry const &g, PowerPolicy const &policy, PathlossModel const &pl)
{
    return p_mt(g.r, g.u, policy, pl);
}

/// Power without interference awareness, min(p0 (tau r)^(alpha eps), pmax).
inline TxPower p_mt_non_ia(double r, PowerPolicy const &policy, PathlossModel const &pl)
{
    const double open = fpc_power(r, policy, pl);
    if (policy.pmax < open)
        return {policy.pmax, TruncationState::by_pmax};
    return {open, TruncationState::untruncated};
}

/// Low-i0 power law i0 (tau u)^alpha.
inline double p_mt_low_i0(double u, PowerPolicy const &policy, PathlossModel const &pl)
{
    return policy.i0 * std::pow(pl.tau * u, pl.alpha);
}

/// Power for the regime selected in `policy`.
inline double p_mt_regime(double r, double u, PowerPolicy const &policy, PathlossModel const &pl)
{
    switch (policy.regime)
    {
    case Regime::non_ia: return p_mt_non_ia(r, policy, pl).power;
    case Regime::low_i0: return p_mt_low_i0(u, policy, pl);
    case Regime::iafpc: break;
    }
    return p_mt(r, u, policy, pl).power;
}

} // namespace iafpc

#endif // IAFPC_POWER_CONTROL_HPP
