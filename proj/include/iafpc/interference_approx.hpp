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

#ifndef IAFPC_INTERFERENCE_APPROX_HPP
#define IAFPC_INTERFERENCE_APPROX_HPP

#include "analytic_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iafpc {

/// Logistic model 1 / (1 + exp(b0 (s_dB - s0_dB))) of the Laplace transform on a dB axis.
struct SigmoidFit
{
    double b0 = 0.0;    ///< per dB
    double s0_db = 0.0; ///< dB
    double rms_residual = 0.0;
    double max_residual = 0.0;
    int iterations = 0;

    double at_db(double s_db) const
    {
        const double z = b0 * (s_db - s0_db);
        if (z > 700.0)
            return 0.0;
        return 1.0 / (1.0 + std::exp(z));
    }
};

enum class TdaFamily
{
    exponential,
    algebraic
};

inline std::string_view to_string(TdaFamily f)
{
    return f == TdaFamily::exponential ? "exponential" : "algebraic";
}

/// One-moment transformed-distribution approximation.
struct TdaFit
{
    double theta0 = 0.0; ///< W
    TdaFamily family = TdaFamily::exponential;
};

inline double eval_approx_laplace(SigmoidFit const &fit, double s)
{
    if (!(s > 0.0))
        throw std::invalid_argument("eval_approx_laplace: sigmoid needs s > 0");
    if (std::isinf(s))
        return fit.b0 > 0.0 ? 0.0 : 1.0;
    return fit.at_db(10.0 * std::log10(s));
}

inline double eval_approx_laplace(TdaFit const &fit, double s)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("eval_approx_laplace: TDA needs s >= 0");
    if (fit.family == TdaFamily::exponential)
        return std::exp(-fit.theta0 * s);
    return 1.0 / (1.0 + s * fit.theta0);
}

/// Default sample grid: n equally spaced points in [lo_db, hi_db].
inline std::vector<double> sigmoid_grid_db(int n = 8, double lo_db = 60.0, double hi_db = 200.0)
{
    if (n < 2)
        throw std::invalid_argument("sigmoid_grid_db: need at least two points");
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(lo_db + (hi_db - lo_db) * i / (n - 1));
    return g;
}

/**
 * Least-squares fit of the logistic model to samples (x_dB, y) by Levenberg-Marquardt.
 * Start: s0 at the linear-interpolated 1/2 crossing, b0 = -4 times the local slope.
 */
inline SigmoidFit fit_logistic(std::span<const double> x_db, std::span<const double> y, int max_iterations = 200)
{
    const std::size_t n = x_db.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("fit_logistic: need at least two samples of matching size");

    // Initial s0: 1/2 crossing, else the sample closest to 1/2.
    std::size_t cross = n;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if ((y[i] - 0.5) * (y[i + 1] - 0.5) <= 0.0 && y[i] != y[i + 1])
        {
            cross = i;
            break;
        }
    double s0 = 0.0;
    double slope = 0.0;
    if (cross < n)
    {
        const double t = (0.5 - y[cross]) / (y[cross + 1] - y[cross]);
        s0 = x_db[cross] + t * (x_db[cross + 1] - x_db[cross]);
        slope = (y[cross + 1] - y[cross]) / (x_db[cross + 1] - x_db[cross]);
    }
    else
    {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(y[i] - 0.5) < std::abs(y[best] - 0.5))
                best = i;
        s0 = x_db[best];
        const std::size_t a = best == 0 ? 0 : best - 1;
        const std::size_t b = best + 1 < n ? best + 1 : best;
        slope = b > a ? (y[b] - y[a]) / (x_db[b] - x_db[a]) : 0.0;
    }
    double b0 = -4.0 * slope;
    if (!(std::abs(b0) > 1e-6))
        b0 = 4.0 / std::max(1e-12, x_db[n - 1] - x_db[0]);

    auto sse = [&](double bb, double ss) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double z = bb * (x_db[i] - ss);
            const double g = z > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(z));
            acc += (g - y[i]) * (g - y[i]);
        }
        return acc;
    };

    double cost = sse(b0, s0);
    double mu = 1e-3;
    int it = 0;
    bool converged = false;
    for (; it < max_iterations; ++it)
    {
        // Normal equations J^T J and J^T r for (b0, s0).
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double d = x_db[i] - s0;
            const double z = b0 * d;
            const double g = z > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(z));
            const double gg = g * (1.0 - g);
            const double jb = -gg * d;
            const double js = gg * b0;
            const double r = g - y[i];
            a11 += jb * jb;
            a12 += jb * js;
            a22 += js * js;
            g1 += jb * r;
            g2 += js * r;
        }
        if (std::sqrt(g1 * g1 + g2 * g2) < 1e-15)
        {
            converged = true;
            break;
        }
        bool improved = false;
        while (mu < 1e12)
        {
            const double m11 = a11 + mu * std::max(a11, 1e-300);
            const double m22 = a22 + mu * std::max(a22, 1e-300);
            const double det = m11 * m22 - a12 * a12;
            if (det == 0.0 || !std::isfinite(det))
            {
                mu *= 10.0;
                continue;
            }
            const double db = -(m22 * g1 - a12 * g2) / det;
            const double ds = -(m11 * g2 - a12 * g1) / det;
            const double nc = sse(b0 + db, s0 + ds);
            if (nc <= cost)
            {
                b0 += db;
                s0 += ds;
                const bool tiny = std::abs(db) <= 1e-12 * (std::abs(b0) + 1e-12) &&
                                  std::abs(ds) <= 1e-12 * (std::abs(s0) + 1e-12);
                const bool flat = cost - nc <= 1e-15 * cost;
                cost = nc;
                mu = std::max(mu / 10.0, 1e-12);
                improved = true;
                if (tiny || flat)
                    converged = true;
                break;
            }
            mu *= 10.0;
        }
        if (!improved)
        {
            converged = true; // no descent direction left at this precision
            break;
        }
        if (converged)
            break;
    }
    SigmoidFit fit{b0, s0, 0.0, 0.0, it};
    double max_r = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_r = std::max(max_r, std::abs(fit.at_db(x_db[i]) - y[i]));
    fit.rms_residual = std::sqrt(cost / n);
    fit.max_residual = max_r;
    if (!converged || !std::isfinite(b0) || !std::isfinite(s0))
    {
        std::ostringstream msg;
        msg << "fit_logistic: no convergence after " << max_iterations << " iterations (rms residual "
            << fit.rms_residual << ")";
        throw NumericError(msg.str());
    }
    return fit;
}

/// Logistic fit to the exact Laplace transform of tier j at the given dB grid.
inline SigmoidFit fit_sigmoid(std::size_t j, PowerPolicy const &policy, NetworkModel const &model,
                              std::span<const double> grid_db)
{
    std::vector<double> y;
    y.reserve(grid_db.size());
    for (double x : grid_db)
        y.push_back(laplace_interference(j, std::pow(10.0, x / 10.0), policy, model));
    return fit_logistic(grid_db, y);
}

inline SigmoidFit fit_sigmoid(std::size_t j, PowerPolicy const &policy, NetworkModel const &model)
{
    const auto g = sigmoid_grid_db();
    return fit_sigmoid(j, policy, model, g);
}

/// Moment-matched TDA parameter theta0 = -beta_j'(0).
inline TdaFit fit_tda(std::size_t j, PowerPolicy const &policy, NetworkModel const &model, TdaFamily family)
{
    const double d1 = beta_prime_0(j, policy, model);
    if (!std::isfinite(d1) || !(d1 < 0.0))
        throw NumericError("fit_tda: first moment is not finite and positive");
    return {-d1, family};
}

/// Writes `tier,family,param,value` rows.
inline void write_fit_csv_header(std::ostream &os)
{
    os << "tier,family,param,value\n";
}

inline void write_fit_csv(std::ostream &os, std::size_t tier, SigmoidFit const &f)
{
    os << tier << ",sigmoid,b0," << f.b0 << '\n';
    os << tier << ",sigmoid,s0_db," << f.s0_db << '\n';
    os << tier << ",sigmoid,rms_residual," << f.rms_residual << '\n';
}

inline void write_fit_csv(std::ostream &os, std::size_t tier, TdaFit const &f)
{
    os << tier << ",tda_" << to_string(f.family) << ",theta0," << f.theta0 << '\n';
}

} // namespace iafpc

#endif // IAFPC_INTERFERENCE_APPROX_HPP
