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

#ifndef IAFPC_SPECIAL_MATH_HPP
#define IAFPC_SPECIAL_MATH_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iafpc {

/// Raised when a numerical routine cannot reach its requested accuracy.
class NumericError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Euler gamma function for positive real arguments.
inline double gamma_fn(double z)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("gamma_fn: argument must be positive and finite, got " + std::to_string(z));
    return std::tgamma(z);
}

namespace detail {

inline bool is_nonpositive_integer(double x)
{
    return x <= 0.0 && std::abs(x - std::round(x)) < 1e-13;
}

// 1/Gamma(x), zero at the poles.
inline double rgamma(double x)
{
    return is_nonpositive_integer(x) ? 0.0 : 1.0 / std::tgamma(x);
}

inline double hyp2f1_series(double a, double b, double c, double z, int max_terms = 200000)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < max_terms; ++k)
    {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum))
            return sum;
    }
    throw NumericError("hyp2f1: power series did not converge for z = " + std::to_string(z));
}

} // namespace detail

/**
 * Gauss hypergeometric function 2F1(a, b; c; z) on the negative real axis.
 *
 * Parameters are fixed at construction so that the Gamma prefactors of the
 * 1/(1-z) connection formula are computed once; this matters inside the
 * nested quadratures, where the same (a, b, c) is evaluated millions of times.
 *
 * For -1 <= z <= 0 the Pfaff transformation maps z to z/(z-1) in [0, 1/2].
 * For z < -1 the argument is mapped to 1/(1-z) in (0, 1/2). When a-b is an
 * integer that connection formula degenerates and the (slower) Pfaff series is
 * used on the whole axis.
 */
class Hyp2F1
{
public:
    Hyp2F1(double a, double b, double c) : a_(a), b_(b), c_(c)
    {
        if (detail::is_nonpositive_integer(c))
            throw std::domain_error("hyp2f1: c must not be a non-positive integer");
        const double amb = a - b;
        connection_ = std::abs(amb - std::round(amb)) > 1e-9;
        if (connection_)
        {
            const double gc = std::tgamma(c);
            coef_a_ = gc * std::tgamma(b - a) * detail::rgamma(b) * detail::rgamma(c - a);
            coef_b_ = gc * std::tgamma(a - b) * detail::rgamma(a) * detail::rgamma(c - b);
        }
    }

    double operator()(double z) const
    {
        if (!(z <= 0.0))
            throw std::domain_error("hyp2f1: only z <= 0 is supported, got " + std::to_string(z));
        if (z == 0.0)
            return 1.0;
        if (z >= -1.0 || !connection_)
        {
            const double w = z / (z - 1.0);
            return std::pow(1.0 - z, -a_) * detail::hyp2f1_series(a_, c_ - b_, c_, w);
        }
        const double x = 1.0 / (1.0 - z);
        double result = 0.0;
        if (coef_a_ != 0.0)
            result += coef_a_ * std::pow(x, a_) * detail::hyp2f1_series(a_, c_ - b_, a_ - b_ + 1.0, x);
        if (coef_b_ != 0.0)
            result += coef_b_ * std::pow(x, b_) * detail::hyp2f1_series(b_, c_ - a_, b_ - a_ + 1.0, x);
        return result;
    }

private:
    double a_, b_, c_;
    bool connection_ = false;
    double coef_a_ = 0.0;
    double coef_b_ = 0.0;
};

inline double hyp2f1(double a, double b, double c, double z)
{
    return Hyp2F1(a, b, c)(z);
}

enum class InfiniteMap
{
    none,
    rational
};

struct QuadratureSpec
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    InfiniteMap infinite_map = InfiniteMap::rational;
    /// Length scale L of the map x = lo + L t / (1 - t) on [lo, inf).
    double scale = 1.0;

    /// Same spec with tolerances tightened by `factor` (inner integral of a nested pair).
    QuadratureSpec inner(double factor = 10.0) const
    {
        QuadratureSpec s = *this;
        s.rel_tol /= factor;
        s.abs_tol /= factor;
        return s;
    }
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

namespace detail {

struct GkSegment
{
    double a, b, value, error;
};

// Gauss-Kronrod 7/15 nodes and weights.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
GkSegment gk15(F &f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j)
    {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double value = resk * half;
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
        err = std::max(round_floor, err);
    if (!std::isfinite(value) || !std::isfinite(err))
        throw NumericError("integrate: integrand produced a non-finite value on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]");
    return {a, b, value, err};
}

template <class F>
QuadratureResult adaptive_gk(F &f, std::vector<double> const &knots, QuadratureSpec const &spec)
{
    std::vector<GkSegment> heap;
    heap.reserve(64);
    auto cmp = [](GkSegment const &x, GkSegment const &y) { return x.error < y.error; };
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    {
        if (!(knots[i + 1] > knots[i]))
            continue;
        heap.push_back(gk15(f, knots[i], knots[i + 1]));
        total += heap.back().value;
        total_err += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end(), cmp);

    int splits = 0;
    while (!heap.empty())
    {
        // Floor far above the subnormal range: integrands that underflow count as zero.
        const double tol = std::max({spec.abs_tol, spec.rel_tol * std::abs(total), 1e-290});
        if (total_err <= tol)
            break;
        std::pop_heap(heap.begin(), heap.end(), cmp);
        GkSegment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 1e-13 * std::max(std::abs(worst.a), std::abs(worst.b)))
        {
            // Interval can no longer be bisected; its error is all roundoff.
            total_err -= worst.error;
            continue;
        }
        if (++splits > spec.max_subdivisions)
        {
            char msg[160];
            std::snprintf(msg, sizeof msg, "integrate: no convergence after %d subdivisions (estimate %.6g, error %.3g)",
                          spec.max_subdivisions, total, total_err);
            throw NumericError(msg);
        }
        GkSegment left = gk15(f, worst.a, mid);
        GkSegment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
    }
    // Re-sum to shed the drift of the running updates.
    double value = 0.0;
    double err = 0.0;
    for (auto const &s : heap)
    {
        value += s.value;
        err += s.error;
    }
    return {value, err, splits};
}

} // namespace detail

/**
 * Adaptive Gauss-Kronrod (7/15) quadrature of f over [lo, hi], hi may be +inf.
 *
 * Interior `breakpoints` (kinks, jumps of f) seed the initial partition; points
 * outside (lo, hi) are ignored. Semi-infinite ranges go through the rational
 * map x = lo + L t/(1-t) with L = spec.scale. Throws NumericError when the
 * tolerance max(abs_tol, rel_tol |I|) is not met within spec.max_subdivisions
 * bisections, or when f returns a non-finite value.
 */
template <class F>
QuadratureResult integrate_ex(F &&f, double lo, double hi, QuadratureSpec const &spec = {},
                              std::span<const double> breakpoints = {})
{
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol >= 0.0) || spec.max_subdivisions < 1)
        throw std::invalid_argument("integrate: invalid quadrature spec");
    if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo))
        throw std::invalid_argument("integrate: invalid integration limits");
    if (hi == lo)
        return {};
    if (hi < lo)
    {
        auto r = integrate_ex(f, hi, lo, spec, breakpoints);
        r.value = -r.value;
        return r;
    }

    if (std::isinf(hi))
    {
        if (spec.infinite_map != InfiniteMap::rational)
            throw std::invalid_argument("integrate: infinite upper limit requires the rational map");
        const double L = spec.scale;
        if (!(L > 0.0))
            throw std::invalid_argument("integrate: map scale must be positive");
        auto g = [&](double t) {
            const double om = 1.0 - t;
            const double x = lo + L * t / om;
            const double fx = f(x);
            if (fx == 0.0)
                return 0.0;
            return fx * L / (om * om);
        };
        std::vector<double> knots{0.0};
        for (double b : breakpoints)
            if (b > lo && std::isfinite(b))
                knots.push_back((b - lo) / (b - lo + L));
        knots.push_back(1.0);
        std::sort(knots.begin(), knots.end());
        return detail::adaptive_gk(g, knots, spec);
    }

    std::vector<double> knots{lo};
    for (double b : breakpoints)
        if (b > lo && b < hi)
            knots.push_back(b);
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());
    return detail::adaptive_gk(f, knots, spec);
}

template <class F>
double integrate(F &&f, double lo, double hi, QuadratureSpec const &spec = {},
                 std::span<const double> breakpoints = {})
{
    return integrate_ex(std::forward<F>(f), lo, hi, spec, breakpoints).value;
}

enum class Stencil
{
    central,
    forward
};

/**
 * First or second derivative of f at x0 by finite differences with Richardson
 * extrapolation (Ridders' scheme). `h0` is the initial step; the forward
 * stencil serves functions only defined on [x0, inf).
 */
template <class F>
double derivative(F &&f, double x0, int order, double h0 = 0.0, Stencil stencil = Stencil::central)
{
    if (order != 1 && order != 2)
        throw std::invalid_argument("derivative: order must be 1 or 2");
    double h = h0 > 0.0 ? h0 : 0.1 * std::max(1.0, std::abs(x0));
    constexpr int kLevels = 12;
    constexpr double kShrink = 1.6;

    auto estimate = [&](double step) {
        if (!(x0 + step != x0) || !(step > std::numeric_limits<double>::min()))
            throw NumericError("derivative: step underflow at x0 = " + std::to_string(x0));
        if (stencil == Stencil::central)
        {
            if (order == 1)
                return (f(x0 + step) - f(x0 - step)) / (2.0 * step);
            return (f(x0 + step) - 2.0 * f(x0) + f(x0 - step)) / (step * step);
        }
        if (order == 1)
            return (-3.0 * f(x0) + 4.0 * f(x0 + step) - f(x0 + 2.0 * step)) / (2.0 * step);
        return (2.0 * f(x0) - 5.0 * f(x0 + step) + 4.0 * f(x0 + 2.0 * step) - f(x0 + 3.0 * step)) / (step * step);
    };
    // Error expansion: even powers of h for central stencils, h^2, h^3, ... for
    // the second-order forward stencils above.
    auto order_of_term = [&](int k) { return stencil == Stencil::central ? 2.0 * (k + 1) : k + 2.0; };

    double table[kLevels][kLevels];
    double best = 0.0;
    double best_err = kInf;
    table[0][0] = estimate(h);
    for (int i = 1; i < kLevels; ++i)
    {
        h /= kShrink;
        table[0][i] = estimate(h);
        for (int k = 1; k <= i; ++k)
        {
            const double fac = std::pow(kShrink, order_of_term(k - 1));
            table[k][i] = (fac * table[k - 1][i] - table[k - 1][i - 1]) / (fac - 1.0);
            const double err = std::max(std::abs(table[k][i] - table[k - 1][i]),
                                        std::abs(table[k][i] - table[k - 1][i - 1]));
            if (err <= best_err)
            {
                best_err = err;
                best = table[k][i];
            }
        }
        if (std::abs(table[i][i] - table[i - 1][i - 1]) >= 2.0 * best_err)
            break;
    }
    return best;
}

} // namespace iafpc

#endif // IAFPC_SPECIAL_MATH_HPP
