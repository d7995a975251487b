#pragma once

// Real roots of polynomials of degree <= 4.
//
// Roots are isolated between consecutive critical points (the real roots of
// the derivative, found recursively), so each bracket holds at most one simple
// root and is refined by safeguarded Newton iteration. A critical point where
// the polynomial vanishes to rounding is a multiple root and is reported with
// its multiplicity. This handles the double roots that tangency
// configurations produce without the eigenvalue splitting a companion-matrix
// solver shows there.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace tat {

/// c4 t^4 + c3 t^3 + c2 t^2 + c1 t + c0.
struct QuarticCoefficients
{
    double c4 = 0.0;
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double t) const { return (((c4 * t + c3) * t + c2) * t + c1) * t + c0; }

    double max_abs() const
    {
        return std::max({std::abs(c4), std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    }

    friend bool operator==(const QuarticCoefficients&, const QuarticCoefficients&) = default;
};

namespace detail {

inline constexpr int max_degree = 4;

/// Ascending coefficients a[0] + a[1] t + ... + a[deg] t^deg.
inline double horner(const double* a, int deg, double t)
{
    double v = a[deg];
    for (int i = deg - 1; i >= 0; --i)
        v = v * t + a[i];
    return v;
}

/// Magnitude of the terms summed when evaluating at t; scales the "zero"
/// threshold for rounding.
inline double eval_scale(const double* a, int deg, double t)
{
    const double at = std::abs(t);
    double v = std::abs(a[deg]);
    for (int i = deg - 1; i >= 0; --i)
        v = v * at + std::abs(a[i]);
    return v;
}

/// Root of a[] in [lo, hi] given a strict sign change. Newton steps are taken
/// when they stay inside the bracket, bisection otherwise.
inline double refine_bracketed(const double* a, int deg, double lo, double hi, double flo)
{
    double da[max_degree];
    for (int i = 0; i < deg; ++i)
        da[i] = static_cast<double>(i + 1) * a[i + 1];

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter)
    {
        const double fx = horner(a, deg, x);
        if (fx == 0.0)
            return x;
        if ((fx < 0.0) == (flo < 0.0))
            lo = x;
        else
            hi = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            break;
        const double dfx = horner(da, deg - 1, x);
        double next = (dfx != 0.0) ? x - fx / dfx : lo - 1.0;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (next == x)
            break;
        x = next;
    }
    return x;
}

/// Real roots with multiplicity, ascending. Returns the count written to out.
inline int real_roots(const double* coeffs, int deg, double* out)
{
    double a[max_degree + 1];
    double max_abs = 0.0;
    for (int i = 0; i <= deg; ++i)
    {
        a[i] = coeffs[i];
        max_abs = std::max(max_abs, std::abs(a[i]));
    }
    if (max_abs == 0.0)
        return 0;
    // Leading coefficients this small only move roots beyond ~1e14.
    while (deg > 0 && std::abs(a[deg]) <= 1e-14 * max_abs)
        --deg;
    if (deg == 0)
        return 0;
    if (deg == 1)
    {
        out[0] = -a[0] / a[1];
        return 1;
    }

    double da[max_degree];
    for (int i = 0; i < deg; ++i)
        da[i] = static_cast<double>(i + 1) * a[i + 1];
    double crit[max_degree];
    const int n_crit = real_roots(da, deg - 1, crit);

    double bound = 0.0;
    for (int i = 0; i < deg; ++i)
        bound = std::max(bound, std::abs(a[i] / a[deg]));
    bound += 1.0;

    // Breakpoints: -bound, distinct critical points, +bound.
    std::array<double, max_degree + 2> pts{};
    std::array<int, max_degree + 2> mult{};
    int n_pts = 0;
    pts[n_pts] = -bound;
    mult[n_pts++] = 0;
    for (int c = 0; c < n_crit; ++c)
    {
        const double x = std::clamp(crit[c], -bound, bound);
        if (n_pts > 1 && x == pts[n_pts - 1])
        {
            ++mult[n_pts - 1];
            continue;
        }
        pts[n_pts] = x;
        mult[n_pts++] = 1;
    }
    pts[n_pts] = bound;
    mult[n_pts++] = 0;

    std::array<double, max_degree + 2> val{};
    std::array<int, max_degree + 2> sgn{};
    for (int m = 0; m < n_pts; ++m)
    {
        val[m] = horner(a, deg, pts[m]);
        const double tol = 32.0 * std::numeric_limits<double>::epsilon() * eval_scale(a, deg, pts[m]);
        sgn[m] = (mult[m] > 0 && std::abs(val[m]) <= tol) ? 0 : (val[m] < 0.0 ? -1 : 1);
    }

    int n = 0;
    for (int m = 0; m < n_pts; ++m)
    {
        if (m > 0 && sgn[m - 1] * sgn[m] < 0)
            out[n++] = refine_bracketed(a, deg, pts[m - 1], pts[m], val[m - 1]);
        if (sgn[m] == 0)
            for (int r = 0; r <= mult[m] && n < deg; ++r)
                out[n++] = pts[m];
    }
    std::sort(out, out + n);
    return n;
}

}  // namespace detail

/// All real roots of the quartic (with multiplicity), ascending.
inline std::vector<double> solve_quartic(const QuarticCoefficients& q)
{
    const double mags[] = {q.c4, q.c3, q.c2, q.c1, q.c0};
    if (std::all_of(std::begin(mags), std::end(mags), [](double c) { return std::abs(c) < 1e-300; }))
        throw DegeneratePolynomial("solve_quartic: all coefficients vanish");
    const double a[] = {q.c0, q.c1, q.c2, q.c3, q.c4};
    double roots[detail::max_degree];
    const int n = detail::real_roots(a, detail::max_degree, roots);
    return {roots, roots + n};
}

}  // namespace tat
