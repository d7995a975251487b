#pragma once

// Exact forward projection Rf(p, r) of ellipsoid phantoms.
//
// The sphere |x - p| = r is parameterized as
//   x = p + r (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)).
// For fixed phi, the part of the meridian inside an ellipsoid is a union of
// intervals in t = cos(theta); the solid angle it covers is
//   integral over phi of F(phi),  F(phi) = sum (upper - lower),
// and the area is r^2 times that. Interval endpoints are roots of a quartic
// in t. F is integrated with the periodic trapezoid rule when it is smooth
// and with Gauss-Legendre on each smooth piece otherwise.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "phantom.hpp"
#include "quartic.hpp"
#include "sinogram.hpp"
#include "vec3.hpp"

namespace tat {

/**
 * Ellipsoid level set restricted to one meridian of the integration sphere:
 *   level(x(t)) - 1 = A(t) + beta * sqrt(1 - t^2),
 * with A(t) = a2 t^2 + a1 t + a0. For axis-aligned ellipsoids beta does not
 * depend on t.
 */
struct MeridianEquation
{
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
    double beta = 0.0;

    double quadratic(double t) const { return (a2 * t + a1) * t + a0; }
    double residual(double t) const
    {
        return quadratic(t) + beta * std::sqrt(std::max(0.0, 1.0 - t * t));
    }
    double scale() const { return std::abs(a2) + std::abs(a1) + std::abs(a0) + std::abs(beta); }

    /// A(t)^2 - beta^2 (1 - t^2): vanishes at every true intersection cosine.
    QuarticCoefficients quartic() const
    {
        const double b2 = beta * beta;
        return {a2 * a2, 2.0 * a2 * a1, a1 * a1 + 2.0 * a2 * a0 + b2, 2.0 * a1 * a0, a0 * a0 - b2};
    }
};

inline MeridianEquation meridian_equation(const Ellipsoid& e, const Vec3& p, double r, double cos_phi,
                                          double sin_phi)
{
    const Vec3 u = p - e.center;
    const double ix = 1.0 / (e.semiaxes.x * e.semiaxes.x);
    const double iy = 1.0 / (e.semiaxes.y * e.semiaxes.y);
    const double iz = 1.0 / (e.semiaxes.z * e.semiaxes.z);

    const double alpha = r * r * (cos_phi * cos_phi * ix + sin_phi * sin_phi * iy);
    const double gamma = u.x * u.x * ix + u.y * u.y * iy;

    MeridianEquation m;
    m.a2 = r * r * iz - alpha;
    m.a1 = 2.0 * u.z * r * iz;
    m.a0 = alpha + gamma + u.z * u.z * iz - 1.0;
    m.beta = 2.0 * r * (u.x * cos_phi * ix + u.y * sin_phi * iy);
    return m;
}

/// Quartic in t = cos(theta) whose real roots in [-1, 1] include every point
/// where the meridian at azimuth phi crosses the ellipsoid surface.
inline QuarticCoefficients sphere_ellipsoid_quartic(const Ellipsoid& e, const Vec3& p, double r,
                                                    double phi)
{
    detail::require(r > 0.0, "sphere_ellipsoid_quartic: r must be positive");
    const auto q = meridian_equation(e, p, r, std::cos(phi), std::sin(phi)).quartic();
    if (q.max_abs() == 0.0)
        throw InvalidArgument("sphere_ellipsoid_quartic: integration sphere lies on the ellipsoid surface");
    return q;
}

/// [lower, upper] in t = cos(theta); lower = cos(theta_2), upper = cos(theta_1).
struct Interval
{
    double lower = 0.0;
    double upper = 0.0;

    double length() const { return upper - lower; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Inside-the-ellipsoid arcs of one meridian, sorted and disjoint.
struct IntersectionIntervals
{
    static constexpr std::size_t capacity = 4;

    double phi = 0.0;
    std::array<Interval, capacity> items{};
    std::size_t count = 0;

    std::span<const Interval> intervals() const { return {items.data(), count}; }
    bool empty() const { return count == 0; }
};

inline constexpr double spurious_root_tolerance = 1e-7;
inline constexpr double min_interval_width = 1e-12;

namespace detail {

inline void push_interval(IntersectionIntervals& out, double lo, double hi)
{
    if (hi - lo < min_interval_width)
        return;
    if (out.count > 0 && out.items[out.count - 1].upper == lo)
    {
        out.items[out.count - 1].upper = hi;
        return;
    }
    if (out.count < IntersectionIntervals::capacity)
        out.items[out.count++] = {lo, hi};
}

inline IntersectionIntervals meridian_intervals(const Ellipsoid& e, const Vec3& p, double r, double phi,
                                                double cos_phi, double sin_phi)
{
    IntersectionIntervals out;
    out.phi = phi;
    const MeridianEquation m = meridian_equation(e, p, r, cos_phi, sin_phi);

    // Cheap exact bounds: residual(t) lies within [min A - |beta|, max A + |beta|].
    double a_min = std::min(m.quadratic(-1.0), m.quadratic(1.0));
    double a_max = std::max(m.quadratic(-1.0), m.quadratic(1.0));
    if (m.a2 != 0.0)
    {
        const double tv = -m.a1 / (2.0 * m.a2);
        if (tv > -1.0 && tv < 1.0)
        {
            a_min = std::min(a_min, m.quadratic(tv));
            a_max = std::max(a_max, m.quadratic(tv));
        }
    }
    const double ab = std::abs(m.beta);
    if (a_min - ab > 0.0)
        return out;
    if (a_max + ab < 0.0)
    {
        push_interval(out, -1.0, 1.0);
        return out;
    }

    const QuarticCoefficients q = m.quartic();
    if (q.max_abs() < 1e-300)
        throw DegeneratePolynomial("meridian_intervals: degenerate intersection quartic");
    const double coeffs[] = {q.c0, q.c1, q.c2, q.c3, q.c4};
    double roots[4];
    const int n_roots = real_roots(coeffs, 4, roots);

    // Candidate breakpoints: -1, the genuine roots inside (-1, 1), +1.
    std::array<double, 6> cuts{};
    std::size_t n_cuts = 0;
    cuts[n_cuts++] = -1.0;
    const double tol = spurious_root_tolerance * m.scale();
    for (int k = 0; k < n_roots; ++k)
    {
        const double t = roots[k];
        if (!(t > -1.0 && t < 1.0))
            continue;
        if (std::abs(m.residual(t)) > tol)
            continue;
        cuts[n_cuts++] = t;
    }
    cuts[n_cuts++] = 1.0;

    for (std::size_t g = 0; g + 1 < n_cuts; ++g)
    {
        const double lo = cuts[g];
        const double hi = cuts[g + 1];
        if (hi <= lo)
            continue;
        const double t = 0.5 * (lo + hi);
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        const Vec3 x = p + Vec3{s * cos_phi, s * sin_phi, t} * r;
        if (e.contains(x))
            push_interval(out, lo, hi);
    }
    return out;
}

}  // namespace detail

inline IntersectionIntervals meridian_intervals(const Ellipsoid& e, const Vec3& p, double r, double phi)
{
    detail::require(r > 0.0, "meridian_intervals: r must be positive");
    return detail::meridian_intervals(e, p, r, phi, std::cos(phi), std::sin(phi));
}

/// F(phi): total length in cos(theta) of the inside arcs.
inline double meridian_sum(const IntersectionIntervals& iv)
{
    double sum = 0.0;
    for (const auto& in : iv.intervals())
        sum += in.upper - in.lower;
    return sum;
}

/// Nearest and farthest points of an ellipsoid seen from an exterior point.
struct SupportBounds
{
    double r_min = 0.0;
    double r_max = 0.0;
    Vec3 nearest;
    Vec3 farthest;
    bool farthest_exact = false;
};

/**
 * Distance range over which spheres centered at p meet the ellipsoid.
 *
 * The extremal points satisfy x_d = c_d + e_d^2 u_d / (e_d^2 + lambda),
 * u = p - c, with lambda > 0 for the nearest point and
 * lambda < -max(e_d^2) for the farthest; both are found by bisection on the
 * constraint. When the farthest point is not isolated (u orthogonal to the
 * longest axis) r_max falls back to |u| + max semiaxis.
 */
inline SupportBounds support_bounds(const Ellipsoid& e, const Vec3& p)
{
    const Vec3 u = p - e.center;
    const double e2[3] = {e.semiaxes.x * e.semiaxes.x, e.semiaxes.y * e.semiaxes.y,
                          e.semiaxes.z * e.semiaxes.z};
    const double uu[3] = {u.x, u.y, u.z};
    const double emax = e.max_semiaxis();
    const double unorm = norm(u);

    const auto constraint = [&](double lambda) {
        double s = -1.0;
        for (int d = 0; d < 3; ++d)
        {
            const double q = std::sqrt(e2[d]) * uu[d] / (e2[d] + lambda);
            s += q * q;
        }
        return s;
    };
    const auto point = [&](double lambda) {
        return Vec3{e.center.x + e2[0] * uu[0] / (e2[0] + lambda),
                    e.center.y + e2[1] * uu[1] / (e2[1] + lambda),
                    e.center.z + e2[2] * uu[2] / (e2[2] + lambda)};
    };

    SupportBounds b;
    {
        double lo = 0.0;
        double hi = emax * unorm;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (constraint(mid) > 0.0 ? lo : hi) = mid;
        }
        b.nearest = point(0.5 * (lo + hi));
        b.r_min = distance(b.nearest, p);
    }
    {
        const double edge = -emax * emax;
        double lo = edge - emax * unorm;
        double hi = edge;
        // The constraint increases towards `edge`; it only reaches zero when
        // u has a component along a longest axis.
        if (constraint(std::nextafter(edge, lo)) > 0.0)
        {
            for (int it = 0; it < 200 && hi - lo > 1e-16 * std::abs(lo); ++it)
            {
                const double mid = 0.5 * (lo + hi);
                (constraint(mid) > 0.0 ? hi : lo) = mid;
            }
            b.farthest = point(0.5 * (lo + hi));
            b.r_max = distance(b.farthest, p);
            b.farthest_exact = true;
        }
        else
        {
            b.farthest = e.center - u * (emax / unorm);
            b.r_max = unorm + emax;
        }
    }
    // The bisection tolerances leave the bounds a few ulps from the true
    // extrema; pad outward so no intersecting sphere is rejected.
    b.r_min = std::max(0.0, b.r_min * (1.0 - 1e-12));
    b.r_max = b.r_max * (1.0 + 1e-12);
    return b;
}

/// Quadrature settings of the forward projector.
struct ForwardConfig
{
    /// Uniform azimuth samples used to detect breakpoints and, when F is
    /// smooth, as the periodic trapezoid nodes.
    std::size_t n_scan = 256;
    /// Gauss-Legendre order per smooth piece of F.
    std::size_t gauss_order = 32;
    /// Breakpoints are bracketed to this width in phi.
    double breakpoint_width = 1e-10;
};

/**
 * Forward projector for single ellipsoids. Holds the precomputed
 * quadrature tables; const member functions are safe to call concurrently.
 *
 * Each smooth piece [a, b] of F is integrated after the substitution
 * phi = a + (b - a)(1 - cos(pi u)) / 2, u in [0, 1]. F behaves like a square
 * root at the ends of a piece, and the substitution makes it smooth in u.
 */
class ForwardProjector
{
  public:
    explicit ForwardProjector(ForwardConfig cfg = {}) : cfg_(cfg)
    {
        detail::require(cfg_.n_scan >= 8, "forward projector: n_scan must be >= 8");
        detail::require(cfg_.gauss_order >= 1, "forward projector: gauss_order must be >= 1");
        detail::require(cfg_.breakpoint_width > 0.0, "forward projector: breakpoint_width must be positive");
        const auto rule = gauss_legendre(cfg_.gauss_order, 0.0, 1.0);
        for (std::size_t g = 0; g < rule.size(); ++g)
        {
            const double u = rule.nodes[g];
            frac_.push_back(0.5 * (1.0 - std::cos(pi * u)));
            jac_.push_back(rule.weights[g] * 0.5 * pi * std::sin(pi * u));
        }
        scan_cos_.resize(cfg_.n_scan);
        scan_sin_.resize(cfg_.n_scan);
        for (std::size_t k = 0; k < cfg_.n_scan; ++k)
        {
            const double a = two_pi * static_cast<double>(k) / static_cast<double>(cfg_.n_scan);
            scan_cos_[k] = std::cos(a);
            scan_sin_[k] = std::sin(a);
        }
    }

    const ForwardConfig& config() const { return cfg_; }

    /// Area of the sphere |x - p| = r inside the ellipsoid (unit amplitude).
    double project(const Ellipsoid& e, const Vec3& p, double r) const
    {
        detail::require(r > 0.0, "project_ellipsoid: r must be positive");
        if (std::abs(norm(p) - 1.0) > 1e-9)
            throw InvalidArgument("project_ellipsoid: transducer must lie on the unit sphere");
        const SupportBounds bounds = support_bounds(e, p);
        return project(e, p, r, bounds);
    }

    double project(const Ellipsoid& e, const Vec3& p, double r, const SupportBounds& bounds) const
    {
        if (r <= bounds.r_min || r >= bounds.r_max)
            return 0.0;

        // Azimuths are measured from the transducer's own azimuth so that
        // rotating the setup about z rotates the quadrature nodes with it.
        const double phi0 = std::atan2(p.y, p.x);
        const double c0 = std::cos(phi0);
        const double s0 = std::sin(phi0);
        const std::size_t n = cfg_.n_scan;

        struct Sample
        {
            double offset;  // phi - phi0 in [0, 2 pi)
            std::size_t count;
        };
        std::vector<Sample> samples;
        samples.reserve(n + 2);
        std::vector<double> values(n);
        bool uniform = true;
        for (std::size_t k = 0; k < n; ++k)
        {
            const double offset = two_pi * static_cast<double>(k) / static_cast<double>(n);
            const double cp = c0 * scan_cos_[k] - s0 * scan_sin_[k];
            const double sp = s0 * scan_cos_[k] + c0 * scan_sin_[k];
            const auto iv = detail::meridian_intervals(e, p, r, phi0 + offset, cp, sp);
            values[k] = checked_sum(iv, p, r);
            samples.push_back({offset, iv.count});
            uniform = uniform && iv.count == samples.front().count;
        }
        // Small caps near tangency can fall between scan samples; probe the
        // azimuths of the nearest and farthest points explicitly.
        for (const Vec3& x : {bounds.nearest, bounds.farthest})
        {
            const Vec3 d = x - p;
            if (std::hypot(d.x, d.y) <= 1e-12 * norm(d))
                continue;
            double offset = std::remainder(std::atan2(d.y, d.x) - phi0, two_pi);
            if (offset < 0.0)
                offset += two_pi;
            if (offset >= two_pi)
                offset = 0.0;
            const std::size_t count = count_at(e, p, r, phi0 + offset);
            samples.push_back({offset, count});
            uniform = uniform && count == samples.front().count;
        }

        if (uniform)
        {
            if (samples.front().count == 0)
                return 0.0;
            return r * r * trapezoid_periodic(values, two_pi);
        }

        std::sort(samples.begin(), samples.end(),
                  [](const Sample& a, const Sample& b) { return a.offset < b.offset; });

        // Breakpoints between neighbors (cyclically) whose interval counts
        // differ; each is followed by a piece with the later neighbor's count.
        struct Break
        {
            double offset;
            std::size_t next_count;
        };
        std::vector<Break> breaks;
        const std::size_t m = samples.size();
        for (std::size_t a = 0; a < m; ++a)
        {
            const Sample& lo = samples[a];
            Sample hi = samples[(a + 1) % m];
            if (a + 1 == m)
                hi.offset += two_pi;
            if (lo.count == hi.count || hi.offset <= lo.offset)
                continue;
            breaks.push_back({locate_break(e, p, r, phi0, lo, hi.offset), hi.count});
        }

        double total = 0.0;
        for (std::size_t b = 0; b < breaks.size(); ++b)
        {
            if (breaks[b].next_count == 0)
                continue;
            const double start = breaks[b].offset;
            double stop = breaks[(b + 1) % breaks.size()].offset;
            if (b + 1 == breaks.size())
                stop += two_pi;
            total += integrate_piece(e, p, r, phi0 + start, phi0 + stop);
        }
        return r * r * total;
    }

  private:
    static double checked_sum(const IntersectionIntervals& iv, const Vec3& p, double r)
    {
        const double f = meridian_sum(iv);
        if (!std::isfinite(f))
        {
            std::ostringstream os;
            os << "forward projection: non-finite meridian sum at p = (" << p.x << ", " << p.y << ", "
               << p.z << "), r = " << r << ", phi = " << iv.phi;
            throw NumericalFailure(os.str());
        }
        return f;
    }

    std::size_t count_at(const Ellipsoid& e, const Vec3& p, double r, double phi) const
    {
        return detail::meridian_intervals(e, p, r, phi, std::cos(phi), std::sin(phi)).count;
    }

    template<class S>
    double locate_break(const Ellipsoid& e, const Vec3& p, double r, double phi0, const S& lo_sample,
                        double hi_offset) const
    {
        double lo = lo_sample.offset;
        double hi = hi_offset;
        while (hi - lo > cfg_.breakpoint_width)
        {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (count_at(e, p, r, phi0 + mid) == lo_sample.count ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double integrate_piece(const Ellipsoid& e, const Vec3& p, double r, double a, double b) const
    {
        const double width = b - a;
        double sum = 0.0;
        for (std::size_t g = 0; g < frac_.size(); ++g)
        {
            const double phi = a + width * frac_[g];
            const auto iv = detail::meridian_intervals(e, p, r, phi, std::cos(phi), std::sin(phi));
            sum += jac_[g] * checked_sum(iv, p, r);
        }
        return width * sum;
    }

    ForwardConfig cfg_;
    std::vector<double> frac_;
    std::vector<double> jac_;
    std::vector<double> scan_cos_;
    std::vector<double> scan_sin_;
};

/// One-off projection of a single ellipsoid (unit amplitude).
inline double project_ellipsoid(const Ellipsoid& e, const Vec3& p, double r, const ForwardConfig& cfg = {})
{
    return ForwardProjector(cfg).project(e, p, r);
}

/// Rf(p, r) of a whole phantom, amplitudes included, summed in list order.
inline double project_phantom(const Phantom& phantom, const Vec3& p, double r, const ForwardProjector& proj)
{
    double sum = 0.0;
    for (const auto& e : phantom.ellipsoids())
        sum += e.amplitude * proj.project(e, p, r);
    return sum;
}

/// Progress callback: (completed transducer rows, total rows).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/**
 * Samples Rf on every (transducer, radius) pair of the grids. Entries at
 * r = 0 are zero. Ellipsoids with a circular cross-section centered on the
 * z-axis are projected once per polar angle and shared across azimuths.
 */
inline Sinogram simulate(const Phantom& phantom, const TransducerGrid& grid, const RadialGrid& radial,
                         const ForwardConfig& cfg = {}, const ProgressFn& progress = {})
{
    Sinogram s(grid, radial);
    if (phantom.empty())
        return s;
    const ForwardProjector proj(cfg);
    const std::size_t n_theta = grid.n_theta();
    const std::size_t n_r = radial.size();
    const auto& ellipsoids = phantom.ellipsoids();

    // Polar-only tables for z-axisymmetric members, computed at azimuth 0.
    std::vector<std::vector<double>> shared(ellipsoids.size());
    for (std::size_t q = 0; q < ellipsoids.size(); ++q)
    {
        if (!ellipsoids[q].is_z_axisymmetric())
            continue;
        auto& table = shared[q];
        table.assign(n_theta * n_r, 0.0);
        parallel_for(n_theta, [&](std::size_t j) {
            const Vec3& p = grid.position(0, j);
            const SupportBounds bounds = support_bounds(ellipsoids[q], p);
            for (std::size_t k = 1; k < n_r; ++k)
                table[j * n_r + k] = proj.project(ellipsoids[q], p, radial.radius(k), bounds);
        });
    }

    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    const std::size_t rows = grid.n_phi() * n_theta;
    parallel_for(rows, [&](std::size_t t) {
        const std::size_t i = t / n_theta;
        const std::size_t j = t % n_theta;
        const Vec3& p = grid.position(i, j);
        std::vector<SupportBounds> bounds(ellipsoids.size());
        for (std::size_t q = 0; q < ellipsoids.size(); ++q)
            if (shared[q].empty())
                bounds[q] = support_bounds(ellipsoids[q], p);
        auto row = s.row(i, j);
        for (std::size_t k = 1; k < n_r; ++k)
        {
            const double r = radial.radius(k);
            double sum = 0.0;
            for (std::size_t q = 0; q < ellipsoids.size(); ++q)
            {
                const double area = shared[q].empty() ? proj.project(ellipsoids[q], p, r, bounds[q])
                                                      : shared[q][j * n_r + k];
                sum += ellipsoids[q].amplitude * area;
            }
            row[k] = sum;
        }
        const std::size_t finished = ++done;
        if (progress)
        {
            std::lock_guard lock(progress_mutex);
            progress(finished, rows);
        }
    });
    return s;
}

/// Analytic sinogram of a phantom made only of balls.
inline Sinogram simulate_analytic(const Phantom& phantom, const TransducerGrid& grid, const RadialGrid& radial)
{
    Sinogram s(grid, radial);
    parallel_for(grid.size(), [&](std::size_t t) {
        const std::size_t i = t / grid.n_theta();
        const std::size_t j = t % grid.n_theta();
        auto row = s.row(i, j);
        for (std::size_t k = 1; k < radial.size(); ++k)
            row[k] = phantom_projection_analytic(phantom, grid.position(i, j), radial.radius(k));
    });
    return s;
}

struct MonteCarloEstimate
{
    double estimate = 0.0;
    double standard_error = 0.0;
};

/**
 * Brute-force Rf(p, r): n uniform points on the sphere |x - p| = r,
 * estimate = 4 pi r^2 * mean(f(x)). The standard error
 * 4 pi r^2 sqrt(m (1 - m) / n) uses the mean indicator m and is meaningful
 * for amplitude-1, non-overlapping phantoms.
 */
inline MonteCarloEstimate monte_carlo_projection(const Phantom& phantom, const Vec3& p, double r,
                                                 std::size_t n, std::uint64_t seed)
{
    detail::require(n >= 1000, "monte_carlo_projection: needs at least 1000 samples");
    detail::require(r > 0.0, "monte_carlo_projection: r must be positive");
    if (phantom.empty())
        return {};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> cos_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> phi_dist(0.0, two_pi);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s)
    {
        const double ct = cos_dist(rng);
        const double phi = phi_dist(rng);
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const Vec3 x = p + Vec3{st * std::cos(phi), st * std::sin(phi), ct} * r;
        const double f = evaluate(phantom, x);
        sum += f;
        hits += f != 0.0 ? 1 : 0;
    }
    const double area = 4.0 * pi * r * r;
    const double nd = static_cast<double>(n);
    const double m = static_cast<double>(hits) / nd;
    return {area * sum / nd, area * std::sqrt(m * (1.0 - m) / nd)};
}

}  // namespace tat
