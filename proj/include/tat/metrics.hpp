#pragma once

// Quantitative evaluation of reconstructions: line profiles, region errors,
// partial-scan visibility, edge sharpness and the symmetry-axis error ratio.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "phantom.hpp"
#include "sinogram.hpp"
#include "vec3.hpp"

namespace tat {

enum class Axis
{
    x = 0,
    y = 1,
    z = 2,
};

inline Axis parse_axis(std::string_view name)
{
    if (name == "x")
        return Axis::x;
    if (name == "y")
        return Axis::y;
    if (name == "z")
        return Axis::z;
    throw InvalidArgument("unknown axis '" + std::string(name) + "' (expected x, y or z)");
}

/// Values along a line of voxel centers parallel to `axis`. `fixed` holds the
/// two remaining coordinates in (x, y, z) order with the profile axis removed.
struct LineProfile
{
    Axis axis = Axis::z;
    std::array<double, 2> fixed{};
    std::vector<double> coords;
    std::vector<double> values;
};

/// Index of the voxel center nearest to coordinate c in [-1, 1].
inline std::size_t nearest_voxel(const Volume& v, double c)
{
    if (!(c >= -1.0 && c <= 1.0))
        throw InvalidArgument("coordinate " + std::to_string(c) + " lies outside [-1, 1]");
    const double u = std::round((c + 1.0) / v.spacing() - 0.5);
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(v.dim() - 1)));
}

inline LineProfile extract_profile(const Volume& v, Axis axis, double first, double second)
{
    LineProfile prof;
    prof.axis = axis;
    prof.fixed = {first, second};
    const std::size_t a = nearest_voxel(v, first);
    const std::size_t b = nearest_voxel(v, second);
    prof.coords.resize(v.dim());
    prof.values.resize(v.dim());
    for (std::size_t m = 0; m < v.dim(); ++m)
    {
        prof.coords[m] = v.coord(m);
        switch (axis)
        {
        case Axis::x: prof.values[m] = v(m, a, b); break;
        case Axis::y: prof.values[m] = v(a, m, b); break;
        case Axis::z: prof.values[m] = v(a, b, m); break;
        }
    }
    return prof;
}

namespace detail {

inline void require_same_shape(const Volume& a, const Volume& b)
{
    if (a.dim() != b.dim())
        throw ShapeMismatch("volumes have different dimensions");
}

}  // namespace detail

/// RMS of (v - ref) over voxels whose center satisfies `in_region`.
template<class Pred>
double region_rms_error(const Volume& v, const Volume& ref, Pred&& in_region)
{
    detail::require_same_shape(v, ref);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < v.dim(); ++i)
        for (std::size_t j = 0; j < v.dim(); ++j)
            for (std::size_t k = 0; k < v.dim(); ++k)
                if (in_region(v.center(i, j, k)))
                {
                    const double d = v(i, j, k) - ref(i, j, k);
                    sum += d * d;
                    ++count;
                }
    if (count == 0)
        throw EmptyRegion("region_rms_error: region contains no voxels");
    return std::sqrt(sum / static_cast<double>(count));
}

/// Mean of v over voxels whose center satisfies `in_region`.
template<class Pred>
double region_mean(const Volume& v, Pred&& in_region, bool absolute = false)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < v.dim(); ++i)
        for (std::size_t j = 0; j < v.dim(); ++j)
            for (std::size_t k = 0; k < v.dim(); ++k)
                if (in_region(v.center(i, j, k)))
                {
                    sum += absolute ? std::abs(v(i, j, k)) : v(i, j, k);
                    ++count;
                }
    if (count == 0)
        throw EmptyRegion("region_mean: region contains no voxels");
    return sum / static_cast<double>(count);
}

/// Pearson correlation of two volumes over a region.
template<class Pred>
double correlation(const Volume& a, const Volume& b, Pred&& in_region)
{
    detail::require_same_shape(a, b);
    double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            for (std::size_t k = 0; k < a.dim(); ++k)
                if (in_region(a.center(i, j, k)))
                {
                    const double x = a(i, j, k);
                    const double y = b(i, j, k);
                    sa += x;
                    sb += y;
                    saa += x * x;
                    sbb += y * y;
                    sab += x * y;
                    ++n;
                }
    if (n == 0)
        throw EmptyRegion("correlation: region contains no voxels");
    const double nd = static_cast<double>(n);
    const double cov = sab - sa * sb / nd;
    const double va = saa - sa * sa / nd;
    const double vb = sbb - sb * sb / nd;
    if (va <= 0.0 || vb <= 0.0)
        return va == vb ? 1.0 : 0.0;
    return cov / std::sqrt(va * vb);
}

/// Trilinear interpolation between voxel centers, clamped at the faces.
inline double sample_trilinear(const Volume& v, const Vec3& x)
{
    const double h = v.spacing();
    const double last = static_cast<double>(v.dim() - 1);
    double idx[3];
    std::size_t base[3];
    double frac[3];
    for (int d = 0; d < 3; ++d)
    {
        idx[d] = std::clamp((x[d] + 1.0) / h - 0.5, 0.0, last);
        base[d] = std::min(static_cast<std::size_t>(idx[d]), v.dim() - 2);
        frac[d] = idx[d] - static_cast<double>(base[d]);
    }
    double sum = 0.0;
    for (int c = 0; c < 8; ++c)
    {
        const std::size_t di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
        const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1])
                       * (dk ? frac[2] : 1.0 - frac[2]);
        sum += w * v(base[0] + di, base[1] + dj, base[2] + dk);
    }
    return sum;
}

/**
 * Whether the edge element (x, n) can be seen from the active part of the
 * aperture: some integration sphere centered at an active transducer must be
 * tangent to the interface at x, i.e. its center lies on the line x + t n.
 * Each of the two points where that line leaves the unit ball is matched to
 * the nearest transducer (azimuth within pi / n_phi, polar angle within half
 * the local node gap).
 */
inline bool wavefront_visible(const Vec3& x, const Vec3& n, const ScanMask& mask, const TransducerGrid& grid)
{
    detail::require(dot(x, x) < 1.0, "wavefront_visible: point must lie inside the unit ball");
    detail::require(std::abs(norm(n) - 1.0) <= 1e-9, "wavefront_visible: normal must be a unit vector");
    const double xn = dot(x, n);
    const double disc = std::sqrt(xn * xn - dot(x, x) + 1.0);
    const auto& nodes = grid.theta_rule().nodes;
    for (const double t : {-xn - disc, -xn + disc})
    {
        const Vec3 p = x + n * t;
        double phi = std::atan2(p.y, p.x);
        if (phi < 0.0)
            phi += two_pi;
        const double theta = std::acos(std::clamp(p.z / norm(p), -1.0, 1.0));
        const double cells = phi / (two_pi / static_cast<double>(grid.n_phi()));
        const std::size_t i = static_cast<std::size_t>(std::llround(cells)) % grid.n_phi();
        const auto it = std::lower_bound(nodes.begin(), nodes.end(), theta);
        std::size_t j = static_cast<std::size_t>(it - nodes.begin());
        if (j == nodes.size() || (j > 0 && theta - nodes[j - 1] < nodes[j] - theta))
            j = j == 0 ? 0 : j - 1;
        if (mask.active(i, j))
            return true;
    }
    return false;
}

/// A point on an interface with its unit normal.
struct EdgeSample
{
    Vec3 point;
    Vec3 normal;
};

/// Surface point of an ellipsoid in the direction `dir` of its normalized
/// coordinates, with the outward unit normal there.
inline EdgeSample ellipsoid_surface_sample(const Ellipsoid& e, const Vec3& dir)
{
    const Vec3 w = normalized(dir);
    const Vec3 point = e.center + Vec3{e.semiaxes.x * w.x, e.semiaxes.y * w.y, e.semiaxes.z * w.z};
    const Vec3 normal = normalized({w.x / e.semiaxes.x, w.y / e.semiaxes.y, w.z / e.semiaxes.z});
    return {point, normal};
}

namespace detail {

struct SlopeScan
{
    double max_slope = 0.0;
    double offset = 0.0;  // signed distance along the normal of the steepest step
};

inline SlopeScan scan_normal(const Volume& v, const EdgeSample& s, double half_width)
{
    const double h = v.spacing();
    const auto steps = static_cast<long>(std::floor(half_width / h));
    SlopeScan best;
    double prev = sample_trilinear(v, s.point + s.normal * (-static_cast<double>(steps) * h));
    for (long m = -steps + 1; m <= steps; ++m)
    {
        const double t = static_cast<double>(m) * h;
        const double cur = sample_trilinear(v, s.point + s.normal * t);
        const double slope = std::abs(cur - prev) / h;
        if (slope > best.max_slope)
        {
            best.max_slope = slope;
            best.offset = t - 0.5 * h;
        }
        prev = cur;
    }
    return best;
}

}  // namespace detail

/// Steepest finite-difference slope along the normal segment of one sample.
inline double edge_slope(const Volume& v, const EdgeSample& s, double half_width)
{
    return detail::scan_normal(v, s, half_width).max_slope;
}

/// Signed offset (length units, along the normal) of the steepest step from
/// the sample point: the reconstructed edge location relative to the true one.
inline double edge_offset(const Volume& v, const EdgeSample& s, double half_width)
{
    return detail::scan_normal(v, s, half_width).offset;
}

/// Mean over samples of the steepest absolute slope of the volume along
/// each normal segment [-half_width, half_width], sampled trilinearly with
/// step = voxel spacing.
inline double edge_sharpness(const Volume& v, std::span<const EdgeSample> samples, double half_width)
{
    if (samples.empty())
        throw EmptyRegion("edge_sharpness: no interface samples");
    double sum = 0.0;
    for (const auto& s : samples)
        sum += edge_slope(v, s, half_width);
    return sum / static_cast<double>(samples.size());
}

namespace detail {

/// RMS error along the voxel column nearest (cx, cy), skipping voxels within
/// `guard` voxels of an interface of `ref` and voxels within `guard` voxels of
/// the unit sphere.
inline std::pair<double, std::size_t> column_rms(const Volume& v, const Volume& ref, double cx, double cy,
                                                 std::size_t guard)
{
    const std::size_t n = v.dim();
    const std::size_t ci = nearest_voxel(v, cx);
    const std::size_t cj = nearest_voxel(v, cy);
    const double limit = 1.0 - static_cast<double>(guard) * v.spacing();
    const auto lo = [&](std::size_t a) { return a >= guard ? a - guard : 0; };
    const auto hi = [&](std::size_t a) { return std::min(n - 1, a + guard); };

    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k)
    {
        if (norm(v.center(ci, cj, k)) > limit)
            continue;
        const double here = ref(ci, cj, k);
        bool near_interface = false;
        for (std::size_t a = lo(ci); a <= hi(ci) && !near_interface; ++a)
            for (std::size_t b = lo(cj); b <= hi(cj) && !near_interface; ++b)
                for (std::size_t c = lo(k); c <= hi(k); ++c)
                    if (ref(a, b, c) != here)
                    {
                        near_interface = true;
                        break;
                    }
        if (near_interface)
            continue;
        const double d = v(ci, cj, k) - here;
        sum += d * d;
        ++count;
    }
    return {count ? std::sqrt(sum / static_cast<double>(count)) : 0.0, count};
}

}  // namespace detail

inline constexpr std::size_t axis_noise_guard = 3;

/**
 * RMS error on the voxel column nearest the z-axis divided by the RMS error
 * on the column at x = y = 0.25. Voxels within three voxels of an interface
 * of `ref` (or of the unit sphere) are excluded from both. Returns 1 when
 * both errors vanish.
 */
inline double axis_noise_ratio(const Volume& v, const Volume& ref)
{
    detail::require_same_shape(v, ref);
    const auto [on_axis, n_on] = detail::column_rms(v, ref, 0.0, 0.0, axis_noise_guard);
    const auto [off_axis, n_off] = detail::column_rms(v, ref, 0.25, 0.25, axis_noise_guard);
    if (n_on == 0 || n_off == 0)
        throw EmptyRegion("axis_noise_ratio: no voxels left after interface exclusion");
    if (on_axis < 1e-14 && off_axis < 1e-14)
        return 1.0;
    if (off_axis == 0.0)
        return std::numeric_limits<double>::infinity();
    return on_axis / off_axis;
}

/// Mean |v - ref| in concentric shells [b w, (b + 1) w) around `center`
/// for shells entirely below `max_radius`; empty shells are reported as NaN.
inline std::vector<double> radial_binned_error(const Volume& v, const Volume& ref, const Vec3& center,
                                               double bin_width, double max_radius)
{
    detail::require_same_shape(v, ref);
    detail::require(bin_width > 0.0, "radial_binned_error: bin width must be positive");
    const auto bins = static_cast<std::size_t>(std::ceil(max_radius / bin_width - 1e-12));
    std::vector<double> sum(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    for (std::size_t i = 0; i < v.dim(); ++i)
        for (std::size_t j = 0; j < v.dim(); ++j)
            for (std::size_t k = 0; k < v.dim(); ++k)
            {
                const double d = distance(v.center(i, j, k), center);
                if (d >= max_radius)
                    continue;
                const auto b = std::min(bins - 1, static_cast<std::size_t>(d / bin_width));
                sum[b] += std::abs(v(i, j, k) - ref(i, j, k));
                ++count[b];
            }
    std::vector<double> out(bins);
    for (std::size_t b = 0; b < bins; ++b)
        out[b] = count[b] ? sum[b] / static_cast<double>(count[b]) : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace tat
