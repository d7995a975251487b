#pragma once

// Backprojection reconstructors for spherical-mean data on the unit sphere.
//
//   fbp:    f = -1/(8 pi^2) * sum_p w_p / |x - p| * (d^2/dr^2 Rf)(p, |x - p|)
//   rho:    f = -1/(8 pi^2) * Laplacian( sum_p w_p / |x - p| * Rf(p, |x - p|) )
//   approx: f = -1/(8 pi^2) * sum_p w_p * (d^2/dr^2 Rf)(p, |x - p|)
//
// The approximate form is FBP without the 1/|x - p| weight. It coincides
// with fbp at the origin, where |x - p| = 1 for every transducer, and its
// value error grows with |x|.
//
// w_p are the surface-quadrature weights of the transducer grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "phantom.hpp"
#include "sinogram.hpp"

namespace tat {

enum class ReconMethod
{
    fbp,
    rho,
    approx,
};

inline ReconMethod parse_recon_method(std::string_view name)
{
    if (name == "fbp")
        return ReconMethod::fbp;
    if (name == "rho")
        return ReconMethod::rho;
    if (name == "approx")
        return ReconMethod::approx;
    throw InvalidArgument("unknown reconstruction method '" + std::string(name)
                          + "' (expected fbp, rho or approx)");
}

inline std::string_view to_string(ReconMethod m)
{
    switch (m)
    {
    case ReconMethod::fbp: return "fbp";
    case ReconMethod::rho: return "rho";
    case ReconMethod::approx: return "approx";
    }
    return "fbp";
}

struct ReconConfig
{
    std::size_t dim = 64;
    ReconMethod method = ReconMethod::fbp;
    /// Only voxels with |x| <= roi_radius are reconstructed; the rest are 0.
    double roi_radius = 1.0;
};

inline void validate(const ReconConfig& cfg)
{
    detail::require(cfg.dim >= 8, "reconstruction: dim must be >= 8");
    detail::require(cfg.roi_radius > 0.0 && cfg.roi_radius <= 1.0,
                    "reconstruction: roi_radius must lie in (0, 1]");
}

inline constexpr double inversion_constant = -1.0 / (8.0 * pi * pi);

namespace detail {

/// Backprojection onto every voxel whose center satisfies |x| <= radius.
inline Volume backproject_within(const Sinogram& s, std::size_t dim, double radius, bool weighted)
{
    const TransducerGrid& grid = s.grid();

    // Active transducers in row-major (i, j) order.
    struct Source
    {
        double px, py, pz, w;
        const double* row;
    };
    std::vector<Source> sources;
    sources.reserve(grid.size());
    for (std::size_t i = 0; i < grid.n_phi(); ++i)
        for (std::size_t j = 0; j < grid.n_theta(); ++j)
        {
            if (!s.mask().active(i, j))
                continue;
            const Vec3& p = grid.position(i, j);
            sources.push_back({p.x, p.y, p.z, grid.weight(i, j), s.row(i, j).data()});
        }

    const std::size_t n_r = s.n_r();
    const double r_max = s.radial().r_max();
    const double inv_step = 1.0 / s.radial().step();
    const double radius2 = radius * radius;

    Volume v(dim);
    parallel_for(dim, [&](std::size_t i) {
        const double x = v.coord(i);
        for (std::size_t j = 0; j < dim; ++j)
        {
            const double y = v.coord(j);
            for (std::size_t k = 0; k < dim; ++k)
            {
                const double z = v.coord(k);
                if (x * x + y * y + z * z > radius2)
                    continue;
                double acc = 0.0;
                for (const Source& src : sources)
                {
                    const double dx = x - src.px;
                    const double dy = y - src.py;
                    const double dz = z - src.pz;
                    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
                    if (d > r_max)
                        continue;
                    if (d < 1e-12)
                        throw NumericalFailure("backproject: voxel center coincides with a transducer");
                    const double u = d * inv_step;
                    std::size_t kk = static_cast<std::size_t>(u);
                    double value;
                    if (kk + 1 >= n_r)
                        value = src.row[n_r - 1];
                    else
                    {
                        const double f = u - static_cast<double>(kk);
                        value = src.row[kk] + f * (src.row[kk + 1] - src.row[kk]);
                    }
                    acc += weighted ? src.w * value / d : src.w * value;
                }
                v(i, j, k) = acc;
            }
        }
    });
    return v;
}

inline void scale(Volume& v, double factor)
{
    for (double& x : v.data())
        x *= factor;
}

}  // namespace detail

/**
 * Sum over transducers of w_p W(x, p) Rf(p, |x - p|) at every voxel center
 * inside the ROI, with W = 1/|x - p| when `weighted` and 1 otherwise. Rf is
 * interpolated linearly in r. Inactive (masked) transducers contribute
 * nothing.
 */
inline Volume backproject(const Sinogram& s, const ReconConfig& cfg, bool weighted)
{
    validate(cfg);
    return detail::backproject_within(s, cfg.dim, cfg.roi_radius, weighted);
}

/// 7-point Laplacian with replicate padding at the faces of the grid.
inline Volume discrete_laplacian(const Volume& v)
{
    const std::size_t n = v.dim();
    detail::require(n >= 3, "discrete_laplacian: dim must be >= 3");
    const double inv_h2 = 1.0 / (v.spacing() * v.spacing());
    Volume out(n);
    const auto lo = [](std::size_t a) { return a == 0 ? a : a - 1; };
    const auto hi = [n](std::size_t a) { return a + 1 == n ? a : a + 1; };
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
            {
                const double sum = v(lo(i), j, k) + v(hi(i), j, k) + v(i, lo(j), k) + v(i, hi(j), k)
                                 + v(i, j, lo(k)) + v(i, j, hi(k));
                out(i, j, k) = (sum - 6.0 * v(i, j, k)) * inv_h2;
            }
    });
    return out;
}

/// Filtered backprojection: second radial difference, then weighted
/// backprojection.
inline Volume reconstruct_fbp(const Sinogram& s, const ReconConfig& cfg)
{
    validate(cfg);
    Volume v = detail::backproject_within(second_radial_derivative(s), cfg.dim, cfg.roi_radius, true);
    detail::scale(v, inversion_constant);
    return v;
}

namespace detail {

// Second difference along one axis at voxel a. `ok(b)` tells whether voxel
// b lies where the backprojection is valid. Falls back to a one-sided
// difference toward valid voxels, and to 0 if none is available.
template<class Get, class Ok>
double axis_second_difference(std::size_t a, std::size_t n, Get&& get, Ok&& ok)
{
    const bool lo = a >= 1 && ok(a - 1);
    const bool hi = a + 1 < n && ok(a + 1);
    if (lo && hi)
        return get(a - 1) - 2.0 * get(a) + get(a + 1);
    if (hi && a + 2 < n && ok(a + 2))
        return get(a) - 2.0 * get(a + 1) + get(a + 2);
    if (lo && a >= 2 && ok(a - 2))
        return get(a - 2) - 2.0 * get(a - 1) + get(a);
    return 0.0;
}

// The backprojection only carries the inversion identity inside the
// transducer sphere. It is evaluated on the ROI dilated by a few voxels and
// clipped to |x| <= 1; stencils that would leave that region switch to
// one-sided differences.
inline Volume laplacian_of_backprojection(const Sinogram& s, const ReconConfig& cfg)
{
    validate(cfg);
    const std::size_t n = cfg.dim;
    const double margin = 2.0 * std::sqrt(3.0) * 2.0 / static_cast<double>(n);
    const double reach = std::min(cfg.roi_radius + margin, 1.0);
    const Volume b = backproject_within(s, n, reach, true);
    const double reach2 = reach * reach;
    const double roi2 = cfg.roi_radius * cfg.roi_radius;
    const double inv_h2 = 1.0 / (b.spacing() * b.spacing());
    const auto inside = [&](std::size_t i, std::size_t j, std::size_t k) {
        const Vec3 c = b.center(i, j, k);
        return dot(c, c) <= reach2;
    };

    Volume v(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
            {
                const Vec3 c = v.center(i, j, k);
                if (dot(c, c) > roi2)
                    continue;
                const double dxx = axis_second_difference(
                    i, n, [&](std::size_t a) { return b(a, j, k); }, [&](std::size_t a) { return inside(a, j, k); });
                const double dyy = axis_second_difference(
                    j, n, [&](std::size_t a) { return b(i, a, k); }, [&](std::size_t a) { return inside(i, a, k); });
                const double dzz = axis_second_difference(
                    k, n, [&](std::size_t a) { return b(i, j, a); }, [&](std::size_t a) { return inside(i, j, a); });
                v(i, j, k) = inversion_constant * (dxx + dyy + dzz) * inv_h2;
            }
    });
    return v;
}

}  // namespace detail

/// Weighted backprojection of the raw data followed by the Laplacian.
inline Volume reconstruct_rho_filtered(const Sinogram& s, const ReconConfig& cfg)
{
    return detail::laplacian_of_backprojection(s, cfg);
}

/// Historical approximation: filtered backprojection without the
/// 1/|x - p| weight.
inline Volume reconstruct_approx(const Sinogram& s, const ReconConfig& cfg)
{
    validate(cfg);
    Volume v = detail::backproject_within(second_radial_derivative(s), cfg.dim, cfg.roi_radius, false);
    detail::scale(v, inversion_constant);
    return v;
}

inline Volume reconstruct(const Sinogram& s, const ReconConfig& cfg)
{
    switch (cfg.method)
    {
    case ReconMethod::fbp: return reconstruct_fbp(s, cfg);
    case ReconMethod::rho: return reconstruct_rho_filtered(s, cfg);
    case ReconMethod::approx: return reconstruct_approx(s, cfg);
    }
    throw InvalidArgument("reconstruct: unknown method");
}

}  // namespace tat
