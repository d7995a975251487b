#pragma once

// Ellipsoid-sum phantoms, voxel volumes and the closed-form ball projector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "vec3.hpp"

namespace tat {

/// Axis-aligned solid ellipsoid with a constant amplitude.
struct Ellipsoid
{
    Vec3 center;
    Vec3 semiaxes{1.0, 1.0, 1.0};
    double amplitude = 1.0;

    /// Normalized quadratic form sum_d ((x_d - c_d) / e_d)^2; <= 1 inside.
    double level(const Vec3& x) const
    {
        const double u = (x.x - center.x) / semiaxes.x;
        const double v = (x.y - center.y) / semiaxes.y;
        const double w = (x.z - center.z) / semiaxes.z;
        return u * u + v * v + w * w;
    }

    bool contains(const Vec3& x) const { return level(x) <= 1.0; }

    double max_semiaxis() const { return std::max({semiaxes.x, semiaxes.y, semiaxes.z}); }

    /// Circular cross-section centered on the z-axis; projections from a
    /// transducer then depend only on its polar angle.
    bool is_z_axisymmetric() const
    {
        return center.x == 0.0 && center.y == 0.0 && semiaxes.x == semiaxes.y;
    }

    friend bool operator==(const Ellipsoid&, const Ellipsoid&) = default;
};

/**
 * Largest |x| over the ellipsoid. The farthest point is c + y with
 * y_d = e_d^2 c_d / (mu - e_d^2) for the multiplier mu > max(e_d^2) that
 * puts it on the surface. When c has no component along a longest axis the
 * multiplier sits at max(e_d^2) and the longest axes take up the slack.
 */
inline double farthest_radius(const Ellipsoid& e)
{
    const double c[3] = {e.center.x, e.center.y, e.center.z};
    const double e2[3] = {e.semiaxes.x * e.semiaxes.x, e.semiaxes.y * e.semiaxes.y,
                          e.semiaxes.z * e.semiaxes.z};
    const double emax = e.max_semiaxis();
    const double emax2 = emax * emax;
    const auto longest = [&](int d) { return e2[d] == emax2; };

    bool isolated = false;
    for (int d = 0; d < 3; ++d)
        isolated = isolated || (longest(d) && c[d] != 0.0);

    if (!isolated)
    {
        double used = 0.0;
        double dist2 = 0.0;
        for (int d = 0; d < 3; ++d)
        {
            if (longest(d))
                continue;
            const double y = e2[d] * c[d] / (emax2 - e2[d]);
            used += y * y / e2[d];
            dist2 += (c[d] + y) * (c[d] + y);
        }
        if (used <= 1.0)
            return std::sqrt(dist2 + emax2 * (1.0 - used));
    }

    // g(mu) = sum e_d^2 c_d^2 / (mu - e_d^2)^2 - 1 decreases on (emax^2, inf)
    // and is <= 0 at emax^2 + emax |c|.
    const auto g = [&](double mu) {
        double s = -1.0;
        for (int d = 0; d < 3; ++d)
        {
            const double q = std::sqrt(e2[d]) * c[d] / (mu - e2[d]);
            s += q * q;
        }
        return s;
    };
    double lo = emax2;
    double hi = emax2 + emax * norm(e.center);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);
    double dist2 = 0.0;
    for (int d = 0; d < 3; ++d)
    {
        const double x = c[d] + e2[d] * c[d] / (mu - e2[d]);
        dist2 += x * x;
    }
    return std::sqrt(dist2);
}

inline void validate(const Ellipsoid& e)
{
    const auto str = [&] {
        std::ostringstream os;
        os << "center (" << e.center.x << ", " << e.center.y << ", " << e.center.z << "), semiaxes ("
           << e.semiaxes.x << ", " << e.semiaxes.y << ", " << e.semiaxes.z << ")";
        return os.str();
    };
    if (!(e.semiaxes.x > 0.0 && e.semiaxes.y > 0.0 && e.semiaxes.z > 0.0))
        throw InvalidArgument("ellipsoid semiaxes must be positive: " + str());
    if (!std::isfinite(e.amplitude) || !std::isfinite(norm(e.center)))
        throw InvalidArgument("ellipsoid parameters must be finite: " + str());
    if (!(farthest_radius(e) < 1.0))
        throw InvalidArgument("ellipsoid not contained in the open unit ball: " + str());
}

/// Sum of ellipsoid indicator functions. Every member lies inside the open
/// unit ball.
class Phantom
{
  public:
    Phantom() = default;
    explicit Phantom(std::vector<Ellipsoid> ellipsoids) : ellipsoids_(std::move(ellipsoids))
    {
        for (const auto& e : ellipsoids_)
            validate(e);
    }

    void add(const Ellipsoid& e)
    {
        validate(e);
        ellipsoids_.push_back(e);
    }

    const std::vector<Ellipsoid>& ellipsoids() const { return ellipsoids_; }
    std::size_t size() const { return ellipsoids_.size(); }
    bool empty() const { return ellipsoids_.empty(); }

    friend bool operator==(const Phantom&, const Phantom&) = default;

  private:
    std::vector<Ellipsoid> ellipsoids_;
};

/// The five-disk Defrise phantom, numbered from the lowest.
inline Phantom defrise_phantom()
{
    return Phantom({
        {{0.0, 0.0, -0.64}, {0.65, 0.65, 0.08}, 1.0},
        {{0.0, 0.0, -0.32}, {0.85, 0.85, 0.08}, 1.0},
        {{0.0, 0.0, 0.0}, {0.9, 0.9, 0.08}, 1.0},
        {{0.0, 0.0, 0.32}, {0.85, 0.85, 0.08}, 1.0},
        {{0.0, 0.0, 0.64}, {0.65, 0.65, 0.08}, 1.0},
    });
}

/// A single solid ball, the simplest phantom with closed-form projections.
inline Phantom ball_phantom(const Vec3& center, double radius, double amplitude = 1.0)
{
    return Phantom({{center, {radius, radius, radius}, amplitude}});
}

inline double evaluate(const Phantom& phantom, const Vec3& x)
{
    double sum = 0.0;
    for (const auto& e : phantom.ellipsoids())
        if (e.contains(x))
            sum += e.amplitude;
    return sum;
}

/**
 * Scalar field on the isotropic voxel grid over [-1, 1]^3.
 *
 * Voxel (i, j, k) is centered at (-1 + (i + 1/2) h, -1 + (j + 1/2) h,
 * -1 + (k + 1/2) h) with h = 2 / dim; i runs along x, k along z and is the
 * fastest-varying index in storage.
 */
class Volume
{
  public:
    Volume() = default;
    explicit Volume(std::size_t dim, double fill = 0.0)
        : dim_(dim), spacing_(2.0 / static_cast<double>(dim)), data_(dim * dim * dim, fill)
    {
        detail::require(dim >= 1, "volume: dim must be >= 1");
    }

    std::size_t dim() const { return dim_; }
    double spacing() const { return spacing_; }
    static constexpr Vec3 origin() { return {-1.0, -1.0, -1.0}; }
    std::size_t size() const { return data_.size(); }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const
    {
        return (i * dim_ + j) * dim_ + k;
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const
    {
        return data_[index(i, j, k)];
    }

    /// Coordinate of voxel center index `i` along any axis.
    double coord(std::size_t i) const
    {
        return -1.0 + (static_cast<double>(i) + 0.5) * spacing_;
    }
    Vec3 center(std::size_t i, std::size_t j, std::size_t k) const
    {
        return {coord(i), coord(j), coord(k)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Volume&, const Volume&) = default;

  private:
    std::size_t dim_ = 0;
    double spacing_ = 0.0;
    std::vector<double> data_;
};

inline Volume voxelize(const Phantom& phantom, std::size_t dim)
{
    detail::require(dim >= 2, "voxelize: dim must be >= 2");
    Volume v(dim);
    parallel_for(dim, [&](std::size_t i) {
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < dim; ++k)
                v(i, j, k) = evaluate(phantom, v.center(i, j, k));
    });
    return v;
}

/**
 * Area of the sphere |x - p| = r that lies inside the ball of the given
 * center and radius, for a transducer p outside the ball.
 *
 * With d = |p - center| the result is (pi r / d)(radius^2 - (d - r)^2) for
 * d - radius < r < d + radius and zero otherwise, a cubic in r on its
 * support.
 */
inline double ball_projection_analytic(const Vec3& center, double radius, const Vec3& p, double r)
{
    detail::require(radius > 0.0, "ball_projection_analytic: radius must be positive");
    detail::require(r >= 0.0, "ball_projection_analytic: r must be non-negative");
    const double d = distance(p, center);
    if (!(d > radius))
        throw InvalidArgument("ball_projection_analytic: transducer must lie outside the ball");
    if (r <= d - radius || r >= d + radius)
        return 0.0;
    const double gap = d - r;
    return pi * r / d * (radius * radius - gap * gap);
}

/// Sum of analytic ball projections; every member must be a ball.
inline double phantom_projection_analytic(const Phantom& phantom, const Vec3& p, double r)
{
    double sum = 0.0;
    for (const auto& e : phantom.ellipsoids())
    {
        if (!(e.semiaxes.x == e.semiaxes.y && e.semiaxes.y == e.semiaxes.z))
            throw InvalidArgument("analytic projection requires a phantom made of balls");
        sum += e.amplitude * ball_projection_analytic(e.center, e.semiaxes.x, p, r);
    }
    return sum;
}

}  // namespace tat
