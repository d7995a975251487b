#pragma once

// Projection data Rf(p, r) on (azimuth, polar, radius), radial filtering and
// partial-scan masking.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace tat {

/// Per-transducer availability, flat index i * n_theta + j.
class ScanMask
{
  public:
    ScanMask() = default;
    ScanMask(std::size_t n_phi, std::size_t n_theta, bool value = true)
        : n_phi_(n_phi), n_theta_(n_theta), active_(n_phi * n_theta, value ? 1 : 0)
    {
    }
    ScanMask(std::size_t n_phi, std::size_t n_theta, std::vector<std::uint8_t> active)
        : n_phi_(n_phi), n_theta_(n_theta), active_(std::move(active))
    {
        if (active_.size() != n_phi_ * n_theta_)
            throw ShapeMismatch("scan mask: size does not match the grid");
        for (auto& a : active_)
            a = a ? 1 : 0;
    }

    std::size_t n_phi() const { return n_phi_; }
    std::size_t n_theta() const { return n_theta_; }
    bool active(std::size_t i, std::size_t j) const { return active_[i * n_theta_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value) { active_[i * n_theta_ + j] = value ? 1 : 0; }
    const std::vector<std::uint8_t>& flags() const { return active_; }

    std::size_t count_active() const
    {
        std::size_t n = 0;
        for (auto a : active_)
            n += a;
        return n;
    }

    friend bool operator==(const ScanMask&, const ScanMask&) = default;

  private:
    std::size_t n_phi_ = 0;
    std::size_t n_theta_ = 0;
    std::vector<std::uint8_t> active_;
};

/**
 * Sampled spherical Radon data.
 *
 * data(i, j, k) is the sphere-surface integral for transducer (i, j) of the
 * grid and radius k of the radial grid; k varies fastest, then j, then i.
 */
class Sinogram
{
  public:
    Sinogram() = default;
    Sinogram(TransducerGrid grid, RadialGrid radial)
        : grid_(std::move(grid)),
          radial_(radial),
          data_(grid_.size() * radial_.size(), 0.0),
          mask_(grid_.n_phi(), grid_.n_theta(), true)
    {
    }

    const TransducerGrid& grid() const { return grid_; }
    const RadialGrid& radial() const { return radial_; }
    const ScanMask& mask() const { return mask_; }
    void set_mask(ScanMask m)
    {
        if (m.n_phi() != grid_.n_phi() || m.n_theta() != grid_.n_theta())
            throw ShapeMismatch("sinogram: mask shape does not match the transducer grid");
        mask_ = std::move(m);
    }

    std::size_t n_phi() const { return grid_.n_phi(); }
    std::size_t n_theta() const { return grid_.n_theta(); }
    std::size_t n_r() const { return radial_.size(); }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const
    {
        return (i * n_theta() + j) * n_r() + k;
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const
    {
        return data_[index(i, j, k)];
    }

    /// Radial samples of one transducer.
    std::span<double> row(std::size_t i, std::size_t j)
    {
        return {data_.data() + index(i, j, 0), n_r()};
    }
    std::span<const double> row(std::size_t i, std::size_t j) const
    {
        return {data_.data() + index(i, j, 0), n_r()};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Sinogram& a, const Sinogram& b)
    {
        return a.grid_ == b.grid_ && a.radial_ == b.radial_ && a.data_ == b.data_ && a.mask_ == b.mask_;
    }

  private:
    TransducerGrid grid_;
    RadialGrid radial_;
    std::vector<double> data_;
    ScanMask mask_;
};

/// Centered second difference in r with zero padding at both radial ends.
inline Sinogram second_radial_derivative(const Sinogram& s)
{
    const std::size_t n_r = s.n_r();
    detail::require(n_r >= 3, "second_radial_derivative: n_r must be >= 3");
    const double inv_h2 = 1.0 / (s.radial().step() * s.radial().step());

    Sinogram out = s;
    parallel_for(s.n_phi() * s.n_theta(), [&](std::size_t t) {
        const std::size_t i = t / s.n_theta();
        const std::size_t j = t % s.n_theta();
        const auto in = s.row(i, j);
        auto dst = out.row(i, j);
        for (std::size_t k = 0; k < n_r; ++k)
        {
            const double lo = k > 0 ? in[k - 1] : 0.0;
            const double hi = k + 1 < n_r ? in[k + 1] : 0.0;
            dst[k] = (lo - 2.0 * in[k] + hi) * inv_h2;
        }
    });
    return out;
}

/// Linear interpolation in r of one transducer's data; zero outside
/// [0, r_max].
inline double sample_radial(std::span<const double> row, double step, double r_max, double r)
{
    if (!(r >= 0.0) || r > r_max)
        return 0.0;
    const double u = r / step;
    const std::size_t n = row.size();
    // Radii that are grid nodes return the stored sample exactly.
    const auto nearest = static_cast<std::size_t>(std::llround(u));
    if (nearest < n)
    {
        const double node = nearest + 1 == n ? r_max
                                             : static_cast<double>(nearest) * r_max / static_cast<double>(n - 1);
        if (r == node)
            return row[nearest];
    }
    std::size_t k = static_cast<std::size_t>(u);
    if (k + 1 >= n)
        return row[n - 1];
    const double f = u - static_cast<double>(k);
    return row[k] + f * (row[k + 1] - row[k]);
}

inline double sample_radial(const Sinogram& s, std::size_t i, std::size_t j, double r)
{
    return sample_radial(s.row(i, j), s.radial().step(), s.radial().r_max(), r);
}

enum class ScanRegion
{
    full,
    east,
    west,
    south,
    north,
};

inline ScanRegion parse_scan_region(std::string_view name)
{
    if (name == "full")
        return ScanRegion::full;
    if (name == "east")
        return ScanRegion::east;
    if (name == "west")
        return ScanRegion::west;
    if (name == "south")
        return ScanRegion::south;
    if (name == "north")
        return ScanRegion::north;
    throw InvalidArgument("unknown scan region '" + std::string(name)
                          + "' (expected full, east, west, south or north)");
}

inline std::string_view to_string(ScanRegion r)
{
    switch (r)
    {
    case ScanRegion::full: return "full";
    case ScanRegion::east: return "east";
    case ScanRegion::west: return "west";
    case ScanRegion::south: return "south";
    case ScanRegion::north: return "north";
    }
    return "full";
}

namespace detail {

// East is the positive-x half: cos(phi) > 0. The two azimuths with
// cos(phi) = 0 exactly are split half-open, phi = 3 pi / 2 east and
// phi = pi / 2 west, so east and west each get n_phi / 2 azimuths whenever
// n_phi is a multiple of 4.
inline bool is_east(std::size_t i, std::size_t n_phi, double phi)
{
    if (4 * i == n_phi)
        return false;
    if (4 * i == 3 * n_phi)
        return true;
    return std::cos(phi) > 0.0;
}

// South is theta > pi / 2 (negative z). A node exactly at the equator (odd
// n_theta) counts as north.
inline bool is_south(std::size_t j, std::size_t n_theta, double theta)
{
    if (2 * j + 1 == n_theta)
        return false;
    return theta > 0.5 * pi;
}

}  // namespace detail

inline ScanMask make_mask(const TransducerGrid& grid, ScanRegion region)
{
    ScanMask m(grid.n_phi(), grid.n_theta(), true);
    if (region == ScanRegion::full)
        return m;
    for (std::size_t i = 0; i < grid.n_phi(); ++i)
    {
        const bool east = detail::is_east(i, grid.n_phi(), grid.phi_values()[i]);
        for (std::size_t j = 0; j < grid.n_theta(); ++j)
        {
            const bool south = detail::is_south(j, grid.n_theta(), grid.theta(j));
            bool on = true;
            switch (region)
            {
            case ScanRegion::east: on = east; break;
            case ScanRegion::west: on = !east; break;
            case ScanRegion::south: on = south; break;
            case ScanRegion::north: on = !south; break;
            case ScanRegion::full: break;
            }
            m.set(i, j, on);
        }
    }
    return m;
}

/// Zero-fills the data of inactive transducers and stores the mask.
inline Sinogram apply_mask(const Sinogram& s, const ScanMask& m)
{
    if (m.n_phi() != s.n_phi() || m.n_theta() != s.n_theta())
        throw ShapeMismatch("apply_mask: mask shape does not match the sinogram");
    Sinogram out = s;
    for (std::size_t i = 0; i < s.n_phi(); ++i)
        for (std::size_t j = 0; j < s.n_theta(); ++j)
            if (!m.active(i, j))
                for (double& v : out.row(i, j))
                    v = 0.0;
    out.set_mask(m);
    return out;
}

}  // namespace tat
