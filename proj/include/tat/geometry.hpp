#pragma once

// Quadrature rules and the discrete transducer aperture on the unit sphere.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vec3.hpp"

namespace tat {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Nodes and weights of an interpolatory rule on [a, b].
struct QuadratureRule
{
    double a = 0.0;
    double b = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template<class F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

/**
 * n-point Gauss-Legendre rule mapped affinely to [a, b].
 *
 * Nodes are found by Newton iteration on P_n starting from the Chebyshev-like
 * guesses cos(pi (i - 1/4) / (n + 1/2)), i = 1..n. The rule integrates polynomials of
 * degree <= 2n - 1 exactly. Nodes are returned in increasing order.
 */
inline QuadratureRule gauss_legendre(std::size_t n, double a, double b)
{
    detail::require(n >= 1, "gauss_legendre: n must be >= 1");
    detail::require(a < b, "gauss_legendre: requires a < b");

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const std::size_t m = (n + 1) / 2;
    const double nd = static_cast<double>(n);

    for (std::size_t i = 0; i < m; ++i)
    {
        // Root i of P_n, counted from the largest.
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k)
            {
                const double kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) from the standard recurrence.
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15)
                break;
        }
        // Recompute the derivative at the converged node.
        {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k)
            {
                const double kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);

        // Symmetric pair: -x goes to the low end, +x to the high end.
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = mid;
    return rule;
}

/// Periodic trapezoid rule: samples are uniform over one full period with no
/// duplicated endpoint.
inline double trapezoid_periodic(std::span<const double> samples, double period)
{
    if (samples.empty())
        throw InvalidArgument("trapezoid_periodic: no samples");
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    return period / static_cast<double>(samples.size()) * sum;
}

/**
 * Transducer positions on the unit sphere.
 *
 * Azimuths are uniform, phi_i = 2 pi i / n_phi. Polar angles are the
 * Gauss-Legendre nodes on [0, pi]. The surface weight of transducer (i, j)
 * carries the sin(theta) Jacobian explicitly:
 *   w(i, j) = (2 pi / n_phi) * theta_weight(j) * sin(theta_j).
 * Flat index of (i, j) is i * n_theta + j.
 */
class TransducerGrid
{
  public:
    TransducerGrid() = default;

    /// Builds the grid from an explicit polar rule (used when reading files).
    TransducerGrid(std::size_t n_phi, QuadratureRule theta_rule)
        : n_phi_(n_phi), theta_rule_(std::move(theta_rule))
    {
        detail::require(n_phi_ >= 4, "transducer grid: n_phi must be >= 4");
        detail::require(theta_rule_.size() >= 2, "transducer grid: n_theta must be >= 2");
        const std::size_t n_theta = theta_rule_.size();

        phi_.resize(n_phi_);
        for (std::size_t i = 0; i < n_phi_; ++i)
            phi_[i] = two_pi * static_cast<double>(i) / static_cast<double>(n_phi_);

        sin_theta_.resize(n_theta);
        cos_theta_.resize(n_theta);
        for (std::size_t j = 0; j < n_theta; ++j)
        {
            sin_theta_[j] = std::sin(theta_rule_.nodes[j]);
            cos_theta_[j] = std::cos(theta_rule_.nodes[j]);
        }

        positions_.resize(n_phi_ * n_theta);
        weights_.resize(n_phi_ * n_theta);
        const double dphi = two_pi / static_cast<double>(n_phi_);
        for (std::size_t i = 0; i < n_phi_; ++i)
        {
            const double c = std::cos(phi_[i]);
            const double s = std::sin(phi_[i]);
            for (std::size_t j = 0; j < n_theta; ++j)
            {
                positions_[i * n_theta + j] = {sin_theta_[j] * c, sin_theta_[j] * s, cos_theta_[j]};
                weights_[i * n_theta + j] = dphi * theta_rule_.weights[j] * sin_theta_[j];
            }
        }
    }

    std::size_t n_phi() const { return n_phi_; }
    std::size_t n_theta() const { return theta_rule_.size(); }
    std::size_t size() const { return positions_.size(); }

    const std::vector<double>& phi_values() const { return phi_; }
    const QuadratureRule& theta_rule() const { return theta_rule_; }
    double theta(std::size_t j) const { return theta_rule_.nodes[j]; }

    const Vec3& position(std::size_t i, std::size_t j) const
    {
        return positions_[i * n_theta() + j];
    }
    double weight(std::size_t i, std::size_t j) const { return weights_[i * n_theta() + j]; }

    std::span<const Vec3> positions() const { return positions_; }
    std::span<const double> weights() const { return weights_; }

    friend bool operator==(const TransducerGrid& a, const TransducerGrid& b)
    {
        return a.n_phi_ == b.n_phi_ && a.theta_rule_.nodes == b.theta_rule_.nodes
            && a.theta_rule_.weights == b.theta_rule_.weights;
    }

  private:
    std::size_t n_phi_ = 0;
    QuadratureRule theta_rule_;
    std::vector<double> phi_;
    std::vector<double> sin_theta_;
    std::vector<double> cos_theta_;
    std::vector<Vec3> positions_;
    std::vector<double> weights_;
};

inline TransducerGrid make_transducer_grid(std::size_t n_phi, std::size_t n_theta)
{
    detail::require(n_phi >= 4, "make_transducer_grid: n_phi must be >= 4");
    detail::require(n_theta >= 2, "make_transducer_grid: n_theta must be >= 2");
    return TransducerGrid(n_phi, gauss_legendre(n_theta, 0.0, pi));
}

/// Uniform radii r_k = k * r_max / (n_r - 1), k = 0 .. n_r - 1.
class RadialGrid
{
  public:
    RadialGrid() = default;
    RadialGrid(std::size_t n_r, double r_max = 2.0) : n_r_(n_r), r_max_(r_max)
    {
        detail::require(n_r >= 2, "radial grid: n_r must be >= 2");
        detail::require(r_max > 0.0 && std::isfinite(r_max), "radial grid: r_max must be positive");
        step_ = r_max_ / static_cast<double>(n_r_ - 1);
    }

    std::size_t size() const { return n_r_; }
    double r_max() const { return r_max_; }
    double step() const { return step_; }
    double radius(std::size_t k) const
    {
        return k + 1 == n_r_ ? r_max_ : static_cast<double>(k) * r_max_ / static_cast<double>(n_r_ - 1);
    }

    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

  private:
    std::size_t n_r_ = 0;
    double r_max_ = 2.0;
    double step_ = 0.0;
};

}  // namespace tat
