// Acceptance suite. Prints one PASS/FAIL line per criterion followed by the
// measured quantities, and exits nonzero if any criterion fails.
//
// Desk scale throughout: 100 x 50 x 100 (azimuth x polar x radius) sinograms
// reconstructed on 64^3 voxels.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <tat/tat.hpp>

using namespace tat;

namespace {

// Pinned tolerances.
constexpr double oracle_rel_tol = 1e-6;
constexpr double oracle_abs_tol = 1e-12;
constexpr double oracle_time_limit_s = 10.0;
constexpr double mc_sigma = 3.0;
constexpr std::size_t mc_samples = 1000000;
constexpr double mc_time_limit_s = 120.0;
constexpr double interior_band = 0.05;
constexpr double exterior_limit = 0.05;
constexpr double recon_time_limit_s = 600.0;
constexpr double correlation_min = 0.95;
constexpr double sharpness_ratio_min = 2.0;
constexpr double sharpness_factor = 2.0;
constexpr double edge_location_voxels = 2.0;
constexpr double axis_ratio_symmetric_min = 2.0;
constexpr double axis_ratio_asymmetric_max = 1.5;
constexpr double derivative_tol = 1e-10;
constexpr double laplacian_tol = 1e-9;
constexpr double gauss_tol = 1e-12;
constexpr double equivariance_tol = 1e-9;

constexpr std::size_t desk_phi = 100;
constexpr std::size_t desk_theta = 50;
constexpr std::size_t desk_r = 100;
constexpr std::size_t desk_dim = 64;
constexpr std::size_t erosion_voxels = 3;

const Ellipsoid fig8{{0.0, 0.2, -0.1}, {0.4, 0.3, 0.5}, 1.0};

struct Outcome
{
    bool pass = true;
    std::string detail;
};

class Report
{
  public:
    void run(int id, const std::string& name, const std::function<Outcome()>& body)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = body();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%d] %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs);
        if (!o.detail.empty())
            std::printf("%s", o.detail.c_str());
        std::fflush(stdout);
        failures_ += o.pass ? 0 : 1;
    }
    int failures() const { return failures_; }

  private:
    int failures_ = 0;
};

class Detail
{
  public:
    template<class... Args>
    void line(const char* fmt, Args... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        text_ += "    ";
        text_ += buf;
        text_ += "\n";
    }
    std::string str() const { return text_; }

  private:
    std::string text_;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_direction(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    return normalized({g(rng), g(rng), g(rng)});
}

ReconConfig desk_config(ReconMethod m)
{
    ReconConfig c;
    c.dim = desk_dim;
    c.method = m;
    return c;
}

const TransducerGrid& desk_grid()
{
    static const TransducerGrid g = make_transducer_grid(desk_phi, desk_theta);
    return g;
}

const RadialGrid desk_radial{desk_r};

// Shared data, computed on first use.
struct Shared
{
    Sinogram ball_sino;
    Volume ball_fbp;
    Sinogram defrise_sino;
    Volume defrise_fbp;
    bool ball_ready = false;
    bool defrise_ready = false;

    void need_ball()
    {
        if (ball_ready)
            return;
        ball_sino = simulate_analytic(ball_phantom({0, 0, 0}, 0.5), desk_grid(), desk_radial);
        ball_fbp = reconstruct_fbp(ball_sino, desk_config(ReconMethod::fbp));
        ball_ready = true;
    }
    void need_defrise()
    {
        if (defrise_ready)
            return;
        defrise_sino = simulate(defrise_phantom(), desk_grid(), desk_radial);
        defrise_fbp = reconstruct_fbp(defrise_sino, desk_config(ReconMethod::fbp));
        defrise_ready = true;
    }
};

Shared shared;

// --- 1 ----------------------------------------------------------------------

Outcome forward_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Vec3 c = random_direction(rng) * (0.3 * u01(rng));
    const double rho = 0.1 + 0.4 * u01(rng) * (1.0 - norm(c) - 0.1) / 0.6;
    const Ellipsoid ball{c, {rho, rho, rho}, 1.0};
    validate(ball);

    const ForwardProjector proj;
    double worst = 0.0;
    std::size_t nonzero = 0;
    for (int t = 0; t < 200; ++t)
    {
        const Vec3 p = random_direction(rng);
        const double d = distance(p, c);
        const double lo = std::max(1e-3, d - rho - 0.05);
        const double hi = std::min(2.0, d + rho + 0.05);
        const double r = lo + (hi - lo) * u01(rng);
        const double exact = ball_projection_analytic(c, rho, p, r);
        const double got = proj.project(ball, p, r);
        const double tol = oracle_rel_tol * 4 * pi * r * r + oracle_abs_tol;
        worst = std::max(worst, std::abs(got - exact) / tol);
        nonzero += exact > 0.0 ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    Detail d;
    d.line("ball center (%.3f, %.3f, %.3f), radius %.3f; %zu of 200 samples intersect", c.x, c.y, c.z, rho,
           nonzero);
    d.line("worst |error| / (1e-6 * 4 pi r^2 + 1e-12) = %.3g (must be <= 1)", worst);
    d.line("runtime %.2f s (limit %.0f s)", secs, oracle_time_limit_s);
    return {worst <= 1.0 && secs < oracle_time_limit_s, d.str()};
}

// --- 2 ----------------------------------------------------------------------

Outcome monte_carlo_check()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Phantom ph({fig8});
    const ForwardProjector proj;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t)
    {
        const Vec3 p = random_direction(rng);
        const SupportBounds b = support_bounds(fig8, p);
        const double r = b.r_min + (b.r_max - b.r_min) * u01(rng);
        const double exact = proj.project(fig8, p, r);
        const auto mc = monte_carlo_projection(ph, p, r, mc_samples, 1000 + t);
        worst = std::max(worst, std::abs(exact - mc.estimate) / mc.standard_error);
    }
    const double secs = seconds_since(t0);
    Detail d;
    d.line("max |quartic - monte carlo| / standard error over 20 pairs = %.3f (limit %.0f)", worst, mc_sigma);
    d.line("runtime %.1f s (limit %.0f s)", secs, mc_time_limit_s);
    return {worst <= mc_sigma && secs < mc_time_limit_s, d.str()};
}

// --- 3 ----------------------------------------------------------------------

Outcome exact_inversion()
{
    const auto t_sino = std::chrono::steady_clock::now();
    shared.need_ball();
    const double fbp_secs = seconds_since(t_sino);

    const double h = 2.0 / desk_dim;
    const double margin = erosion_voxels * h;
    const auto interior = [&](const Vec3& x) { return norm(x) < 0.5 - margin && std::hypot(x.x, x.y) > margin; };
    const auto exterior = [&](const Vec3& x) { return norm(x) > 0.5 + margin && norm(x) <= 1.0; };

    const auto t_rho = std::chrono::steady_clock::now();
    const Volume rho = reconstruct_rho_filtered(shared.ball_sino, desk_config(ReconMethod::rho));
    const double rho_secs = seconds_since(t_rho);

    Outcome o;
    Detail d;
    const auto check = [&](const char* name, const Volume& v, double secs) {
        const double in = region_mean(v, interior);
        const double out = region_mean(v, exterior, true);
        const bool ok = std::abs(in - 1.0) <= interior_band && out <= exterior_limit && secs < recon_time_limit_s;
        o.pass = o.pass && ok;
        d.line("%-3s interior mean %.4f (band 1 +- %.2f), exterior mean |v| %.4f (limit %.2f), %.1f s", name, in,
               interior_band, out, exterior_limit, secs);
    };
    check("fbp", shared.ball_fbp, fbp_secs);
    check("rho", rho, rho_secs);
    o.detail = d.str();
    return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome fbp_rho_agreement()
{
    shared.need_defrise();
    const Volume rho = reconstruct_rho_filtered(shared.defrise_sino, desk_config(ReconMethod::rho));
    const double c = correlation(shared.defrise_fbp, rho, [](const Vec3& x) { return norm(x) <= 1.0; });
    Detail d;
    d.line("voxelwise correlation of fbp and rho over the ROI = %.4f (min %.2f)", c, correlation_min);
    return {c >= correlation_min, d.str()};
}

// --- 5 ----------------------------------------------------------------------

// Points on the flat faces of every Defrise disk at x = +-0.25 and +-0.45
// (y = 0). Their normals are close to vertical, so the lines along them
// leave the ball near the poles on the same side of the yz-plane as the
// point itself.
std::vector<EdgeSample> defrise_face_samples(double sign_x)
{
    const Phantom defrise = defrise_phantom();
    std::vector<EdgeSample> out;
    for (const auto& e : defrise.ellipsoids())
        for (double x : {0.25, 0.45})
            for (double up : {1.0, -1.0})
            {
                const double wx = sign_x * x / e.semiaxes.x;
                out.push_back(ellipsoid_surface_sample(e, {wx, 0.0, up * std::sqrt(1.0 - wx * wx)}));
            }
    return out;
}

Outcome partial_scans()
{
    shared.need_defrise();
    const double h = 2.0 / desk_dim;
    const double half_width = 0.08;
    const auto east_pts = defrise_face_samples(1.0);
    const auto west_pts = defrise_face_samples(-1.0);

    const auto east_mask = make_mask(desk_grid(), ScanRegion::east);
    const auto south_mask = make_mask(desk_grid(), ScanRegion::south);
    const Volume east = reconstruct_fbp(apply_mask(shared.defrise_sino, east_mask), desk_config(ReconMethod::fbp));
    const Volume south = reconstruct_fbp(apply_mask(shared.defrise_sino, south_mask), desk_config(ReconMethod::fbp));

    Detail d;
    std::size_t predicted_east = 0, predicted_west = 0, predicted_south = 0;
    for (const auto& s : east_pts)
        predicted_east += wavefront_visible(s.point, s.normal, east_mask, desk_grid()) ? 1 : 0;
    for (const auto& s : west_pts)
        predicted_west += wavefront_visible(s.point, s.normal, east_mask, desk_grid()) ? 1 : 0;

    const double se = edge_sharpness(east, east_pts, half_width);
    const double sw = edge_sharpness(east, west_pts, half_width);
    const double ratio = sw > 0.0 ? se / sw : INFINITY;
    d.line("east mask: visible edge samples east %zu/%zu, west %zu/%zu", predicted_east, east_pts.size(),
           predicted_west, west_pts.size());
    d.line("east mask: sharpness east %.3f, west %.3f, ratio %.2f (min %.1f)", se, sw, ratio, sharpness_ratio_min);
    bool pass = ratio >= sharpness_ratio_min;

    std::vector<EdgeSample> all = east_pts;
    all.insert(all.end(), west_pts.begin(), west_pts.end());
    double worst_factor = 0.0, worst_offset = 0.0;
    Vec3 worst_point;
    for (const auto& s : all)
    {
        predicted_south += wavefront_visible(s.point, s.normal, south_mask, desk_grid()) ? 1 : 0;
        const double full_slope = edge_slope(shared.defrise_fbp, s, half_width);
        const double south_slope = edge_slope(south, s, half_width);
        const double factor = std::max(full_slope / south_slope, south_slope / full_slope);
        if (factor > worst_factor)
        {
            worst_factor = factor;
            worst_point = s.point;
        }
        worst_offset = std::max(worst_offset, std::abs(edge_offset(south, s, half_width)) / h);
    }
    d.line("south mask: visible edge samples %zu/%zu", predicted_south, all.size());
    d.line("south mask: worst sharpness factor vs full scan %.2f (max %.1f), worst edge offset %.2f voxels (max %.1f)",
           worst_factor, sharpness_factor, worst_offset, edge_location_voxels);
    d.line("south mask: worst sharpness factor at edge point (%.3f, %.3f, %.3f)", worst_point.x, worst_point.y,
           worst_point.z);
    pass = pass && worst_factor <= sharpness_factor && worst_offset <= edge_location_voxels;
    return {pass, d.str()};
}

// --- 6 ----------------------------------------------------------------------

Outcome approximate_backprojection()
{
    const double radius = 0.7;
    const double h = 2.0 / desk_dim;
    const Phantom ball = ball_phantom({0, 0, 0}, radius);
    const Sinogram s = simulate_analytic(ball, desk_grid(), desk_radial);
    const Volume approx = reconstruct_approx(s, desk_config(ReconMethod::approx));
    const Volume fbp = reconstruct_fbp(s, desk_config(ReconMethod::fbp));
    const Volume ref = voxelize(ball, desk_dim);

    // Six 0.1-wide shells out to 0.6, at least three voxels inside the edge.
    const auto bins = radial_binned_error(approx, ref, {0, 0, 0}, 0.1, 0.6);
    bool increasing = true;
    std::string row;
    for (std::size_t b = 0; b < bins.size(); ++b)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.4f", b ? ", " : "", bins[b]);
        row += buf;
        if (b > 0)
            increasing = increasing && bins[b] > bins[b - 1];
    }

    double worst_shift = 0.0;
    const double half_width = 0.15;
    for (const Vec3& dir : {Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, -1, 0}, Vec3{0, 0, 1},
                            Vec3{0, 0, -1}, Vec3{1, 1, 1}, Vec3{-1, 1, -1}, Vec3{1, -1, 0.5}, Vec3{-0.3, -1, -1}})
    {
        const EdgeSample e = ellipsoid_surface_sample(ball.ellipsoids()[0], dir);
        worst_shift = std::max(worst_shift, std::abs(edge_offset(approx, e, half_width) - edge_offset(fbp, e, half_width)) / h);
    }

    Detail d;
    d.line("mean |error| by 0.1-wide shell from the center: %s", row.c_str());
    d.line("strictly increasing: %s", increasing ? "yes" : "no");
    d.line("worst edge-location difference vs fbp %.2f voxels (max %.1f)", worst_shift, edge_location_voxels);
    return {increasing && worst_shift <= edge_location_voxels, d.str()};
}

// --- 7 ----------------------------------------------------------------------

Outcome axis_resonance()
{
    shared.need_ball();
    const double sym = axis_noise_ratio(shared.ball_fbp, voxelize(ball_phantom({0, 0, 0}, 0.5), desk_dim));

    const Phantom ph({fig8});
    const Sinogram s = simulate(ph, desk_grid(), desk_radial);
    const double asym = axis_noise_ratio(reconstruct_fbp(s, desk_config(ReconMethod::fbp)), voxelize(ph, desk_dim));

    Detail d;
    d.line("ball radius 0.5 at origin: axis noise ratio %.3f (min %.1f)", sym, axis_ratio_symmetric_min);
    d.line("ellipsoid (0,0.2,-0.1)/(0.4,0.3,0.5): axis noise ratio %.3f (max %.1f)", asym, axis_ratio_asymmetric_max);
    return {sym >= axis_ratio_symmetric_min && asym <= axis_ratio_asymmetric_max, d.str()};
}

// --- 8 ----------------------------------------------------------------------

Outcome kernel_exactness()
{
    Sinogram s(make_transducer_grid(4, 2), RadialGrid(100));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 100; ++k)
                s(i, j, k) = std::pow(s.radial().radius(k), 3);
    const Sinogram d2 = second_radial_derivative(s);
    double worst_d2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 1; k + 1 < 100; ++k)
            {
                const double exact = 6.0 * s.radial().radius(k);
                worst_d2 = std::max(worst_d2, std::abs(d2(i, j, k) - exact) / exact);
            }

    Volume q(32);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j)
            for (std::size_t k = 0; k < 32; ++k)
            {
                const Vec3 x = q.center(i, j, k);
                q(i, j, k) = 0.5 * x.x * x.x + 2.0 * x.y * x.y - x.z * x.z + 0.3 * x.x * x.y + x.z;
            }
    const Volume lq = discrete_laplacian(q);
    double worst_lap = 0.0;
    for (std::size_t i = 1; i < 31; ++i)
        for (std::size_t j = 1; j < 31; ++j)
            for (std::size_t k = 1; k < 31; ++k)
                worst_lap = std::max(worst_lap, std::abs(lq(i, j, k) - 3.0) / 3.0);

    double worst_gl = 0.0;
    for (std::size_t n = 1; n <= 20; ++n)
    {
        const double a = -0.4, b = 1.3;
        const auto rule = gauss_legendre(n, a, b);
        for (std::size_t k = 0; k <= 2 * n - 1; ++k)
        {
            const double exact = (std::pow(b, k + 1) - std::pow(a, k + 1)) / static_cast<double>(k + 1);
            const double got = rule.integrate([k](double t) { return std::pow(t, static_cast<double>(k)); });
            worst_gl = std::max(worst_gl, std::abs(got - exact) / std::abs(exact));
        }
    }

    Detail d;
    d.line("second radial difference on r^3: worst relative error %.2e (max %.0e)", worst_d2, derivative_tol);
    d.line("discrete Laplacian on a quadratic: worst relative error %.2e (max %.0e)", worst_lap, laplacian_tol);
    d.line("Gauss-Legendre n <= 20 on degree <= 2n-1 monomials: worst relative error %.2e (max %.0e)", worst_gl,
           gauss_tol);
    return {worst_d2 <= derivative_tol && worst_lap <= laplacian_tol && worst_gl <= gauss_tol, d.str()};
}

// --- 9 ----------------------------------------------------------------------

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t)
        m = std::max(m, std::abs(a[t] - b[t]));
    return m;
}

Outcome equivariance()
{
    const std::size_t n_phi = 16, n_theta = 9, n_r = 40, dim = 12, quarter = n_phi / 4;
    const auto grid = make_transducer_grid(n_phi, n_theta);
    const RadialGrid radial(n_r);
    Detail d;
    bool pass = true;

    // Forward: one-step azimuthal shift of a circular-section ellipsoid.
    const Ellipsoid round{{0.15, 0.2, -0.1}, {0.3, 0.3, 0.45}, 1.0};
    Ellipsoid round_rot = round;
    round_rot.center = rotate_z(round.center, two_pi / n_phi);
    const Sinogram a = simulate(Phantom({round}), grid, radial);
    const Sinogram b = simulate(Phantom({round_rot}), grid, radial);
    double fwd_shift = 0.0;
    for (std::size_t i = 0; i < n_phi; ++i)
        for (std::size_t j = 0; j < n_theta; ++j)
            for (std::size_t k = 0; k < n_r; ++k)
                fwd_shift = std::max(fwd_shift, std::abs(b((i + 1) % n_phi, j, k) - a(i, j, k)));

    // Forward: quarter turn of a general ellipsoid (semiaxes swap).
    const Ellipsoid turned{rotate_z(fig8.center, pi / 2), {fig8.semiaxes.y, fig8.semiaxes.x, fig8.semiaxes.z}, 1.0};
    const Sinogram e0 = simulate(Phantom({fig8}), grid, radial);
    const Sinogram e1 = simulate(Phantom({turned}), grid, radial);
    double fwd_quarter = 0.0;
    for (std::size_t i = 0; i < n_phi; ++i)
        for (std::size_t j = 0; j < n_theta; ++j)
            for (std::size_t k = 0; k < n_r; ++k)
                fwd_quarter = std::max(fwd_quarter, std::abs(e1((i + quarter) % n_phi, j, k) - e0(i, j, k)));

    // Forward: z-mirror.
    const Ellipsoid flipped{{fig8.center.x, fig8.center.y, -fig8.center.z}, fig8.semiaxes, 1.0};
    const Sinogram f1 = simulate(Phantom({flipped}), grid, radial);
    double fwd_mirror = 0.0;
    for (std::size_t i = 0; i < n_phi; ++i)
        for (std::size_t j = 0; j < n_theta; ++j)
            for (std::size_t k = 0; k < n_r; ++k)
                fwd_mirror = std::max(fwd_mirror, std::abs(f1(i, n_theta - 1 - j, k) - e0(i, j, k)));

    d.line("forward: azimuth step %.2e, quarter turn %.2e, z-mirror %.2e (max %.0e)", fwd_shift, fwd_quarter,
           fwd_mirror, equivariance_tol);
    pass = pass && fwd_shift <= equivariance_tol && fwd_quarter <= equivariance_tol && fwd_mirror <= equivariance_tol;

    // Recon: shift the fig-8 sinogram by a quarter turn and mirror it in z.
    Sinogram shifted = e0, mirrored = e0;
    for (std::size_t i = 0; i < n_phi; ++i)
        for (std::size_t j = 0; j < n_theta; ++j)
            for (std::size_t k = 0; k < n_r; ++k)
            {
                shifted((i + quarter) % n_phi, j, k) = e0(i, j, k);
                mirrored(i, n_theta - 1 - j, k) = e0(i, j, k);
            }
    for (auto m : {ReconMethod::fbp, ReconMethod::rho, ReconMethod::approx})
    {
        ReconConfig cfg;
        cfg.dim = dim;
        cfg.method = m;
        const Volume v = reconstruct(e0, cfg);
        const Volume vs = reconstruct(shifted, cfg);
        const Volume vm = reconstruct(mirrored, cfg);
        double rot = 0.0, mir = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                for (std::size_t k = 0; k < dim; ++k)
                {
                    rot = std::max(rot, std::abs(vs(dim - 1 - j, i, k) - v(i, j, k)));
                    mir = std::max(mir, std::abs(vm(i, j, dim - 1 - k) - v(i, j, k)));
                }
        d.line("recon %-6s: quarter turn %.2e, z-mirror %.2e (max %.0e)", std::string(to_string(m)).c_str(), rot,
               mir, equivariance_tol);
        pass = pass && rot <= equivariance_tol && mir <= equivariance_tol;
    }

    // File formats.
    Sinogram masked = apply_mask(e0, make_mask(grid, ScanRegion::east));
    const auto sino_bytes = encode_sinogram(masked);
    const Sinogram sino_back = decode_sinogram(sino_bytes);
    const bool sino_ok = sino_back == masked && encode_sinogram(sino_back) == sino_bytes;

    ReconConfig cfg;
    cfg.dim = dim;
    const Volume vol = reconstruct(e0, cfg);
    const auto vol_bytes = encode_volume(vol);
    const Volume vol_back = decode_volume(vol_bytes);
    bool vol_ok = encode_volume(vol_back) == vol_bytes;
    for (std::size_t t = 0; t < vol.data().size(); ++t)
        vol_ok = vol_ok && vol_back.data()[t] == static_cast<double>(static_cast<float>(vol.data()[t]));

    const Phantom defrise = defrise_phantom();
    const std::string json = phantom_to_json(defrise).dump();
    const Phantom ph_back = phantom_from_json(nlohmann::json::parse(json));
    const bool ph_ok = ph_back == defrise && phantom_to_json(ph_back).dump() == json;

    d.line("round trips: sinogram %s, volume %s, phantom %s", sino_ok ? "exact" : "MISMATCH",
           vol_ok ? "exact" : "MISMATCH", ph_ok ? "exact" : "MISMATCH");
    pass = pass && sino_ok && vol_ok && ph_ok;
    return {pass, d.str()};
}

}  // namespace

int main()
{
    Report r;
    r.run(1, "forward oracle agreement", forward_oracle);
    r.run(2, "Monte Carlo cross-check", monte_carlo_check);
    r.run(3, "exact inversion of a ball", exact_inversion);
    r.run(4, "fbp / rho agreement on Defrise", fbp_rho_agreement);
    r.run(5, "partial-scan edge visibility", partial_scans);
    r.run(6, "approximate backprojection behavior", approximate_backprojection);
    r.run(7, "axis resonance", axis_resonance);
    r.run(8, "numerical kernel exactness", kernel_exactness);
    r.run(9, "equivariance and file round trips", equivariance);
    std::printf("%d of 9 criteria failed\n", r.failures());
    return r.failures() == 0 ? 0 : 1;
}
