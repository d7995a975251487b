// Command-line driver: simulate, mask, reconstruct, profile, slice, report,
// oracle. Failures print one line to stderr and exit nonzero.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <tat/tat.hpp>

namespace {

using namespace tat;

constexpr int exit_failure = 1;
constexpr int exit_oracle_mismatch = 2;

struct Options
{
    std::size_t threads = 0;
    bool quiet = false;

    // simulate
    std::string phantom = "defrise";
    std::size_t n_phi = 400;
    std::size_t n_theta = 200;
    std::size_t n_r = 200;
    double r_max = 2.0;
    std::string projector = "quartic";

    // shared paths
    std::string in;
    std::string out;
    std::string ref;

    // mask
    std::string region = "full";

    // reconstruct
    std::string method = "fbp";
    std::size_t dim = 64;
    double roi = 1.0;

    // profile / slice
    std::string axis = "z";
    std::vector<double> at;

    // report
    std::string report_phantom = "none";

    // oracle
    std::string oracle_phantom = "ellipsoid:0,0.2,-0.1,0.4,0.3,0.5";
    std::size_t trials = 20;
    std::size_t samples = 1000000;
    std::uint64_t seed = 1;
    double max_z = 4.0;
};

void log(const Options& o, const std::string& line)
{
    if (!o.quiet)
        std::cerr << line << '\n';
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text << std::flush;
    else
        detail::write_text(path, text);
}

int run_simulate(const Options& o)
{
    const Phantom ph = parse_phantom_spec(o.phantom);
    const TransducerGrid grid = make_transducer_grid(o.n_phi, o.n_theta);
    const RadialGrid radial(o.n_r, o.r_max);
    log(o, "simulate: " + std::to_string(ph.size()) + " ellipsoid(s), " + std::to_string(o.n_phi) + "x"
               + std::to_string(o.n_theta) + " transducers, " + std::to_string(o.n_r) + " radii");

    Sinogram s;
    if (o.projector == "analytic")
        s = simulate_analytic(ph, grid, radial);
    else if (o.projector == "quartic")
    {
        std::size_t last_pct = 0;
        s = simulate(ph, grid, radial, {}, [&](std::size_t done, std::size_t total) {
            const std::size_t pct = done * 100 / total;
            if (pct >= last_pct + 10 || done == total)
            {
                last_pct = pct;
                log(o, "  " + std::to_string(done) + "/" + std::to_string(total) + " transducers");
            }
        });
    }
    else
        throw InvalidArgument("unknown projector '" + o.projector + "' (expected quartic or analytic)");

    write_sinogram(o.out, s);
    log(o, "wrote " + o.out);
    return 0;
}

int run_mask(const Options& o)
{
    const Sinogram s = read_sinogram(o.in);
    const ScanRegion region = parse_scan_region(o.region);
    const ScanMask m = make_mask(s.grid(), region);
    write_sinogram(o.out, apply_mask(s, m));
    log(o, "mask " + std::string(to_string(region)) + ": " + std::to_string(m.count_active()) + " of "
               + std::to_string(s.grid().size()) + " transducers active; wrote " + o.out);
    return 0;
}

int run_reconstruct(const Options& o)
{
    const Sinogram s = read_sinogram(o.in);
    ReconConfig cfg;
    cfg.dim = o.dim;
    cfg.method = parse_recon_method(o.method);
    cfg.roi_radius = o.roi;
    log(o, "reconstruct: method " + o.method + ", dim " + std::to_string(o.dim));
    write_volume(o.out, reconstruct(s, cfg));
    log(o, "wrote " + o.out);
    return 0;
}

int run_profile(const Options& o)
{
    if (o.at.size() != 2)
        throw InvalidArgument("profile: --at needs the two fixed coordinates, e.g. --at 0,0.4");
    const Volume v = read_volume(o.in);
    write_output(o.out, profile_csv(extract_profile(v, parse_axis(o.axis), o.at[0], o.at[1])));
    return 0;
}

int run_slice(const Options& o)
{
    if (o.at.size() != 1)
        throw InvalidArgument("slice: --at needs one plane coordinate");
    const Volume v = read_volume(o.in);
    const Slice sl = extract_slice(v, parse_axis(o.axis), o.at[0]);
    const std::string pgm = slice_pgm(sl);
    detail::write_text(o.out, pgm);
    const auto [lo, hi] = std::minmax_element(sl.values.begin(), sl.values.end());
    log(o, "slice window [" + format_g9(*lo) + ", " + format_g9(*hi) + "] -> [0, 255]; wrote " + o.out);
    return 0;
}

nlohmann::json finite_or_null(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

int run_report(const Options& o)
{
    const Volume v = read_volume(o.in);
    const double roi2 = o.roi * o.roi;
    const auto in_roi = [roi2](const Vec3& c) { return dot(c, c) <= roi2; };

    nlohmann::json report;
    report["dim"] = v.dim();
    const auto [lo, hi] = std::minmax_element(v.data().begin(), v.data().end());
    report["min"] = *lo;
    report["max"] = *hi;
    report["mean"] = region_mean(v, in_roi);

    std::optional<Volume> ref;
    if (!o.ref.empty())
        ref = read_volume(o.ref);
    else if (o.report_phantom != "none")
        ref = voxelize(parse_phantom_spec(o.report_phantom), v.dim());

    if (ref)
    {
        if (ref->dim() != v.dim())
            throw ShapeMismatch("report: reference volume has dim " + std::to_string(ref->dim()) + ", expected "
                                + std::to_string(v.dim()));
        double max_abs = 0.0;
        for (std::size_t t = 0; t < v.data().size(); ++t)
            if (in_roi(v.center(t / (v.dim() * v.dim()), (t / v.dim()) % v.dim(), t % v.dim())))
                max_abs = std::max(max_abs, std::abs(v.data()[t] - ref->data()[t]));
        report["rms_error"] = region_rms_error(v, *ref, in_roi);
        report["max_abs_error"] = max_abs;
        report["correlation"] = correlation(v, *ref, in_roi);
        try
        {
            report["axis_noise_ratio"] = finite_or_null(axis_noise_ratio(v, *ref));
        }
        catch (const EmptyRegion&)
        {
            report["axis_noise_ratio"] = nullptr;
        }
    }
    write_output(o.out, report.dump(2) + "\n");
    return 0;
}

int run_oracle(const Options& o)
{
    const Phantom ph = parse_phantom_spec(o.oracle_phantom);
    if (ph.empty())
        throw InvalidArgument("oracle: phantom is empty");
    const ForwardProjector proj;
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> gauss;

    std::string csv = "trial,px,py,pz,r,quartic,monte_carlo,standard_error,z\n";
    double worst = 0.0;
    for (std::size_t t = 0; t < o.trials; ++t)
    {
        const Vec3 p = normalized({gauss(rng), gauss(rng), gauss(rng)});
        double r_lo = std::numeric_limits<double>::infinity();
        double r_hi = 0.0;
        for (const auto& e : ph.ellipsoids())
        {
            const SupportBounds b = support_bounds(e, p);
            r_lo = std::min(r_lo, b.r_min);
            r_hi = std::max(r_hi, b.r_max);
        }
        const double r = std::uniform_real_distribution<double>(r_lo, r_hi)(rng);
        const double exact = project_phantom(ph, p, r, proj);
        const auto mc = monte_carlo_projection(ph, p, r, o.samples, rng());
        const double z = mc.standard_error > 0.0 ? (exact - mc.estimate) / mc.standard_error : 0.0;
        worst = std::max(worst, std::abs(z));
        csv += std::to_string(t) + "," + format_g9(p.x) + "," + format_g9(p.y) + "," + format_g9(p.z) + ","
             + format_g9(r) + "," + format_g9(exact) + "," + format_g9(mc.estimate) + ","
             + format_g9(mc.standard_error) + "," + format_g9(z) + "\n";
    }
    write_output(o.out, csv);
    if (worst > o.max_z)
    {
        std::cerr << "tat: oracle mismatch: max |z| = " << format_g9(worst) << " exceeds " << format_g9(o.max_z)
                  << '\n';
        return exit_oracle_mismatch;
    }
    log(o, "oracle: max |z| = " + format_g9(worst) + " over " + std::to_string(o.trials) + " trials");
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    Options o;
    CLI::App app{"Thermoacoustic tomography simulator and reconstructor"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    app.add_flag("-q,--quiet", o.quiet, "Suppress progress messages");

    const auto grid_range = CLI::Range(std::size_t{4}, std::size_t{4096});

    auto* sim = app.add_subcommand("simulate", "Project a phantom onto a spherical aperture");
    sim->add_option("--phantom", o.phantom, "defrise | empty | ball:cx,cy,cz,r | ellipsoid:... | file.json");
    sim->add_option("--nphi", o.n_phi, "Azimuthal transducer count")->check(grid_range);
    sim->add_option("--ntheta", o.n_theta, "Polar transducer count")->check(grid_range);
    sim->add_option("--nr", o.n_r, "Radial sample count")->check(grid_range);
    sim->add_option("--rmax", o.r_max, "Largest integration radius")->check(CLI::PositiveNumber);
    sim->add_option("--projector", o.projector, "quartic | analytic (balls only)")
        ->check(CLI::IsMember({"quartic", "analytic"}));
    sim->add_option("--out", o.out, "Output sinogram")->required();

    auto* mask = app.add_subcommand("mask", "Zero-fill a partial scan");
    mask->add_option("--in", o.in, "Input sinogram")->required();
    mask->add_option("--region", o.region, "full | east | west | south | north");
    mask->add_option("--out", o.out, "Output sinogram")->required();

    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a volume from a sinogram");
    rec->add_option("--in", o.in, "Input sinogram")->required();
    rec->add_option("--method", o.method, "fbp | rho | approx");
    rec->add_option("--dim", o.dim, "Voxels per axis")->check(CLI::Range(std::size_t{8}, std::size_t{1024}));
    rec->add_option("--roi", o.roi, "Radius of the reconstructed ball")->check(CLI::Range(1e-9, 1.0));
    rec->add_option("--out", o.out, "Output volume")->required();

    auto* prof = app.add_subcommand("profile", "Write a line profile as CSV");
    prof->add_option("--in", o.in, "Input volume")->required();
    prof->add_option("--axis", o.axis, "Profile direction x | y | z");
    prof->add_option("--at", o.at, "The two fixed coordinates, e.g. 0,0.4")->delimiter(',')->required();
    prof->add_option("--out", o.out, "Output CSV (default stdout)");

    auto* slice = app.add_subcommand("slice", "Write a plane slice as an 8-bit PGM");
    slice->add_option("--in", o.in, "Input volume")->required();
    slice->add_option("--axis", o.axis, "Plane normal x | y | z");
    slice->add_option("--at", o.at, "Plane coordinate")->expected(1)->required();
    slice->add_option("--out", o.out, "Output PGM")->required();

    auto* rep = app.add_subcommand("report", "Write volume metrics as JSON");
    rep->add_option("--in", o.in, "Input volume")->required();
    auto* ref_opt = rep->add_option("--ref", o.ref, "Reference volume");
    rep->add_option("--phantom", o.report_phantom, "Reference phantom, voxelized at the volume's dim ('none' to skip)")
        ->excludes(ref_opt);
    rep->add_option("--roi", o.roi, "Radius of the evaluated ball")->check(CLI::Range(1e-9, 1.0));
    rep->add_option("--out", o.out, "Output JSON (default stdout)");

    auto* orc = app.add_subcommand("oracle", "Monte Carlo spot-check of the forward projector");
    orc->add_option("--phantom", o.oracle_phantom, "Phantom spec");
    orc->add_option("--trials", o.trials, "Random (p, r) pairs")->check(CLI::PositiveNumber);
    orc->add_option("--samples", o.samples, "Monte Carlo samples per pair")
        ->check(CLI::Range(std::size_t{1000}, std::numeric_limits<std::size_t>::max()));
    orc->add_option("--seed", o.seed, "Random seed");
    orc->add_option("--max-z", o.max_z, "Fail when any |z| exceeds this")->check(CLI::PositiveNumber);
    orc->add_option("--out", o.out, "Output CSV (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        std::cerr << "tat: " << e.what() << '\n';
        return e.get_exit_code() != 0 ? e.get_exit_code() : exit_failure;
    }

    try
    {
        worker_count() = o.threads;
        if (*sim)
            return run_simulate(o);
        if (*mask)
            return run_mask(o);
        if (*rec)
            return run_reconstruct(o);
        if (*prof)
            return run_profile(o);
        if (*slice)
            return run_slice(o);
        if (*rep)
            return run_report(o);
        if (*orc)
            return run_oracle(o);
    }
    catch (const std::exception& e)
    {
        std::cerr << "tat: error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_failure;
}
