// Simulates a small ball phantom, reconstructs it with filtered
// backprojection and prints the center profile.

#include <cstdio>

#include <tat/tat.hpp>

int main()
{
    const tat::Phantom ball = tat::ball_phantom({0.0, 0.0, 0.0}, 0.5);
    const tat::TransducerGrid grid = tat::make_transducer_grid(64, 32);
    const tat::RadialGrid radial(64);

    const tat::Sinogram s = tat::simulate(ball, grid, radial);

    tat::ReconConfig cfg;
    cfg.dim = 32;
    cfg.method = tat::ReconMethod::fbp;
    const tat::Volume v = tat::reconstruct(s, cfg);

    const tat::LineProfile prof = tat::extract_profile(v, tat::Axis::z, 0.0, 0.0);
    std::printf("%s", tat::profile_csv(prof).c_str());
    return 0;
}
