// Propagates a Gaussian in the Poschl-Teller well with a complex-coefficient
// scheme and prints mass and energy errors every 100 time units.
#include <cstdio>
#include <string>

#include "unisplit/unisplit.hpp"

int main(int argc, char** argv) {
    using namespace unisplit;
    const std::string name = argc > 1 ? argv[1] : "NB11s6";
    const auto& scheme = find_scheme(name);

    const SpectralGrid grid(256, -8.0, 8.0);
    const RealVector v = pt_potential(grid);
    const ComplexVector u0 = initial_gaussian(grid).values;
    const double h = 100.0 / 909.0;

    const auto run = spectral_conservation_run(scheme, grid, v, u0, h, 9090, 909);
    std::printf("%s, h = %.6f, %zu FFTs\n", scheme.name.c_str(), h, run.fft_count);
    std::printf("%8s %14s %14s\n", "t", "mass error", "energy error");
    for (std::size_t i = 0; i < run.series.size(); ++i)
        std::printf("%8.1f %14.3e %14.3e\n", run.series.x()[i], run.series.row(i)[0], run.series.row(i)[1]);
    return run.aborted_at ? 1 : 0;
}
