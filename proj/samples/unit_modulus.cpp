// Sweeps D_h = max |(|w_j| - 1)| over h for a random symmetric matrix and
// reports where each scheme stops behaving like a unitary map.
#include <cstdio>

#include "unisplit/unisplit.hpp"

int main() {
    using namespace unisplit;
    MatrixClassSpec spec;
    spec.cls = MatrixClass::SYM_SIMPLE;
    spec.seed = 1;
    const auto m = generate(spec);
    const auto grid = log_grid(1e-2, 10.0, 16);

    for (const char* name : {"S31", "S32", "S4", "NB5s4", "B5s4"}) {
        const auto sweep = dh_sweep(find_scheme(name), m.A, m.B, grid);
        std::printf("%-7s h* = %.4f\n", name, sweep.h_star);
        for (std::size_t i = 0; i < sweep.series.size(); ++i)
            std::printf("    h = %9.4f   D_h = %.3e\n", sweep.series.x()[i], sweep.series.row(i)[0]);
    }
}
