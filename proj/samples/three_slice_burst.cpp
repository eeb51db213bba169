// Burst from a three-slice stack cut at the coherence zeros.
#include <cstdio>

#include "superrad/cascade.hpp"

int main() {
    using namespace superrad;
    const double tp = 3.67, gamma = 0.01;  // units of 1/b1
    const auto dec = domain_boundaries(30.0 / tp, gamma, tp);
    std::printf("coherence zeros (b t_p):");
    for (double z : dec.boundaries_bt) std::printf(" %.5f", z);
    std::printf("\n");

    const auto stack = SliceStack::from_bt({3.67, 8.63, 13.57}, tp, gamma);
    const auto grid = grid_through(tp, 2.0 * tp, 128.0);
    const auto out = three_slice_output(stack, grid);
    const auto m = pulse_metrics(out);
    std::printf("peak amplitude %.6f, intensity gain %.4f at t = %.4f, FWHM %.4f\n", m.peak_amplitude,
                m.peak_intensity_gain, m.t_peak, m.width);
    std::printf("numeric cascade at t_p+: %.6f\n",
                cascade_numeric(stack, Waveform::constant(grid, 1.0)).amplitude[grid.nearest(tp)]);
}
