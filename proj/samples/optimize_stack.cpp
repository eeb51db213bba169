// Tune t_p and the slice boundaries of a three-slice stack at finite decay.
#include <cstdio>

#include "superrad/optimize.hpp"

int main() {
    using namespace superrad;
    const auto r = optimize_stack(3, 25.87 / 3.67, 0.01, 200);
    std::printf("baseline: t_p %.5f, gain %.5f\n", r.baseline_stack.t_p, r.baseline_gain);
    std::printf("best:     t_p %.5f, gain %.5f, slices b =", r.best_stack.t_p, r.best_metrics.peak_intensity_gain);
    for (double b : r.best_stack.slice_b) std::printf(" %.5f", b);
    std::printf("\nevaluations %d, converged %s\n", r.evaluations, r.converged ? "yes" : "no");
}
