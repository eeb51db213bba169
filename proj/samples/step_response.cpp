// Step response of one absorber by three independent routes.
#include <cstdio>

#include "superrad/propagation.hpp"

int main() {
    const superrad::AbsorberSpec spec{1.0, 0.01};
    std::printf("%6s %16s %16s %16s\n", "b*t", "series", "quadrature", "spectral");
    for (double t = 0.0; t <= 30.0; t += 2.5) {
        std::printf("%6.2f %16.12f %16.12f %16.12f\n", t, superrad::step_response_series(spec, t),
                    superrad::step_response_quadrature(spec, t), superrad::step_response_spectral(spec, t));
    }
}
