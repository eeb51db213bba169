// superrad.hpp - umbrella header
#pragma once

#include "superrad/cascade.hpp"
#include "superrad/domains.hpp"
#include "superrad/errors.hpp"
#include "superrad/optimize.hpp"
#include "superrad/propagation.hpp"
#include "superrad/quadrature.hpp"
#include "superrad/specfun.hpp"
#include "superrad/waveform.hpp"

namespace superrad {

inline constexpr const char* kVersion = "1.0.0";

} // namespace superrad
