#pragma once

#include <string>
#include <vector>

#include "expander/curve.hpp"

namespace expander {

// Uniform subgrid of a curve's sample grid, used by every finite-difference
// check.  Stride sampling only: interpolating under a second difference
// would inject interpolation noise of order (grid/h)^... larger than the
// truncation error being measured, so requested steps snap to the nearest
// integer multiple of the curve's sample spacing.
struct GridView {
    double h = 0.0;               // effective step (exact multiple of curve.ds())
    std::vector<double> s;
    std::vector<double> kappa;
    std::vector<double> xT;       // <x, T>
    std::vector<double> x_sq;     // |x|^2
    std::string warning;          // set when the request needed adjustment
};

// Builds the stride view.  Throws dependency if the request is finer than
// the curve sampling; sets a warning when the snap moved the step by more
// than 1e-9 relative.
GridView resample(const ExpanderCurve& curve, double grid_step);

}  // namespace expander
