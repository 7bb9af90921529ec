#include "expander/fd.hpp"

#include <cmath>

namespace expander {

GridView resample(const ExpanderCurve& curve, double grid_step) {
    if (!(grid_step > 0.0)) fail(ErrKind::domain, "grid step must be > 0", grid_step);
    const double ds = curve.ds();
    const long stride = std::lround(grid_step / ds);
    if (stride < 1)
        fail(ErrKind::dependency,
             "grid step finer than the curve sampling; re-integrate with more samples", ds);

    GridView g;
    g.h = ds * static_cast<double>(stride);
    if (std::abs(g.h - grid_step) > 1e-9 * grid_step)
        g.warning = "requested grid step snapped to an exact sample stride";

    const auto& smp = curve.samples;
    for (std::size_t i = 0; i < smp.size(); i += static_cast<std::size_t>(stride)) {
        const auto& c = smp[i];
        g.s.push_back(c.s);
        g.kappa.push_back(c.kappa);
        g.xT.push_back(c.x[0] * std::cos(c.theta) + c.x[1] * std::sin(c.theta));
        g.x_sq.push_back(dot(c.x, c.x));
    }
    if (g.s.size() < 5)
        fail(ErrKind::domain, "grid step leaves fewer than five points in the window", g.h);
    return g;
}

}  // namespace expander
