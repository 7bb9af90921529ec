#pragma once

#include <functional>

namespace expander {

struct PanelCount {
    long panels = 0;
};

// Adaptive Simpson quadrature with the classic (S_fine - S_coarse)/15 panel
// test.  tol is the absolute error target per panel subdivision; the
// returned value includes the extrapolation correction.  panels counts the
// accepted leaf panels.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        PanelCount& count);

// Same, for integrands with a sqrt(b - s) (resp. sqrt(s - a)) zero at an
// endpoint: substitutes s = b - u^2 (resp. s = a + u^2) so the transformed
// integrand is smooth.  Used for ball sections of product hypersurfaces.
double simpson_sqrt_upper(const std::function<double(double)>& f, double a, double b, double tol,
                          PanelCount& count);
double simpson_sqrt_lower(const std::function<double(double)>& f, double a, double b, double tol,
                          PanelCount& count);

}  // namespace expander
