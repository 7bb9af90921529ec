#pragma once

#include <string>
#include <vector>

#include "expander/curve.hpp"

namespace expander {

struct ResidualReport {
    std::string identity_name;
    double grid_step = 0.0;         // effective step actually used
    double max_abs_residual = 0.0;  // normalized by the max of the differentiated quantity
    int expected_order = 2;
    std::string warning;            // grid-accuracy warnings are reported, never silent
};

// Finite-difference checks of the drifted-Laplacian identities satisfied by
// the mean curvature and the second fundamental form along the curve:
//   (a)  L H   + (|A|^2 + 1/2) H          = 0
//   (b)  L H^2 + (2|A|^2 + 1) H^2         = 2 |grad H|^2
//   (c)  L|A|^2 + (2|A|^2 + 1)|A|^2       = 2 |grad A|^2
//   (d)  |grad A|^2 - |grad H|^2          = 0   (curves: both equal (H')^2)
// where L u = u'' + (1/2)<x,T> u'.  Residuals are max-norm over the grid,
// normalized, with second-order stencils throughout.
std::vector<ResidualReport> residual_simo(const ExpanderCurve& curve, double grid_step);

// Checks that v = e^{-(alpha+1)|x|^2/8} solves the weighted eigenfunction
// equation L v + ((alpha+1)/4 + (alpha+1)/2 |A|^2 - (alpha+1)(alpha-1)/16 <x,T>^2) v = 0.
ResidualReport residual_test_eigenfunction(const ExpanderCurve& curve, double alpha,
                                           double grid_step);

// Checks the drifted equation for H under the alpha-weighted drift,
//   H'' - (alpha/2)<x,T> H' + H/2 + |A|^2 H + (alpha+1)/4 A(x^T,x^T) = 0,
// plus the equivalent form written through <x, grad H>.  Returns the two
// residual reports followed by a report of the max disagreement between the
// forms (which verifies <x, grad H> = A(x^T,x^T)/2 independently).
std::vector<ResidualReport> residual_L_alpha_H(const ExpanderCurve& curve, double alpha,
                                               double grid_step);

}  // namespace expander
