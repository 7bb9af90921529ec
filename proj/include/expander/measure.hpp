#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "expander/curve.hpp"

namespace expander {

struct QuadratureResult {
    double value = 0.0;
    double tail_bound = 0.0;  // rigorous bound on the mass beyond the window
    long panels = 0;
};

struct HPowerResult {
    QuadratureResult integral;
    std::vector<double> annuli;  // a_j = j^{-2} * mass of the annulus j < |x| <= 2j
    bool annuli_tend_to_zero = false;
};

struct GrowthRow {
    double r;
    double vol;    // Euclidean measure of B_r intersected with the target
    double bound;  // C(alpha) e^{alpha r^2/4}
    bool pass;     // vol <= bound
};

struct ProbeSeries {
    std::vector<std::pair<double, double>> points;  // (t, value)
    bool monotone = false;  // nonincreasing for functional_I, nondecreasing for divergence_probe
};

struct GrowthCoeffs {
    double a = 0.0;  // |H| <= a|x| + b fit used by the weighted functionals
    double b = 0.0;
};

// Slack-tolerant monotonicity comparisons; the probe series and their CSV
// emission must agree on these, so they live here rather than in the .cpp.
inline bool breaks_nonincreasing(double prev, double next) { return next > prev * (1 + 1e-12); }
inline bool breaks_nondecreasing(double prev, double next) {
    return next < prev - 1e-12 * std::max(1.0, std::abs(prev));
}

// Gaussian-weighted total measure, weight e^{-alpha |x|^2 / 4}, alpha > 0.
// tail_bound covers the mass beyond the integrated window; throws
// tail_bound_unavailable when |x| is not increasing near the window edge.
QuadratureResult weighted_volume(const ExpanderCurve& curve, double alpha);
QuadratureResult weighted_volume(const ProductExpander& product, double alpha);

// Weighted integral of |H|^delta (delta even, >= 0) plus the extrinsic
// annulus decay sequence a_j over j < |x| <= 2j, j = 1..floor(|x(s_max)|/2).
HPowerResult weighted_H_power(const ExpanderCurve& curve, int delta, double alpha);

// Euclidean ball growth rows vol(B_r) vs C(alpha) e^{alpha r^2/4} with
// C(alpha) = weighted_volume.value + tail_bound.  Radii beyond |x(s_max)|
// throw out_of_range.
std::vector<GrowthRow> ball_growth(const ExpanderCurve& curve, const std::vector<double>& radii,
                                   double alpha);
std::vector<GrowthRow> ball_growth(const ProductExpander& product, const std::vector<double>& radii,
                                   double alpha);

// Weighted monotone functional I(t) = t^{-k(r)} int_{B_r} e^{-alpha|x|^2/(4t)}
// over the curve, with k(r) = (1+alpha)(a r + b)^2 + 1/2 from the growth fit.
// t_grid must be increasing with t >= 1.  Throws degenerate_domain when the
// ball misses the curve entirely.
ProbeSeries functional_I(const ExpanderCurve& curve, double alpha, const GrowthCoeffs& coeffs,
                         double r, const std::vector<double>& t_grid);

// phi(t) = t^{-n} (W(t) - W(r0)) with W(r) the weight-e^{-alpha|x|^2/4}
// measure of B_r and n the target dimension; alpha = 0 gives the unweighted
// divergence probe.  Requires r0 < min(t_grid).
ProbeSeries divergence_probe(const ExpanderCurve& curve, double alpha, double r0,
                             const std::vector<double>& t_grid);
ProbeSeries divergence_probe(const ProductExpander& product, double alpha, double r0,
                             const std::vector<double>& t_grid);

// Arclength where |x(s)| first reaches r on the forward (arm = +1) or
// backward (arm = -1) arm; returns 0 when r <= d (the ball boundary does not
// meet the arm).  Throws out_of_range when r > |x(s_max)|.
double crossing_arclength(const ExpanderCurve& curve, double r, int arm);

}  // namespace expander
