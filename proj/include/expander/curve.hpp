#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "expander/errors.hpp"

namespace expander {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// Parameters for one member of the one-parameter family of self-expanding
// curves.  d is the distance from the vertex to the origin; d = 0 is the
// straight line through the origin.
struct CurveParams {
    double d = 1.0;
    double s_max = 20.0;       // curve covers arclength [-s_max, s_max]
    double step_tol = 1e-13;   // per-step relative error target
    int samples_hint = 40001;  // requested sample count (rounded to odd >= 5)
};

struct CurveSample {
    double s;
    Vec2 x;
    double theta;  // tangent angle, T = (cos theta, sin theta)
    double kappa;  // curvature w.r.t. n = (-sin theta, cos theta)
};

// Arclength-sampled expander curve.  Samples are uniform in s over
// [-s_max, s_max]; the vertex x = (0, d) sits exactly at the middle index.
struct ExpanderCurve {
    CurveParams params;
    std::vector<CurveSample> samples;
    double first_integral_c = 0.0;     // kappa^2 e^{|x|^2/2}, constant along the curve
    double max_invariant_drift = 0.0;  // max relative deviation of the above over samples

    bool is_line() const { return params.d == 0.0; }
    std::size_t half_count() const { return (samples.size() - 1) / 2; }
    double ds() const { return params.s_max / static_cast<double>(half_count()); }
    const CurveSample& vertex() const { return samples[half_count()]; }
};

// Product of a curve with flat_factors copies of the real line: a
// self-expanding hypersurface cylinder of dimension 1 + flat_factors.
struct ProductExpander {
    ExpanderCurve curve;
    int flat_factors = 1;

    int dim() const { return 1 + flat_factors; }
};

// Geometric data at one point of the curve.
struct PointData {
    Vec2 x;
    Vec2 T;
    Vec2 n;
    double kappa;
    double H;         // mean curvature, H = -kappa in this orientation
    double normA_sq;  // |A|^2 = kappa^2
    double xT_T;      // <x, T>, the tangential coordinate of the position
    double a_xx;      // A(x^T, x^T) = kappa <x, T>^2
};

struct ConeFit {
    double half_angle;  // angle of the asymptotic cone boundary to the symmetry axis normal
    double residual;    // max relative orthogonal deviation of the fitted tail samples
};

// Integrates the curvature ODE of the family and returns the sampled curve.
// Throws ErrKind::domain for bad parameters, integration_failure (detail =
// last good s) if the step controller stalls, numeric_blowup on non-finite
// state.
ExpanderCurve integrate_curve(const CurveParams& params);

// Evaluates geometric data at arclength s by local cubic interpolation
// through the four nearest samples.  Throws out_of_range for |s| > s_max.
PointData pointwise(const ExpanderCurve& curve, double s);

// Fits rays through the origin to the outer 10% of each arm and reports the
// cone half-opening angle (against the axis of symmetry) plus the fit
// residual.  Throws not_yet_asymptotic when the tail has not decayed enough
// to trust the fit (advice: increase s_max).
ConeFit asymptotic_cone(const ExpanderCurve& curve);

// CSV serialization: header "s,x1,x2,theta,kappa", one row per sample,
// 17 significant digits, LF line endings.
std::string curve_csv(const ExpanderCurve& curve);

}  // namespace expander
