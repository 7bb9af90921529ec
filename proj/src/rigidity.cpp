#include "expander/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expander/measure.hpp"
#include "expander/quadrature.hpp"

namespace expander {

namespace {

double sup_abs_kappa(const ExpanderCurve& curve) {
    // |kappa| is maximal at the vertex (the first integral forces decay in |x|).
    double m = 0.0;
    for (const auto& c : curve.samples) m = std::max(m, std::abs(c.kappa));
    return m;
}

double xT_of(const CurveSample& c) {
    return c.x[0] * std::cos(c.theta) + c.x[1] * std::sin(c.theta);
}

}  // namespace

AuditReport audit_thm13(const ExpanderCurve& curve, double beta) {
    if (!(beta > 0.0)) fail(ErrKind::domain, "beta must be > 0", beta);

    AuditReport rep;
    rep.theorem = "pointwise-quartic-hyperplane";
    rep.fit_a = 0.0;
    rep.fit_b = sup_abs_kappa(curve);

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : curve.samples) {
        const double k2 = c.kappa * c.kappa;
        const double xT = xT_of(c);
        const double q1 = k2 * k2 + 0.5 * k2 - beta * k2 * xT * xT;
        if (q1 > best) {
            best = q1;
            rep.witness_s = c.s;
        }
    }
    rep.extremum = best;
    rep.hypothesis_holds = best <= 0.0;
    rep.conclusion_expected = rep.hypothesis_holds ? "hyperplane" : "none";
    return rep;
}

AuditReport audit_thm14(const ExpanderCurve& curve, double alpha) {
    if (!(alpha > 0.0)) fail(ErrKind::domain, "alpha must be > 0", alpha);

    AuditReport rep;
    rep.theorem = "cubic-with-annulus-decay-hyperplane";
    rep.fit_a = 0.0;
    rep.fit_b = sup_abs_kappa(curve);
    rep.inf_H = -rep.fit_b;  // H = -kappa and kappa >= 0 on this family

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curve.samples) {
        const double xT = xT_of(c);
        const double q2 =
            -c.kappa * c.kappa * c.kappa - 0.5 * c.kappa + 0.25 * (alpha + 1) * c.kappa * xT * xT;
        if (q2 < best) {
            best = q2;
            rep.witness_s = c.s;
        }
    }
    rep.extremum = best;

    // Annulus decay of the alpha-weighted measure: exactly the delta = 0
    // branch of the measure module's annulus machinery.
    const HPowerResult hp = weighted_H_power(curve, 0, alpha);
    rep.annuli = hp.annuli;
    rep.annuli_tend_to_zero = hp.annuli_tend_to_zero;

    rep.hypothesis_holds = best >= 0.0 && rep.annuli_tend_to_zero;
    rep.conclusion_expected = rep.hypothesis_holds ? "hyperplane" : "none";
    return rep;
}

AnnulusSeries audit_thm41_condition_ii(const ExpanderCurve& curve, int delta, double alpha) {
    if (delta < 1 || delta % 2 == 0)
        fail(ErrKind::domain, "delta must be odd and >= 1", delta);
    if (!(alpha > 0.0)) fail(ErrKind::domain, "alpha must be > 0", alpha);

    const int j_max = static_cast<int>(std::floor(curve.params.s_max / 2));
    if (j_max < 1)
        fail(ErrKind::out_of_range, "window too small for even one intrinsic annulus",
             curve.params.s_max);

    auto integrand = [&](double s) {
        const PointData p = pointwise(curve, s);
        return std::pow(std::abs(p.H), delta + 1) * std::exp(-0.25 * alpha * dot(p.x, p.x));
    };

    AnnulusSeries series;
    PanelCount pc;
    double a_max = 0.0;
    for (int j = 1; j <= j_max; ++j) {
        const double mass = adaptive_simpson(integrand, static_cast<double>(j), 2.0 * j, 1e-13, pc) +
                            adaptive_simpson(integrand, -2.0 * j, static_cast<double>(-j), 1e-13, pc);
        series.a.push_back(mass / (static_cast<double>(j) * j));
        a_max = std::max(a_max, series.a.back());
    }
    series.tends_to_zero = a_max == 0.0 || series.a.back() <= 1e-3 * a_max;
    return series;
}

ScalFlatness scal_flatness(const ProductExpander& product) {
    ScalFlatness out;
    double k2_min = std::numeric_limits<double>::infinity();
    double k2_max = 0.0;
    double scal = 0.0;
    for (const auto& c : product.curve.samples) {
        const double h_sq = (-c.kappa) * (-c.kappa);  // H = -kappa on the product
        const double k2 = c.kappa * c.kappa;           // |A|^2: the only principal curvature
        k2_min = std::min(k2_min, k2);
        k2_max = std::max(k2_max, k2);
        // Gauss equation on the product: Scal = H^2 - |A|^2.
        scal = std::max(scal, std::abs(h_sq - k2));
    }
    out.max_abs_scal = scal;
    out.kappa_sq_min = k2_min;
    out.kappa_sq_max = k2_max;
    out.second_form_constant = (k2_max - k2_min) <= 1e-12 * std::max(1.0, k2_max);
    return out;
}

}  // namespace expander
