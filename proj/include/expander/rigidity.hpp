#pragma once

#include <string>
#include <vector>

#include "expander/curve.hpp"

namespace expander {

// Outcome of scanning a pointwise rigidity hypothesis along the curve.
// fit_a / fit_b document the growth fit |H| <= a|x| + b under which the
// audited statement applies (a = 0 on this family: H is bounded).
struct AuditReport {
    std::string theorem;
    double extremum = 0.0;   // max of q1, min of q2
    double witness_s = 0.0;  // arclength where the extremum is attained
    bool hypothesis_holds = false;
    std::string conclusion_expected;  // "hyperplane" when the hypothesis holds, else "none"
    double fit_a = 0.0;
    double fit_b = 0.0;
    // Extra evidence carried by the second audit: inf H and the weighted
    // annulus decay condition.
    double inf_H = 0.0;
    std::vector<double> annuli;
    bool annuli_tend_to_zero = false;
};

struct AnnulusSeries {
    std::vector<double> a;  // a_j over intrinsic annuli j <= |s| <= 2j, scaled by j^{-2}
    bool tends_to_zero = false;
};

struct ScalFlatness {
    double max_abs_scal = 0.0;      // max |H^2 - |A|^2| over the samples
    bool second_form_constant = false;
    double kappa_sq_min = 0.0;
    double kappa_sq_max = 0.0;
};

// Scans q1 = |A|^4 + |A|^2/2 - beta |A|^2 <x,T>^2 for nonpositivity
// (hypothesis of the first pointwise rigidity statement, beta > 0).
AuditReport audit_thm13(const ExpanderCurve& curve, double beta);

// Scans q2 = H^3 + H/2 + (alpha+1)/4 |x^T|^2 H ... written through kappa:
// q2 = -kappa^3 - kappa/2 + (alpha+1)/4 kappa <x,T>^2, for nonnegativity.
// Also reports inf H and the weighted annulus decay evidence.
AuditReport audit_thm14(const ExpanderCurve& curve, double alpha);

// Intrinsic-annulus decay sequence a_j = j^{-2} int_{j <= |s| <= 2j}
// |H|^{delta+1} e^{-alpha |x|^2/4} ds for odd delta > 0; the window must
// cover s = 2 j_max.
AnnulusSeries audit_thm41_condition_ii(const ExpanderCurve& curve, int delta, double alpha);

// Scalar curvature of the product vanishes identically; reports the scan
// plus whether |A| is constant along the curve (true only for the line).
ScalFlatness scal_flatness(const ProductExpander& product);

}  // namespace expander
