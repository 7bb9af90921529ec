#pragma once

#include <string>
#include <vector>

#include "expander/curve.hpp"
#include "expander/identities.hpp"

namespace expander {

enum class OperatorKind { drifted, stability };

inline const char* operator_kind_name(OperatorKind k) {
    return k == OperatorKind::drifted ? "drifted" : "stability";
}

// Dirichlet discretization of the conjugated Schrodinger form of the
// operator on the window [-S, S]: psi = e^{|x|^2/8} u turns the weighted
// problem into -psi'' + V psi on L^2(ds) with
//   V = <x,T>^2/16 + (1 + 2 kappa^2)/4 - q,
//   q = 0 (drifted Laplacian)  or  q = kappa^2 - 1/2 (stability operator).
// Interior nodes s_i = -S + i h, i = 1..m, h = 2S/(m+1).
struct SchrodingerProblem {
    OperatorKind kind = OperatorKind::drifted;
    double S = 16.0;
    int m = 4001;
    double h_grid = 0.0;
    std::vector<double> V;    // interior nodes, size m
    std::vector<double> q;    // zeroth-order part removed by conjugation, size m
    std::vector<double> phi;  // |x|^2/8 incl. the boundary nodes, size m+2

    // Companion refinement (S+2, 2m) used for the convergence record.
    double S_fine = 0.0;
    int m_fine = 0;
    double h_fine = 0.0;
    std::vector<double> V_fine;
    std::vector<double> q_fine;
    std::vector<double> phi_fine;

    // Second companion (S+2, 4m) on which the Rayleigh-consistency check is
    // evaluated; the O(h^2) normalization error of the weighted form needs a
    // finer grid than Richardson does to stay below the declared tolerance.
    int m_check = 0;
    double h_check = 0.0;
    std::vector<double> V_check;
    std::vector<double> q_check;
    std::vector<double> phi_check;
};

struct ConvergenceRecord {
    double S = 0.0;
    int m = 0;
    double richardson_estimate = 0.0;
    double est_error = 0.0;        // |richardson - bottom eigenvalue|
    double rayleigh_residual = 0.0;  // weighted Rayleigh quotient consistency (fine grid)
};

struct SpectrumResult {
    std::vector<double> eigenvalues;           // lowest k, strictly increasing
    std::vector<double> eigenfunction_bottom;  // positive, sum psi^2 h = 1
    ConvergenceRecord convergence;
};

struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double tol = 0.0;     // slack allowed before the check is declared failed
    bool pass = false;    // margin >= -tol
    bool equality_expected = false;
};

// Builds the discretization.  Throws window when the refinement companion
// window S + 2 exceeds the integrated s_max, domain for m < 3 or S <= 0.
SchrodingerProblem build_problem(const ExpanderCurve& curve, OperatorKind kind, double S, int m);

// Bottom k eigenvalues by Sturm bisection (absolute tolerance 1e-10) plus
// the ground state by inverse iteration.  Requires m >= 101.  Throws solver
// with the iteration trace on non-convergence.
SpectrumResult solve_bottom(const SchrodingerProblem& problem, int k);

// Bottom of the spectrum for the product with flat_factors real lines:
// separation of variables adds exactly 1/2 per factor.
double product_bottom(const SpectrumResult& result, int flat_factors);

// The seven desk inequalities between spectral bottoms, curvature
// integrals, and scalar curvature, evaluated for the product of the curve
// with flat_factors lines.  alpha enters the two alpha-weighted families.
std::vector<BoundReport> check_bounds(const ExpanderCurve& curve, int flat_factors, double alpha);

// Finite-difference residual of the exact stability eigenpair
// v = e^{-|x|^2/4}, (L + 1) v = 0, which every member of the family admits.
ResidualReport exact_eigenpair_residual(const ExpanderCurve& curve, double grid_step);

// Weighted Rayleigh quotient of a grid function psi (given at the problem's
// main interior nodes) against the weighted measure, using geometric-mean
// midpoint weights: the discrete conjugation of the Schrodinger form up to
// an O(h^2) normalization term.
double weighted_rayleigh(const SchrodingerProblem& problem, const std::vector<double>& psi);

// The matching Schrodinger quadratic form (psi^T T psi) / (psi^T psi) on the
// main grid, for conjugation cross-checks against weighted_rayleigh.
double schrodinger_rayleigh(const SchrodingerProblem& problem, const std::vector<double>& psi);

}  // namespace expander
