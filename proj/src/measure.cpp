#include "expander/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expander/quadrature.hpp"

namespace expander {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPanelTol = 1e-13;

double radius_at(const ExpanderCurve& curve, double s) {
    const PointData p = pointwise(curve, s);
    return norm(p.x);
}

// Minimum slope of |x(s)| over the outer 10% of both arms; the Gaussian tail
// bound needs a positive lower bound on it.
double tail_slope(const ExpanderCurve& curve) {
    const auto& smp = curve.samples;
    const std::size_t n = smp.size();
    const std::size_t tail = std::max<std::size_t>(curve.half_count() / 10, 2);
    double c = std::numeric_limits<double>::infinity();
    const double ds = curve.ds();
    for (std::size_t i = n - tail; i + 1 < n; ++i)
        c = std::min(c, (norm(smp[i + 1].x) - norm(smp[i].x)) / ds);
    for (std::size_t i = 0; i + 1 < tail; ++i)
        c = std::min(c, (norm(smp[i].x) - norm(smp[i + 1].x)) / ds);
    return c;
}

// Mass of the weight e^{-alpha |x|^2/4} beyond the integrated window.
double gaussian_tail(const ExpanderCurve& curve, double alpha) {
    const double c = tail_slope(curve);
    if (!(c > 0.0))
        fail(ErrKind::tail_bound_unavailable,
             "|x| is not increasing near the window edge; cannot bound the tail", c);
    const double rho0 = norm(curve.samples.back().x);
    return (2.0 / c) * std::sqrt(kPi / alpha) * std::erfc(0.5 * std::sqrt(alpha) * rho0);
}

// Weighted volume of the k-dimensional ball of radius R in the flat factors:
// int_{|y| <= R} e^{-alpha |y|^2/4} dy.  alpha = 0 gives the Euclidean
// volume; k = 0 gives 1.
double ball_factor(int k, double alpha, double R) {
    if (k == 0) return 1.0;
    if (R <= 0.0) return 0.0;
    if (alpha == 0.0)
        return std::pow(kPi, 0.5 * k) * std::pow(R, k) / std::tgamma(0.5 * k + 1.0);
    if (k == 1) return 2.0 * std::sqrt(kPi / alpha) * std::erf(0.5 * std::sqrt(alpha) * R);
    if (k == 2) return (4.0 * kPi / alpha) * (-std::expm1(-0.25 * alpha * R * R));
    const double sigma = 2.0 * std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k);
    PanelCount pc;
    return sigma * adaptive_simpson(
                       [&](double rho) {
                           return std::pow(rho, k - 1) * std::exp(-0.25 * alpha * rho * rho);
                       },
                       0.0, R, 1e-15, pc);
}

// int_{|x(s)| <= r} e^{-alpha_c |x(s)|^2/4} * ball_factor(k, alpha_y, sqrt(r^2 - |x|^2)) ds.
// The factor vanishes like (r^2 - |x|^2)^{k/2} at the crossings, so the outer
// slices use the sqrt substitution to keep the integrand analytic.
double ball_section(const ExpanderCurve& curve, double r, int k, double alpha_c, double alpha_y,
                    long& panels) {
    if (r < curve.params.d || r <= 0.0) return 0.0;
    const double sp = crossing_arclength(curve, r, +1);
    const double sm = crossing_arclength(curve, r, -1);
    if (sp - sm <= 0.0) return 0.0;

    auto f = [&](double s) {
        const PointData p = pointwise(curve, s);
        const double rho_sq = dot(p.x, p.x);
        const double rem = std::max(r * r - rho_sq, 0.0);
        return std::exp(-0.25 * alpha_c * rho_sq) * ball_factor(k, alpha_y, std::sqrt(rem));
    };

    PanelCount pc;
    double value;
    if (k == 0) {
        value = adaptive_simpson(f, sm, sp, kPanelTol, pc);
    } else {
        const double w = 0.1 * (sp - sm);
        value = simpson_sqrt_lower(f, sm, sm + w, kPanelTol, pc) +
                adaptive_simpson(f, sm + w, sp - w, kPanelTol, pc) +
                simpson_sqrt_upper(f, sp - w, sp, kPanelTol, pc);
    }
    panels += pc.panels;
    return value;
}

void check_alpha_positive(double alpha) {
    if (!(alpha > 0.0)) fail(ErrKind::domain, "weight exponent alpha must be > 0", alpha);
}

}  // namespace

double crossing_arclength(const ExpanderCurve& curve, double r, int arm) {
    if (!(r >= 0.0)) fail(ErrKind::domain, "radius must be >= 0", r);
    const double rho_end = norm(curve.samples.back().x);
    if (r > rho_end * (1 + 1e-12))
        fail(ErrKind::out_of_range, "radius beyond the integrated window |x(s_max)|", rho_end);
    if (r <= curve.params.d) return 0.0;

    // |x| increases strictly along each arm, so bisection is safe.
    double lo = 0.0, hi = curve.params.s_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * curve.params.s_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (radius_at(curve, arm > 0 ? mid : -mid) < r)
            lo = mid;
        else
            hi = mid;
    }
    const double s = 0.5 * (lo + hi);
    return arm > 0 ? s : -s;
}

QuadratureResult weighted_volume(const ExpanderCurve& curve, double alpha) {
    check_alpha_positive(alpha);
    QuadratureResult res;
    PanelCount pc;
    res.value = adaptive_simpson(
        [&](double s) {
            const PointData p = pointwise(curve, s);
            return std::exp(-0.25 * alpha * dot(p.x, p.x));
        },
        -curve.params.s_max, curve.params.s_max, kPanelTol, pc);
    res.panels = pc.panels;
    res.tail_bound = gaussian_tail(curve, alpha);
    return res;
}

QuadratureResult weighted_volume(const ProductExpander& product, double alpha) {
    QuadratureResult res = weighted_volume(product.curve, alpha);
    const double factor = std::pow(4.0 * kPi / alpha, 0.5 * product.flat_factors);
    res.value *= factor;
    res.tail_bound *= factor;
    return res;
}

HPowerResult weighted_H_power(const ExpanderCurve& curve, int delta, double alpha) {
    check_alpha_positive(alpha);
    if (delta < 0 || delta % 2 != 0)
        fail(ErrKind::domain, "mean-curvature exponent delta must be even and >= 0", delta);

    HPowerResult res;
    PanelCount pc;
    auto integrand = [&](double s) {
        const PointData p = pointwise(curve, s);
        const double hpow = delta == 0 ? 1.0 : std::pow(p.H * p.H, delta / 2);
        return hpow * std::exp(-0.25 * alpha * dot(p.x, p.x));
    };
    res.integral.value = adaptive_simpson(integrand, -curve.params.s_max, curve.params.s_max,
                                          kPanelTol, pc);
    res.integral.panels = pc.panels;
    const double kap_end = std::abs(curve.samples.back().kappa);
    res.integral.tail_bound =
        (delta == 0 ? 1.0 : std::pow(kap_end, delta)) * gaussian_tail(curve, alpha);

    const double rho_end = norm(curve.samples.back().x);
    const int j_max = static_cast<int>(std::floor(rho_end / 2));
    double a_max = 0.0;
    for (int j = 1; j <= j_max; ++j) {
        const double s_in = crossing_arclength(curve, j, +1);
        const double s_out = crossing_arclength(curve, 2.0 * j, +1);
        PanelCount apc;
        double mass = 0.0;
        if (s_out > s_in) {
            // Both arms carry the same mass by symmetry; integrate each.
            mass = adaptive_simpson(integrand, s_in, s_out, kPanelTol, apc) +
                   adaptive_simpson(integrand, -s_out, -s_in, kPanelTol, apc);
        }
        res.annuli.push_back(mass / (static_cast<double>(j) * j));
        a_max = std::max(a_max, res.annuli.back());
    }
    res.annuli_tend_to_zero =
        res.annuli.empty() || a_max == 0.0 || res.annuli.back() <= 1e-3 * a_max;
    return res;
}

namespace {

std::vector<GrowthRow> growth_rows(const ExpanderCurve& curve, int flat_factors,
                                   const std::vector<double>& radii, double alpha) {
    check_alpha_positive(alpha);
    QuadratureResult wv = weighted_volume(curve, alpha);
    double c_alpha = wv.value + wv.tail_bound;
    if (flat_factors > 0) c_alpha *= std::pow(4.0 * kPi / alpha, 0.5 * flat_factors);

    std::vector<GrowthRow> rows;
    rows.reserve(radii.size());
    for (double r : radii) {
        if (!(r >= 0.0) || !std::isfinite(r))
            fail(ErrKind::domain, "growth radius must be a finite value >= 0", r);
        long panels = 0;
        GrowthRow row;
        row.r = r;
        row.vol = ball_section(curve, r, flat_factors, 0.0, 0.0, panels);
        row.bound = c_alpha * std::exp(0.25 * alpha * r * r);
        row.pass = row.vol <= row.bound * (1 + 1e-12);
        rows.push_back(row);
    }
    return rows;
}

ProbeSeries divergence_series(const ExpanderCurve& curve, int flat_factors, double alpha, double r0,
                              const std::vector<double>& t_grid) {
    if (!(alpha >= 0.0)) fail(ErrKind::domain, "divergence probe needs alpha >= 0", alpha);
    if (t_grid.empty()) fail(ErrKind::domain, "empty t grid");
    if (!(r0 >= 0.0) || !(r0 < t_grid.front()))
        fail(ErrKind::domain, "probe base radius must satisfy 0 <= r0 < min(t_grid)", r0);
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        fail(ErrKind::domain, "t grid must be increasing");

    const int n_dim = 1 + flat_factors;
    long panels = 0;
    const double w_r0 = ball_section(curve, r0, flat_factors, alpha, alpha, panels);

    ProbeSeries series;
    series.monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double w_t = ball_section(curve, t, flat_factors, alpha, alpha, panels);
        const double phi = (w_t - w_r0) / std::pow(t, n_dim);
        if (breaks_nondecreasing(prev, phi)) series.monotone = false;
        prev = phi;
        series.points.emplace_back(t, phi);
    }
    return series;
}

}  // namespace

std::vector<GrowthRow> ball_growth(const ExpanderCurve& curve, const std::vector<double>& radii,
                                   double alpha) {
    return growth_rows(curve, 0, radii, alpha);
}

std::vector<GrowthRow> ball_growth(const ProductExpander& product, const std::vector<double>& radii,
                                   double alpha) {
    return growth_rows(product.curve, product.flat_factors, radii, alpha);
}

ProbeSeries functional_I(const ExpanderCurve& curve, double alpha, const GrowthCoeffs& coeffs,
                         double r, const std::vector<double>& t_grid) {
    check_alpha_positive(alpha);
    if (coeffs.a < 0.0 || coeffs.b < 0.0)
        fail(ErrKind::domain, "growth-fit coefficients must be nonnegative");
    if (t_grid.empty() || !(t_grid.front() >= 1.0))
        fail(ErrKind::domain, "t grid must start at t >= 1");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        fail(ErrKind::domain, "t grid must be increasing");
    if (r <= curve.params.d)
        fail(ErrKind::degenerate_domain, "ball of radius r misses the curve entirely", r);

    const double a2 = (1 + alpha) * coeffs.a * coeffs.a;
    const double a1 = 2 * (1 + alpha) * coeffs.a * coeffs.b;
    const double a0 = (1 + alpha) * coeffs.b * coeffs.b + 0.5;
    const double k_r = (a2 * r + a1) * r + a0;

    ProbeSeries series;
    series.monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        long panels = 0;
        const double mass = ball_section(curve, r, 0, alpha / t, 0.0, panels);
        const double val = std::pow(t, -k_r) * mass;
        if (breaks_nonincreasing(prev, val)) series.monotone = false;
        prev = val;
        series.points.emplace_back(t, val);
    }
    return series;
}

ProbeSeries divergence_probe(const ExpanderCurve& curve, double alpha, double r0,
                             const std::vector<double>& t_grid) {
    return divergence_series(curve, 0, alpha, r0, t_grid);
}

ProbeSeries divergence_probe(const ProductExpander& product, double alpha, double r0,
                             const std::vector<double>& t_grid) {
    return divergence_series(product.curve, product.flat_factors, alpha, r0, t_grid);
}

}  // namespace expander
