#include "expander/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace expander {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Tangent-polar chart for the expander curvature ODE.  r = |x|, psi = polar
// angle of x, beta = psi - theta = angle from the tangent ray to the
// position ray.  In this chart
//     r'    = cos(beta)
//     beta' = -sin(beta) (1/r + r/2)
//     psi'  = -sin(beta) / r
// and the curvature is recovered algebraically as kappa = r sin(beta) / 2.
// beta decays like e^{-s^2/4} in the tail but the update is multiplicative,
// so its *relative* accuracy — and hence kappa's — survives; the Cartesian
// (x, theta) chart loses kappa to cancellation noise once |x| is large.
struct State {
    double r, beta, psi;
};

State rhs(const State& u) {
    const double sb = std::sin(u.beta);
    return {std::cos(u.beta), -sb * (1.0 / u.r + 0.5 * u.r), -sb / u.r};
}

State axpy(const State& y, double h, double k0, const State& f0) {
    return {y.r + h * k0 * f0.r, y.beta + h * k0 * f0.beta, y.psi + h * k0 * f0.psi};
}

bool finite(const State& u) {
    return std::isfinite(u.r) && std::isfinite(u.beta) && std::isfinite(u.psi);
}

// One Dormand-Prince 5(4) step.  Returns the 5th order solution and the
// embedded error estimate per component.
void dopri_step(const State& y, double h, State& y5, State& err) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - bhat, the embedded 4th order difference weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State k1 = rhs(y);
    const State k2 = rhs(axpy(y, h, a21, k1));
    State t = y;
    t = axpy(t, h, a31, k1);
    t = axpy(t, h, a32, k2);
    const State k3 = rhs(t);
    t = axpy(axpy(axpy(y, h, a41, k1), h, a42, k2), h, a43, k3);
    const State k4 = rhs(t);
    t = axpy(axpy(axpy(axpy(y, h, a51, k1), h, a52, k2), h, a53, k3), h, a54, k4);
    const State k5 = rhs(t);
    t = axpy(axpy(axpy(axpy(axpy(y, h, a61, k1), h, a62, k2), h, a63, k3), h, a64, k4), h, a65, k5);
    const State k6 = rhs(t);
    y5 = axpy(axpy(axpy(axpy(axpy(y, h, b1, k1), h, b3, k3), h, b4, k4), h, b5, k5), h, b6, k6);
    const State k7 = rhs(y5);

    err.r = h * (e1 * k1.r + e3 * k3.r + e4 * k4.r + e5 * k5.r + e6 * k6.r + e7 * k7.r);
    err.beta =
        h * (e1 * k1.beta + e3 * k3.beta + e4 * k4.beta + e5 * k5.beta + e6 * k6.beta + e7 * k7.beta);
    err.psi = h * (e1 * k1.psi + e3 * k3.psi + e4 * k4.psi + e5 * k5.psi + e6 * k6.psi + e7 * k7.psi);
}

// Relative error norm.  beta is measured against its own magnitude: it is
// the component that carries kappa's relative accuracy through the decay.
double error_norm(const State& y, const State& err) {
    const double er = std::abs(err.r) / (1.0 + std::abs(y.r));
    const double ep = std::abs(err.psi) / (1.0 + std::abs(y.psi));
    const double eb = std::abs(err.beta) / std::max(std::abs(y.beta), 1e-300);
    return std::max({er, ep, eb});
}

// Integrates one arm from the vertex to s = s_max, landing exactly on the
// uniform grid s_k = k * ds, k = 1..n_half.  beta0 = +pi/2 gives the forward
// arm; beta0 = -pi/2 gives the reversed-orientation frame of the backward
// arm.  Returns the state at each grid point.
std::vector<State> integrate_arm(double d, double beta0, double s_max, std::size_t n_half,
                                 double step_tol) {
    std::vector<State> out;
    out.reserve(n_half);
    State y{d, beta0, kPi / 2};
    double s = 0.0;
    // h_ctrl is the controller's preferred step; output-grid clipping never
    // feeds back into it, or the step size would collapse at every landing.
    double h_ctrl = std::min(1e-4, s_max / static_cast<double>(n_half));
    const double h_min = 1e-12 * s_max;

    for (std::size_t k = 1; k <= n_half; ++k) {
        const double s_target = s_max * static_cast<double>(k) / static_cast<double>(n_half);
        while (s < s_target) {
            const bool clipped = h_ctrl >= s_target - s;
            const double h = clipped ? s_target - s : h_ctrl;
            State y5, err;
            dopri_step(y, h, y5, err);
            if (!finite(y5)) fail(ErrKind::numeric_blowup, "curve integration produced non-finite state", s);
            const double e = error_norm(y, err);
            const double scale = 0.9 * std::pow(step_tol / std::max(e, 1e-30), 0.2);
            if (e <= step_tol) {
                y = y5;
                s = clipped ? s_target : s + h;
                if (!clipped) h_ctrl = std::min(h * std::clamp(scale, 0.2, 5.0), 1.0);
            } else {
                h_ctrl = h * std::clamp(scale, 0.2, 0.9);
            }
            if (h_ctrl < h_min)
                fail(ErrKind::integration_failure,
                     "step controller stalled; last good arclength in detail", s);
        }
        out.push_back(y);
    }
    return out;
}

CurveSample sample_from_state(double s, const State& u, bool reversed) {
    CurveSample c;
    c.s = s;
    c.x = {u.r * std::cos(u.psi), u.r * std::sin(u.psi)};
    if (!reversed) {
        c.theta = u.psi - u.beta;
        c.kappa = 0.5 * u.r * std::sin(u.beta);
    } else {
        // The arm was integrated in the frame with the tangent flipped;
        // translate back to the forward orientation.
        c.theta = (u.psi - u.beta) - kPi;
        c.kappa = -0.5 * u.r * std::sin(u.beta);
    }
    return c;
}

ExpanderCurve make_line(const CurveParams& p, std::size_t n_half) {
    ExpanderCurve curve;
    curve.params = p;
    curve.samples.resize(2 * n_half + 1);
    const double nh = static_cast<double>(n_half);
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        const double s = p.s_max * (static_cast<double>(i) - nh) / nh;
        curve.samples[i] = {s, {s, 0.0}, 0.0, 0.0};
    }
    curve.first_integral_c = 0.0;
    curve.max_invariant_drift = 0.0;
    return curve;
}

}  // namespace

ExpanderCurve integrate_curve(const CurveParams& params) {
    if (!(params.d >= 0.0) || !std::isfinite(params.d))
        fail(ErrKind::domain, "vertex distance d must be a finite value >= 0");
    if (params.d > 37.0)
        fail(ErrKind::numeric_blowup,
             "first-integral constant (d^2/4) e^{d^2/2} overflows double for d > 37", params.d);
    if (!(params.s_max > 0.0) || !std::isfinite(params.s_max))
        fail(ErrKind::domain, "s_max must be a finite value > 0");
    if (!(params.step_tol > 0.0) || params.step_tol >= 1e-3)
        fail(ErrKind::domain, "step_tol must lie in (0, 1e-3)");
    if (params.samples_hint < 2) fail(ErrKind::domain, "samples_hint must be >= 2");

    // Snap the sample count to an odd value >= 5 so the vertex is a sample.
    std::size_t n_half = static_cast<std::size_t>(std::max(params.samples_hint - 1, 4) / 2);
    if (params.d == 0.0) return make_line(params, n_half);

    const auto fwd = integrate_arm(params.d, kPi / 2, params.s_max, n_half, params.step_tol);
    const auto bwd = integrate_arm(params.d, -kPi / 2, params.s_max, n_half, params.step_tol);

    ExpanderCurve curve;
    curve.params = params;
    curve.samples.resize(2 * n_half + 1);
    const double nh = static_cast<double>(n_half);
    for (std::size_t k = 1; k <= n_half; ++k) {
        const double s = params.s_max * static_cast<double>(k) / nh;
        curve.samples[n_half + k] = sample_from_state(s, fwd[k - 1], false);
        curve.samples[n_half - k] = sample_from_state(-s, bwd[k - 1], true);
    }
    // The vertex is known in closed form; emit it exactly.
    curve.samples[n_half] = {0.0, {0.0, params.d}, 0.0, params.d / 2};

    curve.first_integral_c = (params.d * params.d / 4) * std::exp(params.d * params.d / 2);
    double drift = 0.0;
    for (const auto& c : curve.samples) {
        const double inv = c.kappa * c.kappa * std::exp(dot(c.x, c.x) / 2);
        drift = std::max(drift, std::abs(inv - curve.first_integral_c));
    }
    curve.max_invariant_drift = drift / std::max(curve.first_integral_c, 1e-30);
    return curve;
}

PointData pointwise(const ExpanderCurve& curve, double s) {
    const double s_max = curve.params.s_max;
    if (!(std::abs(s) <= s_max * (1 + 1e-12)))
        fail(ErrKind::out_of_range, "arclength outside the integrated window", s);
    s = std::clamp(s, -s_max, s_max);

    const auto& smp = curve.samples;
    const std::size_t n = smp.size();
    const double pos = (s + s_max) / curve.ds();
    std::size_t j = 0;
    if (pos > 1.0) j = std::min(static_cast<std::size_t>(pos) - 1, n - 4);

    // Cubic Lagrange through the four nearest samples.
    double w[4];
    for (int i = 0; i < 4; ++i) {
        double num = 1.0, den = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m == i) continue;
            num *= s - smp[j + m].s;
            den *= smp[j + i].s - smp[j + m].s;
        }
        w[i] = num / den;
    }
    double x1 = 0, x2 = 0, th = 0, ka = 0;
    for (int i = 0; i < 4; ++i) {
        x1 += w[i] * smp[j + i].x[0];
        x2 += w[i] * smp[j + i].x[1];
        th += w[i] * smp[j + i].theta;
        ka += w[i] * smp[j + i].kappa;
    }

    PointData p;
    p.x = {x1, x2};
    p.T = {std::cos(th), std::sin(th)};
    p.n = {-std::sin(th), std::cos(th)};
    p.kappa = ka;
    p.H = -ka;
    p.normA_sq = ka * ka;
    p.xT_T = dot(p.x, p.T);
    p.a_xx = ka * p.xT_T * p.xT_T;
    return p;
}

ConeFit asymptotic_cone(const ExpanderCurve& curve) {
    // Convention for the degenerate member: the line is its own asymptotic
    // cone and reports a right half-angle.  (The d -> 0+ limit of the family's
    // cone angle is 0; the convention is deliberate and documented.)
    if (curve.is_line()) return {kPi / 2, 0.0};

    const auto& smp = curve.samples;
    const auto& last = smp.back();
    const double kap_end_sq = last.kappa * last.kappa;
    if (kap_end_sq > 1e-6 * curve.first_integral_c)
        fail(ErrKind::not_yet_asymptotic,
             "curve tail has not reached the asymptotic regime; increase s_max",
             norm(last.x));

    const std::size_t n_half = curve.half_count();
    const std::size_t tail = std::max<std::size_t>(n_half / 10, 2);

    // Total-least-squares ray through the origin per arm: principal axis of
    // the second-moment matrix of the tail samples.
    auto fit_arm = [&](bool forward, double& angle, double& resid) {
        double sxx = 0, sxy = 0, syy = 0;
        const std::size_t lo = forward ? (smp.size() - tail) : 0;
        const std::size_t hi = forward ? smp.size() : tail;
        for (std::size_t i = lo; i < hi; ++i) {
            // Mirror the backward arm so both fits live in the right half plane.
            const double x1 = forward ? smp[i].x[0] : -smp[i].x[0];
            const double x2 = smp[i].x[1];
            sxx += x1 * x1;
            sxy += x1 * x2;
            syy += x2 * x2;
        }
        angle = 0.5 * std::atan2(2 * sxy, sxx - syy);
        const double ux = std::cos(angle), uy = std::sin(angle);
        resid = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double x1 = forward ? smp[i].x[0] : -smp[i].x[0];
            const double x2 = smp[i].x[1];
            const double dev = std::abs(-x1 * uy + x2 * ux);
            resid = std::max(resid, dev / std::hypot(x1, x2));
        }
    };
    double ang_f, res_f, ang_b, res_b;
    fit_arm(true, ang_f, res_f);
    fit_arm(false, ang_b, res_b);

    // The ray angle is measured from the x1-axis; by symmetry the two arms
    // agree to integration accuracy.  Half-angle of the cone = ray angle.
    return {0.5 * (ang_f + ang_b), std::max(res_f, res_b)};
}

std::string curve_csv(const ExpanderCurve& curve) {
    std::string out = "s,x1,x2,theta,kappa\n";
    char buf[200];
    for (const auto& c : curve.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", c.s, c.x[0], c.x[1],
                      c.theta, c.kappa);
        out += buf;
    }
    return out;
}

}  // namespace expander
