#include "expander/quadrature.hpp"

#include <cmath>

namespace expander {

namespace {

constexpr int kMaxDepth = 48;

// Subdivision is forced this deep before the error estimate may end it.
// Without a floor, an integrand whose mass hides between the first probe
// points (e.g. s^2 e^{-s^2/2} on [-20, 20]: zero at the ends, zero in the
// middle, humps near |s| = 1.4) converges instantly to 0.
constexpr int kMinDepth = 6;

double simpson(double fa, double fc, double fb, double h) { return (fa + 4 * fc + fb) * h / 6; }

double recurse(const std::function<double(double)>& f, double a, double b, double fa, double fc,
               double fb, double whole, double tol, int depth, PanelCount& count) {
    const double c = 0.5 * (a + b);
    const double d = 0.5 * (a + c), e = 0.5 * (c + b);
    const double fd = f(d), fe = f(e);
    const double left = simpson(fa, fd, fc, c - a);
    const double right = simpson(fc, fe, fb, b - c);
    const double err = (left + right - whole) / 15;
    if (depth >= kMaxDepth || (depth >= kMinDepth && std::abs(err) <= tol)) {
        count.panels += 2;
        return left + right + err;
    }
    return recurse(f, a, c, fa, fd, fc, left, tol / 2, depth + 1, count) +
           recurse(f, c, b, fc, fe, fb, right, tol / 2, depth + 1, count);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        PanelCount& count) {
    if (a == b) return 0.0;
    const double c = 0.5 * (a + b);
    const double fa = f(a), fc = f(c), fb = f(b);
    return recurse(f, a, b, fa, fc, fb, simpson(fa, fc, fb, b - a), tol, 0, count);
}

double simpson_sqrt_upper(const std::function<double(double)>& f, double a, double b, double tol,
                          PanelCount& count) {
    const double umax = std::sqrt(b - a);
    auto g = [&](double u) { return 2 * u * f(b - u * u); };
    return adaptive_simpson(g, 0.0, umax, tol, count);
}

double simpson_sqrt_lower(const std::function<double(double)>& f, double a, double b, double tol,
                          PanelCount& count) {
    const double umax = std::sqrt(b - a);
    auto g = [&](double u) { return 2 * u * f(a + u * u); };
    return adaptive_simpson(g, 0.0, umax, tol, count);
}

}  // namespace expander
