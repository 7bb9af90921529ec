// Acceptance gate for the numerical laboratory: twelve criteria, one
// verdict line each, exit 0 iff every criterion holds.  Every tolerance is
// pinned here, in code, so the gate cannot drift silently.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "expander/curve.hpp"
#include "expander/errors.hpp"
#include "expander/identities.hpp"
#include "expander/measure.hpp"
#include "expander/rigidity.hpp"
#include "expander/spectral.hpp"

using namespace expander;

namespace {

int g_failures = 0;

// One criterion: run the body, collect sub-check failures, print the verdict.
struct Criterion {
    int number;
    std::string title;
    std::vector<std::string> failures;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Criterion(int n, std::string t) : number(n), title(std::move(t)) {}

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    ~Criterion() {
        const double dt = seconds();
        if (failures.empty()) {
            std::printf("[PASS] %2d. %s (%.2f s)\n", number, title.c_str(), dt);
        } else {
            ++g_failures;
            std::printf("[FAIL] %2d. %s (%.2f s)\n", number, title.c_str(), dt);
            for (const std::string& f : failures) std::printf("         - %s\n", f.c_str());
        }
        std::fflush(stdout);
    }
};

std::map<double, ExpanderCurve> g_curves;

const ExpanderCurve& curve(double d) {
    auto it = g_curves.find(d);
    if (it == g_curves.end()) {
        CurveParams p;
        p.d = d;
        it = g_curves.emplace(d, integrate_curve(p)).first;
    }
    return it->second;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = lo + (hi - lo) * i / (n - 1);
    return t;
}

double bottom(double d, OperatorKind kind) {
    return solve_bottom(build_problem(curve(d), kind, 16.0, 4001), 1).eigenvalues[0];
}

// ---------------------------------------------------------------- criteria

void criterion_1() {
    Criterion c{1, "hyperplane drifted bottom 0.5 and product shift to 1.0"};
    const SpectrumResult res = solve_bottom(build_problem(curve(0.0), OperatorKind::drifted,
                                                          16.0, 4001), 1);
    const double lam = res.eigenvalues[0];
    c.expect(std::abs(lam - 0.5) <= 1e-6, "curve bottom " + fmt(lam) + " misses 0.5 by > 1e-6");
    const double plane = product_bottom(res, 1);
    c.expect(plane == lam + 0.5, "product bottom is not exactly curve + 1/2");
    c.expect(std::abs(plane - 1.0) <= 1e-6, "plane bottom " + fmt(plane) + " misses 1.0");
    c.expect(c.seconds() < 5.0, "runtime exceeded 5 s");
}

void criterion_2() {
    Criterion c{2, "stability bottom 1.0 on every member, 1.5 with a flat factor"};
    for (double d : {0.0, 0.5, 1.0, 2.0}) {
        const SpectrumResult res = solve_bottom(build_problem(curve(d), OperatorKind::stability,
                                                              16.0, 4001), 1);
        const double mu = res.eigenvalues[0];
        c.expect(std::abs(mu - 1.0) <= 1e-3,
                 "d = " + fmt(d) + ": stability bottom " + fmt(mu) + " misses 1.0 by > 1e-3");
        const double prod = product_bottom(res, 1);
        c.expect(std::abs(prod - 1.5) <= 1e-3,
                 "d = " + fmt(d) + ": product stability bottom " + fmt(prod) + " misses 1.5");
    }
    c.expect(c.seconds() < 30.0, "runtime exceeded 30 s");
}

void criterion_3() {
    Criterion c{3, "exact stability eigenpair residual <= 1e-5 on every tested curve"};
    for (double d : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const double r = exact_eigenpair_residual(curve(d), 1e-3).max_abs_residual;
        c.expect(r <= 1e-5, "d = " + fmt(d) + ": residual " + fmt(r));
    }
}

void criterion_4() {
    Criterion c{4, "first integral drift <= 1e-8 over |s| <= 20"};
    for (double d : {0.5, 1.0, 2.0, 4.0}) {
        const double drift = curve(d).max_invariant_drift;
        c.expect(drift <= 1e-8, "d = " + fmt(d) + ": drift " + fmt(drift));
    }
}

void criterion_5() {
    Criterion c{5, "identity suite <= 1e-5 at step 1e-3 with order-2 convergence"};
    for (double d : {1.0, 2.0}) {
        auto gather = [&](double h) {
            std::vector<ResidualReport> reps = residual_simo(curve(d), h);
            reps.push_back(residual_test_eigenfunction(curve(d), 1.0, h));
            const std::vector<ResidualReport> lh = residual_L_alpha_H(curve(d), 1.0, h);
            reps.push_back(lh[0]);
            reps.push_back(lh[1]);
            return reps;
        };
        const std::vector<ResidualReport> fine = gather(1e-3);
        const std::vector<ResidualReport> coarse = gather(2e-3);
        for (size_t i = 0; i < fine.size(); ++i) {
            const std::string tag = "d = " + fmt(d) + " " + fine[i].identity_name;
            c.expect(fine[i].max_abs_residual <= 1e-5,
                     tag + ": residual " + fmt(fine[i].max_abs_residual));
            c.expect(fine[i].warning.empty(), tag + ": grid warning raised");
            if (fine[i].identity_name == "grad-A-vs-grad-H") {
                c.expect(fine[i].max_abs_residual == 0.0, tag + ": expected exact zero");
                continue;  // 0/0 has no convergence order to measure
            }
            const double ratio = coarse[i].max_abs_residual / fine[i].max_abs_residual;
            c.expect(ratio >= 3.5, tag + ": halving ratio " + fmt(ratio) + " < 3.5");
        }
    }
}

void criterion_6() {
    Criterion c{6, "independent sandwich 1/2 < bottom <= 1/2 + mean H^2, gap to stability"};
    for (double d : {0.5, 1.0, 2.0}) {
        const double lam = bottom(d, OperatorKind::drifted);
        const double mu = bottom(d, OperatorKind::stability);
        const double mean_h2 = weighted_H_power(curve(d), 2, 1.0).integral.value /
                               weighted_volume(curve(d), 1.0).value;
        const std::string tag = "d = " + fmt(d);
        c.expect(lam - 0.5 > 1e-4, tag + ": lower margin " + fmt(lam - 0.5) + " not strict");
        c.expect(lam <= 0.5 + mean_h2 + 1e-6,
                 tag + ": bottom " + fmt(lam) + " above 1/2 + mean H^2 = " + fmt(0.5 + mean_h2));
        c.expect(mu <= lam + 0.5 + 1e-6, tag + ": stability bottom exceeds drifted + 1/2");
    }
}

void criterion_7() {
    Criterion c{7, "general-weight eigenvalue bounds at alpha in {1, 2, 4}"};
    for (double alpha : {1.0, 2.0, 4.0}) {
        const std::vector<BoundReport> reps = check_bounds(curve(1.0), 0, alpha);
        for (size_t i : {size_t(2), size_t(6)}) {
            const std::string tag = "alpha = " + fmt(alpha) + " " + reps[i].name;
            c.expect(reps[i].pass, tag + ": failed");
            c.expect(reps[i].margin >= -1e-6, tag + ": margin " + fmt(reps[i].margin));
        }
    }
}

void criterion_8() {
    Criterion c{8, "weighted volume: hyperplane value and Cauchy tails"};
    const QuadratureResult line = weighted_volume(curve(0.0), 1.0);
    const double want = 2 * std::sqrt(3.14159265358979323846);
    c.expect(std::abs(line.value - want) <= 1e-8 + line.tail_bound,
             "line volume " + fmt(line.value) + " misses 2 sqrt(pi)");
    CurveParams wide_p;
    wide_p.d = 1.0;
    wide_p.s_max = 24.0;
    wide_p.samples_hint = 48001;
    const ExpanderCurve wide = integrate_curve(wide_p);
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
        const double inc =
            std::abs(weighted_volume(wide, alpha).value - weighted_volume(curve(1.0), alpha).value);
        c.expect(inc <= 1e-8,
                 "alpha = " + fmt(alpha) + ": increment " + fmt(inc) + " beyond s_max = 20");
    }
}

void criterion_9() {
    Criterion c{9, "growth table passes and the far ratio is linear"};
    const std::vector<double> small = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    for (double d : {0.0, 1.0}) {
        for (const GrowthRow& row : ball_growth(curve(d), small, 1.0))
            c.expect(row.pass, "d = " + fmt(d) + ", r = " + fmt(row.r) + ": row failed");
    }
    for (const GrowthRow& row :
         ball_growth(curve(1.0), {10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}, 1.0)) {
        const double ratio = row.vol / row.r;
        c.expect(ratio >= 1.8 && ratio <= 2.2,
                 "r = " + fmt(row.r) + ": vol/r = " + fmt(ratio) + " outside [1.8, 2.2]");
    }
}

void criterion_10() {
    Criterion c{10, "monotone functionals and hyperplane divergence closed forms"};
    const std::vector<double> tg = linspace(1.0, std::exp(0.1), 50);
    const ProbeSeries on_line = functional_I(curve(0.0), 1.0, {0.0, 0.0}, 4.0, tg);
    c.expect(on_line.monotone, "hyperplane functional not nonincreasing");
    double sup_kappa = 0.0;
    for (const CurveSample& s : curve(1.0).samples)
        sup_kappa = std::max(sup_kappa, std::abs(s.kappa));
    const ProbeSeries off_line = functional_I(curve(1.0), 1.0, {0.0, sup_kappa}, 4.0, tg);
    c.expect(off_line.monotone, "d = 1 functional not nonincreasing");

    // t = 1 carries no scaling: the first point is the plain weighted mass
    const double direct = on_line.points[0].second;
    c.expect(std::abs(direct - 2 * std::sqrt(3.14159265358979323846) *
                                   std::erf(4.0 / 2.0)) <= 1e-10,
             "I(1) does not reduce to the definition on the hyperplane");

    const std::vector<double> radii = linspace(2.0, 20.0, 50);
    const ProbeSeries div_line = divergence_probe(curve(0.0), 0.0, 1.0, radii);
    c.expect(div_line.monotone, "hyperplane divergence probe not nondecreasing");
    double worst = 0.0;
    for (const auto& [t, v] : div_line.points)
        worst = std::max(worst, std::abs(v - (2 * t - 2) / t));
    c.expect(worst <= 1e-10, "line divergence closed form off by " + fmt(worst));

    const ProbeSeries div_plane =
        divergence_probe(ProductExpander{curve(0.0), 1}, 0.0, 1.0, radii);
    c.expect(div_plane.monotone, "plane divergence probe not nondecreasing");
    worst = 0.0;
    for (const auto& [t, v] : div_plane.points)
        worst = std::max(worst, std::abs(v - 3.14159265358979323846 * (t * t - 1) / (t * t)));
    c.expect(worst <= 1e-10, "plane divergence closed form off by " + fmt(worst));
}

void criterion_11() {
    Criterion c{11, "rigidity contrapositives with closed-form vertex witnesses"};
    for (double d : {0.5, 1.0, 2.0}) {
        const double q1_vertex = d * d * d * d / 16 + d * d / 8;
        const double q2_vertex = -(d * d * d / 8 + d / 4);
        const std::string tag = "d = " + fmt(d);
        for (double beta : {0.5, 1.0, 10.0}) {
            const AuditReport rep = audit_thm13(curve(d), beta);
            c.expect(!rep.hypothesis_holds, tag + ": quartic hypothesis claimed to hold");
            c.expect(rep.extremum == q1_vertex,
                     tag + ": quartic witness " + fmt(rep.extremum) + " != " + fmt(q1_vertex));
            c.expect(rep.witness_s == 0.0, tag + ": quartic witness not at the vertex");
        }
        for (double alpha : {1.0, 2.0, 100.0}) {
            const AuditReport rep = audit_thm14(curve(d), alpha);
            c.expect(!rep.hypothesis_holds, tag + ": cubic hypothesis claimed to hold");
            c.expect(rep.extremum == q2_vertex,
                     tag + ": cubic witness " + fmt(rep.extremum) + " != " + fmt(q2_vertex));
            c.expect(rep.witness_s == 0.0, tag + ": cubic witness not at the vertex");
        }
    }
    c.expect(audit_thm13(curve(0.0), 1.0).hypothesis_holds,
             "hyperplane quartic hypothesis must hold");
    c.expect(audit_thm14(curve(0.0), 1.0).hypothesis_holds,
             "hyperplane cubic hypothesis must hold");
}

void criterion_12() {
    Criterion c{12, "two report runs emit byte-identical JSON"};
    auto run_report = [](const std::string& path) {
        const std::string cmd = std::string("\"") + EXPANDERLAB_PATH +
                                "\" report --d 1 > " + path + " 2>/dev/null";
        const int status = std::system(cmd.c_str());
        return (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    };
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const std::string p1 = "/tmp/expanderlab_accept_report1.json";
    const std::string p2 = "/tmp/expanderlab_accept_report2.json";
    c.expect(run_report(p1) == 0, "first report run did not exit 0");
    c.expect(run_report(p2) == 0, "second report run did not exit 0");
    const std::string a = slurp(p1), b = slurp(p2);
    c.expect(!a.empty(), "report produced no output");
    c.expect(a == b, "consecutive report runs differ");
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

}  // namespace

int main() {
    std::printf("acceptance gate: 12 criteria\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
