#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "expander/curve.hpp"
#include "expander/errors.hpp"
#include "expander/spectral.hpp"

using namespace expander;

namespace {
ExpanderCurve make(double d) {
    CurveParams p;
    p.d = d;
    return integrate_curve(p);
}

const std::vector<std::string> kNames = {
    "bottom-drifted-vs-inf-H2",       "bottom-drifted-vs-mean-H2",
    "bottom-drifted-alpha-family",    "bottom-stability-vs-inf-scal",
    "bottom-stability-vs-mean-scal",  "stability-vs-drifted-gap",
    "bottom-stability-alpha-family"};
}  // namespace

TEST_CASE("all seven inequalities hold on the test grid") {
    for (double d : {0.0, 0.5, 1.0, 2.0}) {
        const ExpanderCurve c = make(d);
        for (double alpha : {1.0, 2.0, 4.0}) {
            for (int k : {0, 1}) {
                const std::vector<BoundReport> reps = check_bounds(c, k, alpha);
                REQUIRE(reps.size() == 7);
                for (size_t i = 0; i < reps.size(); ++i) {
                    INFO("d = ", d, ", alpha = ", alpha, ", flat = ", k, ": ", reps[i].name);
                    CHECK(reps[i].name == kNames[i]);
                    CHECK(reps[i].pass);
                    CHECK(reps[i].margin == reps[i].rhs - reps[i].lhs);
                    CHECK(reps[i].margin >= -reps[i].tol);
                }
            }
        }
    }
}

TEST_CASE("declared slack per inequality") {
    const std::vector<BoundReport> reps = check_bounds(make(1.0), 0, 1.0);
    const double tols[7] = {1e-5, 1e-6, 1e-6, 1e-5, 1e-5, 1e-6, 1e-6};
    for (int i = 0; i < 7; ++i) CHECK(reps[i].tol == tols[i]);
}

TEST_CASE("equality cases land on the hyperplane within discretization error") {
    const std::vector<BoundReport> reps = check_bounds(make(0.0), 0, 1.0);
    // with alpha = 1 and no flat factors every report is an equality case
    const bool eq[7] = {true, true, true, true, true, true, true};
    for (int i = 0; i < 7; ++i) {
        INFO(reps[i].name);
        CHECK(reps[i].equality_expected == eq[i]);
        CHECK(std::abs(reps[i].margin) <= 1e-5);
    }
    // stability = drifted + 1/2 exactly on the hyperplane: the gap survives
    // discretization bit for bit, unlike the other six margins
    CHECK(std::abs(reps[5].margin) <= 1e-12);
}

TEST_CASE("equality flags depend on the member and the weight, not on wishful defaults") {
    const std::vector<BoundReport> line2 = check_bounds(make(0.0), 0, 2.0);
    const bool eq_line_a2[7] = {true, true, false, true, true, true, false};
    for (int i = 0; i < 7; ++i) CHECK(line2[i].equality_expected == eq_line_a2[i]);

    const std::vector<BoundReport> off = check_bounds(make(1.0), 0, 1.0);
    const bool eq_off[7] = {false, false, false, true, true, false, false};
    for (int i = 0; i < 7; ++i) CHECK(off[i].equality_expected == eq_off[i]);
}

TEST_CASE("hyperplane alpha families collapse to closed forms") {
    for (double alpha : {2.0, 4.0}) {
        const std::vector<BoundReport> reps = check_bounds(make(0.0), 0, alpha);
        const double rhs3 = (alpha + 1) * (alpha + 1) / (8 * alpha);
        const double rhs7 = (alpha + 3) / 4 - (alpha * alpha - 1) / (8 * alpha);
        INFO("alpha = ", alpha);
        CHECK(reps[2].rhs == doctest::Approx(rhs3).epsilon(1e-7));
        CHECK(reps[6].rhs == doctest::Approx(rhs7).epsilon(1e-7));
        // one flat factor doubles the Gaussian moment contributions
        const std::vector<BoundReport> prod = check_bounds(make(0.0), 1, alpha);
        CHECK(prod[2].rhs ==
              doctest::Approx((alpha + 1) * (alpha + 1) / (4 * alpha)).epsilon(1e-7));
    }
}

TEST_CASE("strict gaps off the hyperplane") {
    for (double d : {0.5, 1.0, 2.0}) {
        const std::vector<BoundReport> reps = check_bounds(make(d), 0, 1.0);
        INFO("d = ", d);
        CHECK(reps[0].margin > 1e-4);  // bottom strictly above 1/2
        CHECK(reps[1].margin > 1e-4);  // and strictly below 1/2 + mean H^2
        CHECK(reps[5].margin > 1e-4);  // stability bottom strictly below drifted + 1/2
    }
    // frozen: the mean-curvature ceiling at d = 1
    const std::vector<BoundReport> one = check_bounds(make(1.0), 0, 1.0);
    CHECK(one[1].rhs == doctest::Approx(0.64044001389014871).epsilon(1e-10));
}

TEST_CASE("flat factors shift both sides consistently") {
    const std::vector<BoundReport> flat0 = check_bounds(make(1.0), 0, 1.0);
    const std::vector<BoundReport> flat1 = check_bounds(make(1.0), 1, 1.0);
    // bound 1: lhs = n/2 + inf H^2 and rhs = bottom both gain exactly 1/2
    CHECK(flat1[0].lhs == doctest::Approx(flat0[0].lhs + 0.5).epsilon(1e-12));
    CHECK(flat1[0].rhs == doctest::Approx(flat0[0].rhs + 0.5).epsilon(1e-12));
    CHECK(flat1[0].margin == doctest::Approx(flat0[0].margin).epsilon(1e-9));
    // bounds 4/5: both sides gain 1/2 -> margins unchanged
    CHECK(flat1[3].lhs == doctest::Approx(flat0[3].lhs + 0.5).epsilon(1e-12));
    CHECK(flat1[4].margin == doctest::Approx(flat0[4].margin).epsilon(1e-9));
}

TEST_CASE("precondition checks") {
    const ExpanderCurve c = make(1.0);
    try {
        check_bounds(c, -1, 1.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::domain);
    }
    try {
        check_bounds(c, 0, 0.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::domain);
    }
}
