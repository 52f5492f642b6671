#include "selfaffine/closed_forms.hpp"
#include "selfaffine/errors.hpp"
#include "selfaffine/pressure.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace selfaffine;

namespace {
const std::vector<double> kHalf{0.5, 0.5};
}

TEST_CASE("equal maps closed form: first regime at q = 0.5 and q = 2") {
    std::vector<double> t{0.4, 0.2};
    auto v = equal_maps_closed_form(t, kHalf, 0.5);
    CHECK(v.regime == 0);
    CHECK(v.A == doctest::Approx(0.5).epsilon(1e-12));
    double expect = std::log(2.0 * std::sqrt(0.5)) / std::log(0.4);
    CHECK(v.tau == doctest::Approx(expect).epsilon(1e-12));
    CHECK(v.D == doctest::Approx(-0.378235).epsilon(1e-5));

    auto v2 = equal_maps_closed_form(t, kHalf, 2.0);
    CHECK(v2.tau == doctest::Approx(std::log(0.5) / std::log(0.4)).epsilon(1e-12));
}

TEST_CASE("equal maps closed form: deep regime gives d(q-1)") {
    // many maps push A(q) = 1/m below t_1 t_2, activating the last branch
    std::vector<double> t{0.45, 0.35};
    std::vector<double> p(16, 1.0 / 16.0);
    auto v = equal_maps_closed_form(t, p, 2.0);
    CHECK(v.regime == 2);
    CHECK(v.tau == doctest::Approx(2.0));
    // unclamped D: d log sum p^q / log(t1 t2)
    double expect_D = 2.0 * std::log(1.0 / 16.0) / std::log(0.45 * 0.35);
    CHECK(v.D == doctest::Approx(expect_D).epsilon(1e-12));
    CHECK(v.D > v.tau); // clamp active for q > 1
}

TEST_CASE("equal maps closed form: adjacent branches agree at the boundary") {
    std::vector<double> t{0.6, 0.01};
    std::vector<double> p{0.9, 0.1};
    auto jump = slope_jump_at_crossing(t, p, 1); // locates A(q*) = t_1
    double q = jump.q_cross;
    auto below = equal_maps_closed_form(t, p, q - 1e-9);
    auto above = equal_maps_closed_form(t, p, q + 1e-9);
    CHECK(below.regime != above.regime);
    CHECK(below.tau == doctest::Approx(above.tau).epsilon(1e-7));
    // at the boundary both branches reduce to q - 1
    CHECK(below.tau == doctest::Approx(q - 1.0).epsilon(1e-7));
}

TEST_CASE("equal maps closed form matches the pressure solver") {
    auto spec = make_homogeneous_diagonal({0.4, 0.2}, {}, kHalf);
    for (double q : {0.25, 0.5, 0.8, 1.3, 2.0, 2.7}) {
        auto cf = equal_maps_closed_form(spec, q);
        auto tv = solve_tau(spec, q);
        CHECK(tv.tau == doctest::Approx(cf.tau).epsilon(1e-9));
    }
}

TEST_CASE("slope jump: positive for skewed probabilities") {
    std::vector<double> t{0.6, 0.01};
    std::vector<double> p{0.9, 0.1};
    auto jump = slope_jump_at_crossing(t, p, 1);
    CHECK(jump.q_cross > 0.0);
    CHECK(jump.q_cross < 1.0);
    // oracle: independent root-find on A(q) = t_1 and direct evaluation
    auto A = [&](double q) {
        return std::pow(std::pow(0.9, q) + std::pow(0.1, q), 1.0 / (q - 1.0));
    };
    CHECK(A(jump.q_cross) == doctest::Approx(0.6).epsilon(1e-9));
    double s = std::pow(0.9, jump.q_cross) + std::pow(0.1, jump.q_cross);
    double ds = (std::pow(0.9, jump.q_cross) * std::log(0.9) +
                 std::pow(0.1, jump.q_cross) * std::log(0.1)) / s;
    double expect = (std::log(s) / (jump.q_cross - 1.0) - ds) *
                    (1.0 / std::log(0.01) - 1.0 / std::log(0.6));
    CHECK(jump.jump == doctest::Approx(expect).epsilon(1e-10));
    CHECK(jump.jump > 0.0);

    // sign check: strict convexity defect times the ratio-gap factor
    double h2 = 1e-4;
    double conv = std::log(std::pow(0.9, jump.q_cross + h2) + std::pow(0.1, jump.q_cross + h2)) -
                  2.0 * std::log(s) +
                  std::log(std::pow(0.9, jump.q_cross - h2) + std::pow(0.1, jump.q_cross - h2));
    CHECK(conv > 0.0); // log sum p^x strictly convex for non-uniform p
}

TEST_CASE("slope jump: uniform p with matching product has zero jump") {
    std::vector<double> t{0.5, 0.2};
    auto jump = slope_jump_at_crossing(t, kHalf, 1); // A = 1/2 = t_1 everywhere
    CHECK(jump.jump == doctest::Approx(0.0));

    std::vector<double> t2{0.45, 0.2};
    CHECK_THROWS_WITH_AS(slope_jump_at_crossing(t2, kHalf, 1),
                         doctest::Contains("no crossing"), ConvergenceError);
}

TEST_CASE("rosc planar closed form: q = 1 vanishes, ordering enforced") {
    std::vector<double> p{0.5, 0.5};
    CHECK(rosc_planar_tau(0.4, 0.2, p, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(rosc_planar_tau(0.2, 0.2, p, 1.5), ValidationError);
    CHECK_THROWS_AS(rosc_planar_tau(0.6, 0.2, p, 1.5), ValidationError);
}

TEST_CASE("rosc planar closed form: uniform two-map system reduces to the column formula") {
    std::vector<double> p{0.5, 0.5};
    double t1 = 0.4, t2 = 0.2;
    // B'(1) = log2/log(1/0.4) < 1, B linear for uniform p, so tau_nu = B(q)
    // and the combination collapses to log sum p^q / log t1
    for (double q : {0.5, 1.5, 2.0}) {
        double expect = std::log(2.0 * std::pow(2.0, -q)) / std::log(t1);
        CHECK(rosc_planar_tau(t1, t2, p, q) == doctest::Approx(expect).epsilon(1e-9));
    }
    // same value through the equal-maps closed form on the planar system
    std::vector<double> t{t1, t2};
    for (double q : {0.5, 1.5, 2.0}) {
        auto v = equal_maps_closed_form(t, p, q);
        CHECK(rosc_planar_tau(t1, t2, p, q) == doctest::Approx(v.tau).epsilon(1e-9));
    }
}

TEST_CASE("rosc planar closed form: explicit tau_nu override") {
    std::vector<double> p{0.5, 0.5};
    double t1 = 0.4, t2 = 0.2;
    auto line = [&](double q) { return std::log(2.0 * std::pow(2.0, -q)) / std::log(t1); };
    double got = rosc_planar_tau(t1, t2, p, 1.5, line);
    double expect = line(1.5) * (1.0 - std::log(t1) / std::log(t2)) +
                    std::log(2.0 * std::pow(2.0, -1.5)) / std::log(t2);
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("similitude analytic solve matches the pressure root") {
    auto spec = make_homogeneous_diagonal({1.0 / 3.0}, {}, kHalf);
    for (double q : {0.5, 2.0, 3.0}) {
        double direct = similitude_D(spec, q);
        CHECK(direct == doctest::Approx((q - 1.0) * std::log(2.0) / std::log(3.0)).epsilon(1e-12));
        CHECK(direct == doctest::Approx(solve_D(spec, q).value).epsilon(1e-9));
    }
    // implicit derivative equals the closed-form slope for the linear spectrum
    CHECK(similitude_D_prime(spec, 1.7) ==
          doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("regime report: cantor system is clause 3 with linear spectrum") {
    auto spec = make_homogeneous_diagonal({1.0 / 3.0}, {}, kHalf);
    auto rep = regime_report(spec);
    double c = std::log(2.0) / std::log(3.0);
    CHECK(rep.clause == 3);
    CHECK(rep.D_prime_1 == doctest::Approx(c).epsilon(1e-12));
    CHECK(rep.q_tilde_min == doctest::Approx(0.0));
    CHECK(rep.q_max == doctest::Approx(1.0 + std::log(3.0) / std::log(2.0)).epsilon(1e-9));
    REQUIRE(rep.branches.size() == 1);
    CHECK(rep.branches[0].kind == 2);
    for (double q : {0.3, 1.0, 2.0, 2.5})
        CHECK(regime_tau(rep, spec, q) == doctest::Approx((q - 1.0) * c).epsilon(1e-9));
    CHECK(rep.interval_nonempty);
    CHECK(rep.interval_hi == doctest::Approx(1.0 + 1.0 / c).epsilon(1e-6));
}

TEST_CASE("regime report: high-entropy system is lebesgue-like") {
    // m = 9 maps, ratio 0.3, d = 1: D'(1) = log9/log(10/3) > 1, D(2)/(2-1) = ?
    auto spec = make_homogeneous_diagonal({0.3}, {}, std::vector<double>(9, 1.0 / 9.0));
    auto rep = regime_report(spec);
    CHECK(rep.clause == 2);
    // D(2): 9 * (1/81) * (0.3)^{-t} = 1 -> t = log 9 / log(1/0.3) approx 1.825 >= 1
    CHECK(rep.s_inf == doctest::Approx(std::log(9.0) / std::log(1.0 / 0.3)).epsilon(1e-9));
    CHECK(rep.lebesgue_like);
    CHECK(rep.q_max == doctest::Approx(2.0));
    CHECK(regime_tau(rep, spec, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("regime report: clause 2 with an interior crossing") {
    // skewed weights: D'(1) >= d yet D(2) < d, so tau switches branch at q_min
    auto spec = make_homogeneous_diagonal({0.45}, {}, {0.65, 0.2, 0.15});
    auto rep = regime_report(spec);
    CHECK(rep.clause == 2);
    CHECK(rep.D_prime_1 >= 1.0);
    CHECK(rep.s_inf == doctest::Approx(std::log(1.0 / 0.485) / std::log(1.0 / 0.45)).epsilon(1e-9));
    CHECK(rep.s_inf < 1.0);
    CHECK(!rep.lebesgue_like);
    REQUIRE(rep.branches.size() == 2);
    CHECK(rep.q_min > 1.0);
    CHECK(rep.q_min < 2.0);
    // continuity at the switch: d (q_min - 1) = D(q_min)
    CHECK(similitude_D(spec, rep.q_min) == doctest::Approx(rep.q_min - 1.0).epsilon(1e-8));
    CHECK(regime_tau(rep, spec, 0.5) == doctest::Approx(-0.5));
    CHECK(regime_tau(rep, spec, rep.q_max) ==
          doctest::Approx(similitude_D(spec, rep.q_max)).epsilon(1e-9));
}

TEST_CASE("regime report: clause 3 with a positive tangent point") {
    // overlapping-rich system with low entropy: -D(0) > d but D'(1) < d
    auto spec = make_homogeneous_diagonal({0.4}, {}, {0.85, 0.05, 0.05, 0.05});
    auto rep = regime_report(spec);
    CHECK(rep.clause == 3);
    CHECK(rep.D_prime_1 < 1.0);
    CHECK(rep.q_tilde_min > 0.0);
    CHECK(rep.q_tilde_min < 1.0);
    REQUIRE(rep.branches.size() == 2);
    CHECK(rep.branches[0].kind == 1);
    // the tangent line passes through (0, -d) and touches D at q_tilde_min
    double qt = rep.q_tilde_min;
    CHECK(rep.branches[0].slope * qt - 1.0 ==
          doctest::Approx(similitude_D(spec, qt)).epsilon(1e-8));
    // tangency: slope equals D'(q_tilde_min)
    CHECK(rep.branches[0].slope == doctest::Approx(similitude_D_prime(spec, qt)).epsilon(1e-6));
    CHECK(regime_tau(rep, spec, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("regime report: rejects non-similitudes and wide norms") {
    auto aff = make_homogeneous_diagonal({0.4, 0.2}, {}, kHalf);
    CHECK_THROWS_AS(regime_report(aff), ValidationError);
    auto wide = make_homogeneous_diagonal({0.6}, {}, kHalf);
    CHECK_THROWS_AS(regime_report(wide), ValidationError);
}
