#include "selfaffine/errors.hpp"
#include "selfaffine/rng.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/sampling.hpp"
#include "selfaffine/words.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace selfaffine;

// Equal non-diagonal maps make the word sum collapse to one matrix power:
//   S_n = phi^sigma(T^n)^{1-q} (sum p_i^q)^n,
// so the limiting pressure is (1-q) phi^sigma_star + log sum p_i^q with the
// rates of T known from its triangular structure. That gives an independent
// oracle for the finite-level estimates, brackets, and roots.
namespace {

IFSSpec equal_shear_spec() {
    LinearMap t(2);
    t.at(0, 0) = 0.4;
    t.at(0, 1) = 0.15;
    t.at(1, 1) = 0.25;
    return make_ifs(2, {t, t}, {}, {0.6, 0.4});
}

// phi^s_star for rates lam1 >= lam2
double phi_star_rates(double s, double lam1, double lam2) {
    if (s <= 1.0) return s * lam1;
    if (s <= 2.0) return lam1 + (s - 1.0) * lam2;
    return (lam1 + lam2) * (s / 2.0);
}

double true_pressure(const IFSSpec& spec, double sigma, double q) {
    double lam1 = std::log(0.4), lam2 = std::log(0.25);
    double sum = 0.0;
    for (double p : spec.probabilities) sum += std::pow(p, q);
    return (1.0 - q) * phi_star_rates(sigma, lam1, lam2) + std::log(sum);
}

double true_root_D(const IFSSpec& spec, double q) {
    // (1-q) phi^sigma_star = -log sum p^q, piecewise linear in sigma
    double lam1 = std::log(0.4), lam2 = std::log(0.25);
    double sum = 0.0;
    for (double p : spec.probabilities) sum += std::pow(p, q);
    double target = -std::log(sum) / (1.0 - q);
    double sigma;
    if (target >= lam1) {
        sigma = target / lam1;
    } else if (target >= lam1 + lam2) {
        sigma = 1.0 + (target - lam1) / lam2;
    } else {
        sigma = 2.0 * target / (lam1 + lam2);
    }
    return (q - 1.0) * sigma;
}

} // namespace

TEST_CASE("finite-level brackets enclose the true pressure") {
    auto spec = equal_shear_spec();
    REQUIRE(!spec.exact_pressure);
    std::vector<int> schedule{4, 8, 12, 16};
    for (double q : {0.3, 0.6, 0.85}) {
        for (double sigma : {0.3, 0.8, 1.4, 2.2}) {
            auto probe = pressure(spec, sigma, q, schedule);
            CHECK(probe.upper >= true_pressure(spec, sigma, q) - 1e-12);
        }
    }
    for (double q : {1.3, 1.8, 2.4}) {
        for (double sigma : {0.3, 0.8, 1.4}) {
            auto probe = pressure(spec, sigma, q, schedule);
            CHECK(probe.lower <= true_pressure(spec, sigma, q) + 1e-12);
        }
    }
}

TEST_CASE("finite-level roots approach the analytic limit as the budget grows") {
    auto spec = equal_shear_spec();
    for (double q : {0.5, 1.6}) {
        double truth = true_root_D(spec, q);
        SolveOptions small, big;
        small.solve_budget = 1 << 9;  // level 8
        big.solve_budget = 1 << 17;   // level 16
        auto coarse = solve_D(spec, q, small);
        auto fine = solve_D(spec, q, big);
        CHECK(fine.level > coarse.level);
        CHECK(std::abs(fine.value - truth) < std::abs(coarse.value - truth) + 1e-12);
        CHECK(std::abs(fine.value - truth) < 0.05);
        CHECK(fine.drift > 0.0);
        CHECK(fine.drift < 0.05);
    }
}

TEST_CASE("cylinder-ball lower bounds hold at word length 8 on a planar spec") {
    auto base = make_homogeneous_diagonal({0.4, 0.3}, {}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    auto tr = random_translations(3, 2, 1.0, 515);
    auto spec = make_ifs(2, base.maps, tr, base.probabilities);
    ChaosGameOptions opt;
    opt.count = 150'000;
    opt.seed = 516;
    auto sample = chaos_game(spec, opt);

    // fixed-length words
    Philox rng(517);
    std::vector<std::vector<int>> words;
    for (int w = 0; w < 12; ++w) {
        std::vector<int> word(8);
        for (int& c : word) c = static_cast<int>(rng.next_below(3));
        words.push_back(word);
    }
    auto checks = check_measure_inequalities(sample, words, 518);
    for (const auto& chk : checks) {
        CHECK(chk.status != CheckStatus::Violation);
        if (chk.kind == "cylinder-ball" && chk.status == CheckStatus::Pass)
            CHECK(chk.lhs >= chk.rhs - 3.0 * chk.sigma);
    }
}

TEST_CASE("config-less moment budget errors surface the level") {
    auto spec = equal_shear_spec();
    CHECK_THROWS_AS(log_moment_sum(spec, 40, 1.0, 0.5, 1000), BudgetError);
}
