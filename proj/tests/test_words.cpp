#include "selfaffine/errors.hpp"
#include "selfaffine/ifs.hpp"
#include "selfaffine/logsum.hpp"
#include "selfaffine/rng.hpp"
#include "selfaffine/words.hpp"

#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

using namespace selfaffine;

namespace {

IFSSpec cantor_spec() {
    return make_homogeneous_diagonal({1.0 / 3.0}, {{0.0}, {2.0 / 3.0}}, {0.5, 0.5});
}

IFSSpec random_nondiag_spec(Philox& rng, int d, int m) {
    std::vector<LinearMap> maps;
    for (int i = 0; i < m; ++i) {
        LinearMap mm(d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) mm.at(r, c) = 2.0 * rng.next_double() - 1.0;
        double norm = singular_values(mm).norm();
        double target = 0.15 + 0.3 * rng.next_double();
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) mm.at(r, c) *= target / norm;
        maps.push_back(mm);
    }
    std::vector<double> p(m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        p[i] = 0.2 + rng.next_double();
        sum += p[i];
    }
    for (int i = 0; i < m; ++i) p[i] /= sum;
    // renormalize exactly
    double s2 = std::accumulate(p.begin(), p.end() - 1, 0.0);
    p.back() = 1.0 - s2;
    return make_ifs(d, std::move(maps), {}, std::move(p));
}

} // namespace

TEST_CASE("log-sum-exp accumulator matches direct sums and survives extremes") {
    LogSumExp acc;
    for (double x : {-1.0, 0.5, 2.0, -3.0}) acc.add(x);
    double direct = std::log(std::exp(-1.0) + std::exp(0.5) + std::exp(2.0) + std::exp(-3.0));
    CHECK(acc.value() == doctest::Approx(direct).epsilon(1e-14));

    LogSumExp huge;
    huge.add(-1000.0);
    huge.add(-1000.0);
    CHECK(huge.value() == doctest::Approx(-1000.0 + std::log(2.0)));

    LogSumExp a, b;
    a.add(-5.0);
    a.add(1.0);
    b.add(3.0);
    b.add(-700.0);
    a.merge(b);
    double all = std::log(std::exp(-5.0) + std::exp(1.0) + std::exp(3.0) + std::exp(-700.0));
    CHECK(a.value() == doctest::Approx(all).epsilon(1e-14));
}

TEST_CASE("ifs validation") {
    CHECK_THROWS_WITH_AS(
        make_homogeneous_diagonal({0.4}, {}, {0.6, 0.6}),
        doctest::Contains("sum to 1.2"), ValidationError);

    CHECK_THROWS_AS(make_homogeneous_diagonal({1.1}, {}, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(make_homogeneous_diagonal({0.4}, {}, {0.5, -0.5}), ValidationError);

    auto spec = cantor_spec();
    CHECK(spec.strict_half);
    CHECK(spec.diagonal_ordered);
    CHECK(spec.exact_pressure);
    CHECK(spec.similitude);
    CHECK(spec.bounding_radius() == doctest::Approx(1.0));

    // ordered needs strictly decreasing entries; equal entries only align
    auto sq = make_homogeneous_diagonal({0.3, 0.3}, {}, {0.5, 0.5});
    CHECK(!sq.diagonal_ordered);
    CHECK(sq.diagonal_aligned);
    CHECK(sq.similitude);

    auto mixed = make_ifs(
        2, {LinearMap::diagonal(std::vector<double>{0.2, 0.4}),
            LinearMap::diagonal(std::vector<double>{0.4, 0.2})},
        {}, {0.5, 0.5});
    CHECK(!mixed.diagonal_aligned);
    CHECK(!mixed.exact_pressure);
}

TEST_CASE("enumerate_words: counts, probabilities, profiles") {
    auto spec = make_homogeneous_diagonal({1.0 / 3.0}, {}, {0.7, 0.3});
    std::vector<double> single_logs;
    enumerate_words(spec, 1, [&](std::span<const int> w, double log_p, const SingularProfile&) {
        CHECK(w.size() == 1);
        single_logs.push_back(log_p);
    });
    REQUIRE(single_logs.size() == 2);
    CHECK(single_logs[0] == doctest::Approx(std::log(0.7)));
    CHECK(single_logs[1] == doctest::Approx(std::log(0.3)));

    auto cantor = cantor_spec();
    int count = 0;
    double psum = 0.0;
    enumerate_words(cantor, 3, [&](std::span<const int> w, double log_p, const SingularProfile&) {
        CHECK(w.size() == 3);
        psum += std::exp(log_p);
        ++count;
    });
    CHECK(count == 8);
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate_words: profiles match scratch recomputation, m=3 n=4") {
    Philox rng(31);
    auto spec = random_nondiag_spec(rng, 2, 3);
    double psum = 0.0;
    int count = 0;
    enumerate_words(spec, 4, [&](std::span<const int> w, double log_p, const SingularProfile& p) {
        ++count;
        psum += std::exp(log_p);
        CHECK(p.values[0] >= p.values[1]);
        // independent recomputation of the product from scratch
        std::vector<int> word(w.begin(), w.end());
        auto direct = singular_values(word_matrix(spec.maps, word));
        for (int i = 0; i < 2; ++i)
            CHECK(p.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-10));
        double lp = 0.0;
        for (int letter : w) lp += std::log(spec.probabilities[letter]);
        CHECK(log_p == doctest::Approx(lp).epsilon(1e-12));
    });
    CHECK(count == 81);
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate_words: budget rejection names the budget") {
    auto spec = cantor_spec();
    CHECK_THROWS_WITH_AS(
        enumerate_words(spec, 10, [](std::span<const int>, double, const SingularProfile&) {},
                        100),
        doctest::Contains("budget 100"), BudgetError);
}

TEST_CASE("moment_sum: q=1 gives 0, sigma=0 gives n log sum p^q") {
    Philox rng(37);
    auto spec = random_nondiag_spec(rng, 2, 2);
    CHECK(log_moment_sum(spec, 5, 0.7, 1.0) == doctest::Approx(0.0).epsilon(1e-10));

    double q = 1.7;
    double expect = 0.0;
    for (double p : spec.probabilities) expect += std::pow(p, q);
    CHECK(log_moment_sum(spec, 4, 0.0, q) == doctest::Approx(4.0 * std::log(expect)));
}

TEST_CASE("moment_sum: cantor root value vanishes at sigma = log2/log3, q=2") {
    auto spec = cantor_spec();
    double sigma = std::log(2.0) / std::log(3.0);
    for (int n : {1, 3, 7})
        CHECK(log_moment_sum(spec, n, sigma, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("moment_sum: diagonal factorization matches enumeration") {
    // aligned diagonal spec: exact path must equal the brute word sum
    auto spec = make_ifs(2,
                         {LinearMap::diagonal(std::vector<double>{0.45, 0.2}),
                          LinearMap::diagonal(std::vector<double>{0.3, 0.25})},
                         {}, {0.7, 0.3});
    REQUIRE(spec.exact_pressure);
    for (double q : {0.4, 2.3})
        for (double sigma : {0.5, 1.4, 2.0, 3.1}) {
            double exact = log_moment_sum(spec, 6, sigma, q);
            LogSumExp acc;
            enumerate_words(spec, 6,
                            [&](std::span<const int>, double lp, const SingularProfile& p) {
                                acc.add((1.0 - q) * p.log_phi(sigma) + q * lp);
                            });
            CHECK(exact == doctest::Approx(acc.value()).epsilon(1e-10));
        }
}

TEST_CASE("moment_sum: sub-additive in n for 0<q<1, permutation invariant") {
    Philox rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        auto spec = random_nondiag_spec(rng, 2, 2);
        double q = 0.2 + 0.6 * rng.next_double();
        double sigma = 1.5 * rng.next_double();
        double s1 = log_moment_sum(spec, 1, sigma, q);
        double s2 = log_moment_sum(spec, 2, sigma, q);
        double s3 = log_moment_sum(spec, 3, sigma, q);
        double s4 = log_moment_sum(spec, 4, sigma, q);
        CHECK(s2 <= s1 + s1 + 1e-10);
        CHECK(s3 <= s1 + s2 + 1e-10);
        CHECK(s4 <= s2 + s2 + 1e-10);
        CHECK(s4 <= s1 + s3 + 1e-10);

        // relabeling maps leaves S_n unchanged
        std::vector<LinearMap> maps{spec.maps[1], spec.maps[0]};
        std::vector<double> probs{spec.probabilities[1], spec.probabilities[0]};
        auto relabeled = make_ifs(2, std::move(maps), {}, std::move(probs));
        CHECK(log_moment_sum(relabeled, 3, sigma, q) == doctest::Approx(s3).epsilon(1e-10));
    }
}

TEST_CASE("spec hash: stable under identity, sensitive to content") {
    auto a = cantor_spec();
    auto b = cantor_spec();
    CHECK(a.hash() == b.hash());
    auto c = make_homogeneous_diagonal({1.0 / 3.0}, {{0.0}, {2.0 / 3.0}}, {0.4, 0.6});
    CHECK(a.hash() != c.hash());
    CHECK(a.hash_hex().size() == 16);
}
