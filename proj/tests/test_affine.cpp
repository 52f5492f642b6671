#include "selfaffine/affine.hpp"
#include "selfaffine/errors.hpp"
#include "selfaffine/rng.hpp"

#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

using namespace selfaffine;

namespace {

LinearMap mat2(double a, double b, double c, double d) {
    LinearMap m(2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

// Independent oracle: singular values of a 2x2 matrix from the roots of the
// characteristic polynomial of M^T M (larger root directly, smaller through
// the determinant to dodge cancellation).
std::array<double, 2> svd2_oracle(const LinearMap& m) {
    double g00 = m.at(0, 0) * m.at(0, 0) + m.at(1, 0) * m.at(1, 0);
    double g11 = m.at(0, 1) * m.at(0, 1) + m.at(1, 1) * m.at(1, 1);
    double tr = g00 + g11;
    double det_m = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    double disc = std::sqrt(std::max(tr * tr - 4.0 * det_m * det_m, 0.0));
    double l1 = (tr + disc) / 2.0;
    return {std::sqrt(l1), std::sqrt(det_m * det_m / l1)};
}

// Rotation * diag * rotation with singular values in a bounded band, so the
// computed profiles carry full relative accuracy.
LinearMap random_contractive(Philox& rng, int d, double top) {
    std::vector<double> sv(d);
    sv[0] = top;
    for (int i = 1; i < d; ++i) sv[i] = sv[i - 1] * (0.3 + 0.7 * rng.next_double());
    LinearMap m = LinearMap::diagonal(sv);
    auto rotate = [&](bool left) {
        for (int p = 0; p < d - 1; ++p)
            for (int q = p + 1; q < d; ++q) {
                double th = 6.28318530717958648 * rng.next_double();
                double c = std::cos(th), s = std::sin(th);
                for (int k = 0; k < d; ++k) {
                    if (left) {
                        double a = m.at(p, k), b = m.at(q, k);
                        m.at(p, k) = c * a - s * b;
                        m.at(q, k) = s * a + c * b;
                    } else {
                        double a = m.at(k, p), b = m.at(k, q);
                        m.at(k, p) = c * a - s * b;
                        m.at(k, q) = s * a + c * b;
                    }
                }
            }
    };
    rotate(true);
    rotate(false);
    return m;
}

} // namespace

TEST_CASE("singular values: identity and diagonal") {
    auto id = LinearMap::identity(2);
    auto p = singular_values(id);
    CHECK(p.values[0] == doctest::Approx(1.0));
    CHECK(p.values[1] == doctest::Approx(1.0));

    std::vector<double> diag{0.4, 0.2};
    auto pd = singular_values(LinearMap::diagonal(diag));
    CHECK(pd.values[0] == doctest::Approx(0.4));
    CHECK(pd.values[1] == doctest::Approx(0.2));

    // sorting: entries given in increasing order still come out non-increasing
    std::vector<double> rev{0.2, 0.4};
    auto pr = singular_values(LinearMap::diagonal(rev));
    CHECK(pr.values[0] == doctest::Approx(0.4));
}

TEST_CASE("singular values: upper triangular vs characteristic polynomial oracle") {
    auto m = mat2(0.3, 0.1, 0.0, 0.3);
    auto p = singular_values(m);
    auto expect = svd2_oracle(m);
    CHECK(p.values[0] == doctest::Approx(expect[0]).epsilon(1e-12));
    CHECK(p.values[1] == doctest::Approx(expect[1]).epsilon(1e-12));
}

TEST_CASE("singular values: random 2x2 against oracle") {
    Philox rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        auto m = mat2(2 * rng.next_double() - 1, 2 * rng.next_double() - 1,
                      2 * rng.next_double() - 1, 2 * rng.next_double() - 1);
        if (std::abs(m.determinant()) < 1e-6) continue;
        auto p = singular_values(m);
        auto expect = svd2_oracle(m);
        CHECK(p.values[0] == doctest::Approx(expect[0]).epsilon(1e-10));
        CHECK(p.values[1] == doctest::Approx(expect[1]).epsilon(1e-8));
    }
}

TEST_CASE("singular values: rejects singular and non-finite input") {
    LinearMap z(2); // zero matrix
    CHECK_THROWS_AS(singular_values(z), ValidationError);

    auto nan = mat2(0.1, std::nan(""), 0.0, 0.1);
    CHECK_THROWS_AS(singular_values(nan), ValidationError);
}

TEST_CASE("phi_s: definition cases") {
    std::vector<double> diag{0.4, 0.2};
    auto m = LinearMap::diagonal(diag);

    CHECK(phi_s(m, 0.0) == doctest::Approx(1.0));
    CHECK(phi_s(m, 1.5) == doctest::Approx(0.4 * std::sqrt(0.2)));          // 0.17889
    CHECK(phi_s(m, 4.0) == doctest::Approx(std::pow(0.4 * 0.2, 2.0)));      // 0.0064
    CHECK(phi_s(m, 1.0) == doctest::Approx(0.4));
    CHECK(phi_s(m, 2.0) == doctest::Approx(0.08));
    CHECK_THROWS_AS(phi_s(m, -0.5), ValidationError);
}

TEST_CASE("phi_s: continuity at the integer knots") {
    Philox rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 2 + static_cast<int>(rng.next_below(3));
        auto m = random_contractive(rng, d, 0.2 + 0.6 * rng.next_double());
        auto p = singular_values(m);
        for (int k = 1; k <= d; ++k) {
            double below = p.log_phi(k - 1e-12);
            double at = p.log_phi(static_cast<double>(k));
            double above = p.log_phi(k + 1e-12);
            CHECK(std::abs(below - at) < 1e-9);
            CHECK(std::abs(above - at) < 1e-9);
        }
    }
}

TEST_CASE("phi_s: non-increasing in s for contractive maps") {
    Philox rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 1 + static_cast<int>(rng.next_below(4));
        auto m = random_contractive(rng, d, 0.1 + 0.8 * rng.next_double());
        auto p = singular_values(m);
        double prev = p.log_phi(0.0);
        for (double s = 0.1; s < d + 2.0; s += 0.1) {
            double cur = p.log_phi(s);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("phi_s: sub-multiplicative over random contractive pairs") {
    Philox rng(13);
    int violations = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        int d = 1 + static_cast<int>(rng.next_below(4));
        auto a = random_contractive(rng, d, 0.1 + 0.85 * rng.next_double());
        auto b = random_contractive(rng, d, 0.1 + 0.85 * rng.next_double());
        auto pa = singular_values(a);
        auto pb = singular_values(b);
        auto pab = singular_values(a * b);
        for (int k = 0; k < 10; ++k) {
            double s = (d + 1.0) * rng.next_double();
            double lhs = pab.log_phi(s);
            double rhs = pa.log_phi(s) + pb.log_phi(s);
            double slack = 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs));
            if (lhs > rhs + slack) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("word_matrix: empty word, single letters, diagonal products") {
    std::vector<double> d1{0.4, 0.2}, d2{0.3, 0.1};
    std::vector<LinearMap> maps{LinearMap::diagonal(d1), LinearMap::diagonal(d2)};

    auto id = word_matrix(maps, std::vector<int>{});
    CHECK(id.at(0, 0) == doctest::Approx(1.0));
    CHECK(id.at(0, 1) == doctest::Approx(0.0));

    auto t1 = word_matrix(maps, std::vector<int>{0});
    CHECK(t1.at(0, 0) == doctest::Approx(0.4));

    // diagonal products multiply entrywise
    auto prod = word_matrix(maps, std::vector<int>{0, 1});
    CHECK(prod.at(0, 0) == doctest::Approx(0.4 * 0.3));
    CHECK(prod.at(1, 1) == doctest::Approx(0.2 * 0.1));

    std::vector<int> bad{0, 2};
    CHECK_THROWS_AS(word_matrix(maps, bad), ValidationError);
}

TEST_CASE("word products preserve diagonal order and factorize phi_s") {
    std::vector<double> d1{0.45, 0.2}, d2{0.3, 0.25};
    std::vector<LinearMap> maps{LinearMap::diagonal(d1), LinearMap::diagonal(d2)};
    std::vector<int> word{0, 1, 1, 0, 1};
    auto prod = word_matrix(maps, word);
    auto p = singular_values(prod);
    CHECK(p.values[0] >= p.values[1]);
    for (double s : {0.3, 1.0, 1.7, 2.0, 2.9}) {
        double direct = p.log_phi(s);
        double factored = 0.0;
        for (int letter : word) factored += singular_values(maps[letter]).log_phi(s);
        CHECK(direct == doctest::Approx(factored).epsilon(1e-12));
    }
}

TEST_CASE("compound matrices: top singular value gives partial products") {
    Philox rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        int d = 2 + static_cast<int>(rng.next_below(3));
        auto m = random_contractive(rng, d, 0.3 + 0.5 * rng.next_double());
        auto p = singular_values(m);
        double acc = 0.0;
        for (int k = 1; k <= d; ++k) {
            acc += std::log(p.values[k - 1]);
            double via_compound = std::log(singular_values(compound(m, k)).norm());
            CHECK(via_compound == doctest::Approx(acc).epsilon(1e-8));
        }
    }
}

TEST_CASE("linear solve round-trip") {
    Philox rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        int d = 1 + static_cast<int>(rng.next_below(4));
        auto m = random_contractive(rng, d, 0.5);
        std::vector<double> x(d), b(d);
        for (int i = 0; i < d; ++i) x[i] = 2 * rng.next_double() - 1;
        m.apply(x, b);
        auto got = m.solve(b);
        for (int i = 0; i < d; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-9));
    }
}
