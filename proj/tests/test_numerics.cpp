#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "boxdet/channel.hpp"
#include "boxdet/errors.hpp"
#include "boxdet/numerics.hpp"

using namespace boxdet;

namespace {

CMatrix random_gaussian(std::size_t n, CounterRng& rng) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.next_cgaussian(1.0);
    return m;
}

double frob_error_qhq(const CMatrix& q) {
    const CMatrix gram = herm_mul_mat(q, q);
    double err = 0.0;
    for (std::size_t i = 0; i < q.rows; ++i)
        for (std::size_t j = 0; j < q.cols; ++j)
            err += std::norm(gram(i, j) - (i == j ? Cx(1, 0) : Cx(0, 0)));
    return std::sqrt(err);
}

double frob_rel_reconstruction(const QrFactors& f, const CMatrix& h) {
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < h.rows; ++i)
        for (std::size_t j = 0; j < h.cols; ++j) {
            Cx qr_ij(0, 0);
            for (std::size_t t = 0; t < h.rows; ++t) qr_ij += f.q(i, t) * f.r(t, j);
            err += std::norm(qr_ij - h(i, j));
            ref += std::norm(h(i, j));
        }
    return std::sqrt(err / ref);
}

}  // namespace

TEST_CASE("qr of the identity is the identity") {
    const CMatrix h = CMatrix::identity(3);
    const QrFactors f = qr_decompose(h);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const Cx want = i == j ? Cx(1, 0) : Cx(0, 0);
            CHECK(std::abs(f.q(i, j) - want) < 1e-14);
            CHECK(std::abs(f.r(i, j) - want) < 1e-14);
        }
}

TEST_CASE("qr of a 1x1 matrix factors out the phase") {
    CMatrix h(1, 1);
    h(0, 0) = Cx(3, 4);
    const QrFactors f = qr_decompose(h);
    CHECK(f.r(0, 0).real() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(f.r(0, 0).imag() == 0.0);
    CHECK(std::abs(f.q(0, 0) - Cx(0.6, 0.8)) < 1e-12);
}

TEST_CASE("qr invariants hold over random matrices") {
    CounterRng rng(7, 0);
    for (int iter = 0; iter < 10'000; ++iter) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 7);  // 2..8
        const CMatrix h = random_gaussian(n, rng);
        const QrFactors f = qr_decompose(h);

        REQUIRE(frob_error_qhq(f.q) < 1e-10);
        REQUIRE(frob_rel_reconstruction(f, h) < 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(f.r(i, i).imag() == 0.0);
            REQUIRE(f.r(i, i).real() >= 0.0);
            for (std::size_t j = 0; j < i; ++j) REQUIRE(std::abs(f.r(i, j)) == 0.0);
        }
    }
}

TEST_CASE("qr is deterministic for identical input") {
    CounterRng rng(11, 0);
    const CMatrix h = random_gaussian(4, rng);
    const QrFactors a = qr_decompose(h);
    const QrFactors b = qr_decompose(h);
    CHECK(a.q.data == b.q.data);
    CHECK(a.r.data == b.r.data);
}

TEST_CASE("qr reports a singular channel") {
    CMatrix h(2, 2);
    h(0, 0) = Cx(1, 0);
    h(0, 1) = Cx(2, 0);
    h(1, 0) = Cx(2, 0);
    h(1, 1) = Cx(4, 0);  // rank 1
    CHECK_THROWS_AS(qr_decompose(h), SingularChannel);
}

TEST_CASE("herm_mul_vec on identity, permutation and conjugation") {
    const CMatrix id = CMatrix::identity(2);
    const CVector v{Cx(1, 2), Cx(-3, 0.5)};
    CHECK(herm_mul_vec(id, v) == v);

    CMatrix perm(2, 2);
    perm(0, 1) = Cx(1, 0);
    perm(1, 0) = Cx(1, 0);
    const CVector pv = herm_mul_vec(perm, CVector{Cx(1, 0), Cx(0, 2)});
    CHECK(pv[0] == Cx(0, 2));
    CHECK(pv[1] == Cx(1, 0));

    CMatrix j(1, 1);
    j(0, 0) = Cx(0, 1);
    const CVector jv = herm_mul_vec(j, CVector{Cx(1, 0)});
    CHECK(jv[0] == Cx(0, -1));
}

TEST_CASE("herm_mul_vec rejects a dimension mismatch") {
    const CMatrix id = CMatrix::identity(2);
    CHECK_THROWS_AS(herm_mul_vec(id, CVector{Cx(1, 0)}), std::invalid_argument);
}

TEST_CASE("back substitution on hand-checked systems") {
    const CMatrix id = CMatrix::identity(3);
    const CVector v{Cx(1, 1), Cx(2, 0), Cx(0, -3)};
    CHECK(back_substitute(id, v) == v);

    CMatrix r(2, 2);
    r(0, 0) = Cx(2, 0);
    r(0, 1) = Cx(1, 0);
    r(1, 1) = Cx(4, 0);
    const CVector z = back_substitute(r, CVector{Cx(4, 0), Cx(8, 0)});
    CHECK(std::abs(z[0] - Cx(1, 0)) < 1e-15);
    CHECK(std::abs(z[1] - Cx(2, 0)) < 1e-15);
}

TEST_CASE("back substitution round-trips r*z") {
    CounterRng rng(13, 0);
    for (int iter = 0; iter < 2'000; ++iter) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 7);
        CMatrix r(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) r(i, j) = 0.3 * rng.next_cgaussian(1.0);
            r(i, i) = Cx(1.0 + rng.next_unit(), 0.0);  // well conditioned
        }
        CVector z(n);
        for (auto& c : z) c = rng.next_cgaussian(1.0);

        const CVector recovered = back_substitute(r, mat_vec(r, z));
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            err += std::norm(recovered[i] - z[i]);
            ref += std::norm(z[i]);
        }
        REQUIRE(std::sqrt(err / ref) < 1e-9);
    }
}

TEST_CASE("back substitution reports a tiny diagonal") {
    CMatrix r = CMatrix::identity(2);
    r(1, 1) = Cx(1e-13, 0);
    CHECK_THROWS_AS(back_substitute(r, CVector{Cx(1, 0), Cx(1, 0)}), SingularChannel);
}
