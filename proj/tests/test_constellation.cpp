#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "boxdet/channel.hpp"
#include "boxdet/constellation.hpp"
#include "boxdet/errors.hpp"

using namespace boxdet;

namespace {

// Unscaled coordinates (odd-integer grid) for readable expectations.
Cx unscaled(const Qam& qam, Cx a) { return a * qam.scale; }

GridIndex index_of_unscaled(const Qam& qam, int re, int im) {
    return GridIndex{(re + static_cast<int>(qam.side) - 1) / 2,
                     (im + static_cast<int>(qam.side) - 1) / 2};
}

}  // namespace

TEST_CASE("make_qam populates the grid descriptor") {
    const Qam q16 = make_qam(16);
    CHECK(q16.side == 4);
    CHECK(q16.bits_per_symbol == 4);
    CHECK(q16.span == doctest::Approx(3.0 * q16.scale));
    CHECK(q16.delta_q == doctest::Approx(2.0 * q16.scale));

    const Qam q4 = make_qam(4);
    CHECK(q4.side == 2);
    CHECK(q4.span == doctest::Approx(q4.scale));

    const Qam q64 = make_qam(64);
    CHECK(q64.side == 8);
    CHECK(q64.span == doctest::Approx(7.0 * q64.scale));
    CHECK(q64.scale == doctest::Approx(1.0 / std::sqrt(42.0)));

    CHECK_THROWS_AS(make_qam(8), UnsupportedOrder);
    CHECK_THROWS_AS(make_qam(32), UnsupportedOrder);
    CHECK_THROWS_AS(make_qam(1024), UnsupportedOrder);
}

TEST_CASE("average constellation energy is one after scaling") {
    for (const unsigned order : {4u, 16u, 64u, 256u}) {
        const Qam qam = make_qam(order);
        double energy = 0.0;
        for (unsigned re = 0; re < qam.side; ++re)
            for (unsigned im = 0; im < qam.side; ++im)
                energy += std::norm(grid_point(qam, GridIndex{(int)re, (int)im}));
        CHECK(std::abs(energy / order - 1.0) < 1e-12);
    }
}

TEST_CASE("gray map basics") {
    const Qam q4 = make_qam(4);
    CHECK(bits_to_symbol({0, 0}, q4) == Cx(-q4.scale, -q4.scale));
    CHECK(bits_to_symbol({1, 1}, q4) == Cx(q4.scale, q4.scale));
    CHECK(bits_to_symbol({0, 1}, q4) == Cx(-q4.scale, q4.scale));

    // Adjacent levels differ in one bit: unscaled (-3,-3) vs (-1,-3) on 16-QAM.
    const Qam q16 = make_qam(16);
    const BitVec a = symbol_to_bits(unscaled(q16, Cx(-3, -3)), q16);
    const BitVec b = symbol_to_bits(unscaled(q16, Cx(-1, -3)), q16);
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
    CHECK(diff == 1);
}

TEST_CASE("bits and symbols are mutually inverse for every order") {
    for (const unsigned order : {4u, 16u, 64u, 256u}) {
        const Qam qam = make_qam(order);
        std::set<std::pair<double, double>> seen;
        for (unsigned pattern = 0; pattern < order; ++pattern) {
            BitVec bits(qam.bits_per_symbol);
            for (unsigned b = 0; b < qam.bits_per_symbol; ++b)
                bits[b] = (pattern >> (qam.bits_per_symbol - 1 - b)) & 1u;
            const Cx s = bits_to_symbol(bits, qam);
            seen.insert({s.real(), s.imag()});
            CHECK(symbol_to_bits(s, qam) == bits);
        }
        CHECK(seen.size() == order);  // bijection
    }
}

TEST_CASE("gray adjacency holds along each dimension") {
    for (const unsigned order : {16u, 64u, 256u}) {
        const Qam qam = make_qam(order);
        for (unsigned lvl = 0; lvl + 1 < qam.side; ++lvl) {
            const unsigned g0 = gray_encode(lvl);
            const unsigned g1 = gray_encode(lvl + 1);
            unsigned x = g0 ^ g1;
            CHECK((x & (x - 1)) == 0);  // exactly one bit differs
            CHECK(x != 0);
        }
    }
}

TEST_CASE("symbol_to_bits rejects off-grid values") {
    const Qam q16 = make_qam(16);
    CHECK_THROWS_AS(symbol_to_bits(Cx(0.0, 0.0), q16), NotAConstellationPoint);
    CHECK_THROWS_AS(symbol_to_bits(unscaled(q16, Cx(5, 1)), q16), NotAConstellationPoint);
    CHECK_THROWS_AS(bits_to_symbol({0, 0, 1}, q16), std::invalid_argument);
}

TEST_CASE("quantize_base picks the lower-left cell corner") {
    const Qam q16 = make_qam(16);
    CHECK(quantize_base(unscaled(q16, Cx(0.3, 0.2)), q16) == index_of_unscaled(q16, -1, -1));
    CHECK(quantize_base(unscaled(q16, Cx(9, 9)), q16) == index_of_unscaled(q16, 1, 1));

    const Qam q64 = make_qam(64);
    CHECK(quantize_base(unscaled(q64, Cx(-6.9, -0.1)), q64) == index_of_unscaled(q64, -7, -1));
}

TEST_CASE("box candidates: interior, clamped and whole-map cases") {
    const Qam q16 = make_qam(16);
    const auto interior = box_candidates(unscaled(q16, Cx(0.3, 0.2)), q16, 4);
    REQUIRE(interior.size() == 4);
    CHECK(interior[0] == index_of_unscaled(q16, -1, -1));
    CHECK(interior[1] == index_of_unscaled(q16, -1, 1));
    CHECK(interior[2] == index_of_unscaled(q16, 1, -1));
    CHECK(interior[3] == index_of_unscaled(q16, 1, 1));

    const auto corner = box_candidates(unscaled(q16, Cx(9, 9)), q16, 4);
    CHECK(corner[0] == index_of_unscaled(q16, 1, 1));
    CHECK(corner[1] == index_of_unscaled(q16, 1, 3));
    CHECK(corner[2] == index_of_unscaled(q16, 3, 1));
    CHECK(corner[3] == index_of_unscaled(q16, 3, 3));

    const Qam q4 = make_qam(4);
    CounterRng rng(3, 0);
    for (int t = 0; t < 50; ++t) {
        const Cx a(10.0 * (rng.next_unit() - 0.5), 10.0 * (rng.next_unit() - 0.5));
        const auto all = box_candidates(a, q4, 4);
        std::set<std::pair<int, int>> pts;
        for (const GridIndex& g : all) pts.insert({g.re, g.im});
        CHECK(pts.size() == 4);  // the whole map
    }

    CHECK_THROWS_AS(box_candidates(Cx(0, 0), q4, 16), BoxLargerThanConstellation);
    CHECK_THROWS_AS(box_candidates(Cx(0, 0), q16, 8), std::invalid_argument);
}

TEST_CASE("box window always contains the nearest constellation point") {
    CounterRng rng(17, 0);
    for (const unsigned order : {16u, 64u}) {
        const Qam qam = make_qam(order);
        for (const unsigned box : {4u, 16u}) {
            for (int t = 0; t < 500'000; ++t) {
                // Mix of interior points and points far outside the grid.
                const double spread = (t % 3 == 0) ? 20.0 * qam.span : 2.5 * qam.span;
                const Cx a(spread * (rng.next_unit() - 0.5) * 2.0,
                           spread * (rng.next_unit() - 0.5) * 2.0);
                const auto cands = box_candidates(a, qam, box);

                std::set<std::pair<int, int>> distinct;
                for (const GridIndex& g : cands) {
                    REQUIRE(g.re >= 0);
                    REQUIRE(g.re < static_cast<int>(qam.side));
                    REQUIRE(g.im >= 0);
                    REQUIRE(g.im < static_cast<int>(qam.side));
                    distinct.insert({g.re, g.im});
                }
                REQUIRE(distinct.size() == box);

                // Full-constellation argmin must be a member.
                double best = 1e300;
                GridIndex arg{};
                for (unsigned re = 0; re < qam.side; ++re)
                    for (unsigned im = 0; im < qam.side; ++im) {
                        const GridIndex g{(int)re, (int)im};
                        const double d = std::norm(a - grid_point(qam, g));
                        if (d < best) {
                            best = d;
                            arg = g;
                        }
                    }
                REQUIRE(std::count(cands.begin(), cands.end(), arg) == 1);
            }
        }
    }
}
