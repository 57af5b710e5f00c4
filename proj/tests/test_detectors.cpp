#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "boxdet/channel.hpp"
#include "boxdet/detectors.hpp"
#include "boxdet/errors.hpp"

using namespace boxdet;

namespace {

struct Triangularized {
    QrFactors qr;
    CVector x;
};

Triangularized triangularize(const ChannelInstance& inst) {
    Triangularized t{qr_decompose(inst.h), {}};
    t.x = herm_mul_vec(t.qr.q, inst.y);
    return t;
}

ChannelInstance random_instance(unsigned n, const Qam& qam, std::uint64_t seed, std::uint64_t trial,
                                double snr_lo, double snr_hi) {
    CounterRng meta(seed ^ 0x736e72u, trial);
    const double snr = snr_lo + (snr_hi - snr_lo) * meta.next_unit();
    return draw_instance(n, qam, snr, SeedSpec{seed, trial});
}

std::uint64_t bit_errors(const BitVec& a, const BitVec& b) {
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}

}  // namespace

TEST_CASE("ped_extend: zero residual at the root") {
    CMatrix r(2, 2);
    r(0, 0) = Cx(1, 0);
    r(1, 1) = Cx(2, 0);
    const Cx cand(0.7, -0.3);
    const CVector x{Cx(1, 1), r(1, 1) * cand};
    const PathNode child = ped_extend(PathNode{}, x, r, cand);
    CHECK(child.ped == 0.0);
    CHECK(child.decided.size() == 1);
}

TEST_CASE("ped_extend: direct arithmetic on a 2x2 system") {
    CMatrix r(2, 2);
    r(0, 0) = Cx(1, 0);
    r(1, 1) = Cx(2, 0);
    const CVector x{Cx(1, 1), Cx(4, 0)};
    const PathNode child = ped_extend(PathNode{}, x, r, Cx(1, 0));
    CHECK(child.ped == doctest::Approx(4.0));
}

TEST_CASE("ped_extend telescopes to the full residual") {
    const Qam qam = make_qam(16);
    CounterRng rng(23, 0);
    for (int iter = 0; iter < 500; ++iter) {
        const unsigned n = 2 + static_cast<unsigned>(rng.next_u64() % 5);
        const ChannelInstance inst = draw_instance(n, qam, 14.0, SeedSpec{23, (std::uint64_t)iter});
        const Triangularized t = triangularize(inst);

        PathNode node;
        for (unsigned layer = 0; layer < n; ++layer) {
            const GridIndex g{static_cast<int>(rng.next_u64() % qam.side),
                              static_cast<int>(rng.next_u64() % qam.side)};
            node = ped_extend(node, t.x, t.qr.r, grid_point(qam, g));
            REQUIRE(node.ped >= 0.0);
        }

        // Direct recomputation of || x - R s ||^2 from the decided path.
        CVector s(n);
        for (unsigned i = 0; i < n; ++i) s[i] = node.decided[n - 1 - i];
        const CVector rs = mat_vec(t.qr.r, s);
        double direct = 0.0;
        for (unsigned i = 0; i < n; ++i) direct += std::norm(t.x[i] - rs[i]);
        REQUIRE(std::abs(node.ped - direct) < 1e-9 * std::max(1.0, direct));
    }
}

TEST_CASE("zf recovers the transmitted vector without noise") {
    const Qam qam = make_qam(16);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0; t < 200; ++t) {
        const ChannelInstance inst = draw_instance(4, qam, inf, SeedSpec{31, t});
        const DetectionResult res = zf_detect(inst.y, inst.h, qam);
        REQUIRE(res.symbols == inst.s);
        REQUIRE(res.bits == inst.tx_bits);
    }
}

TEST_CASE("zf on the identity channel quantizes to the nearest point") {
    const Qam qam = make_qam(16);
    const CMatrix h = CMatrix::identity(3);
    const CVector s{grid_point(qam, {0, 1}), grid_point(qam, {3, 2}), grid_point(qam, {1, 1})};
    CVector y = s;
    y[0] += Cx(0.4 * qam.delta_q, -0.3 * qam.delta_q);
    y[1] += Cx(-0.45 * qam.delta_q, 0.2 * qam.delta_q);
    y[2] += Cx(0.1 * qam.delta_q, 0.49 * qam.delta_q);
    const DetectionResult res = zf_detect(y, h, qam);
    CHECK(res.symbols == s);
}

TEST_CASE("lmmse equals zf at zero noise variance and recovers noiseless s") {
    const Qam qam = make_qam(16);
    for (std::uint64_t t = 0; t < 300; ++t) {
        const ChannelInstance inst = random_instance(4, qam, 37, t, 5.0, 25.0);
        const DetectionResult zf = zf_detect(inst.y, inst.h, qam);
        const DetectionResult mmse0 = lmmse_detect(inst.y, inst.h, qam, 0.0);
        REQUIRE(mmse0.symbols == zf.symbols);
    }
    const double inf = std::numeric_limits<double>::infinity();
    const ChannelInstance inst = draw_instance(4, qam, inf, SeedSpec{38, 0});
    CHECK(lmmse_detect(inst.y, inst.h, qam, 0.0).symbols == inst.s);
}

TEST_CASE("lmmse is no worse than zf on shared instances") {
    const Qam qam = make_qam(16);
    for (const double snr : {10.0, 14.0, 18.0}) {
        std::uint64_t zf_errors = 0, mmse_errors = 0;
        for (std::uint64_t t = 0; t < 20'000; ++t) {
            const ChannelInstance inst = draw_instance(4, qam, snr, SeedSpec{41, t});
            zf_errors += bit_errors(zf_detect(inst.y, inst.h, qam).bits, inst.tx_bits);
            mmse_errors +=
                bit_errors(lmmse_detect(inst.y, inst.h, qam, inst.noise_var).bits, inst.tx_bits);
        }
        CHECK(mmse_errors <= zf_errors);
    }
}

TEST_CASE("ml brute force: noiseless, 1x1 and guard") {
    const Qam qam = make_qam(4);
    const double inf = std::numeric_limits<double>::infinity();
    const ChannelInstance inst = draw_instance(3, qam, inf, SeedSpec{43, 0});
    const Triangularized t = triangularize(inst);
    const DetectionResult res = ml_brute_force(t.x, t.qr.r, qam);
    CHECK(res.symbols == inst.s);
    CHECK(res.final_metric < 1e-18);

    CMatrix r1(1, 1);
    r1(0, 0) = Cx(2, 0);
    const Cx target = grid_point(qam, {1, 0});
    const DetectionResult one = ml_brute_force(CVector{r1(0, 0) * (target + Cx(0.1, 0.05))}, r1, qam);
    CHECK(one.symbols[0] == target);

    const Qam q64 = make_qam(64);
    CMatrix r5 = CMatrix::identity(5);
    CHECK_THROWS_AS(ml_brute_force(CVector(5, Cx(0, 0)), r5, q64), SearchSpaceTooLarge);
}

TEST_CASE("sphere decoding matches ml brute force") {
    for (const unsigned n : {2u, 4u}) {
        for (const unsigned order : {4u, 16u}) {
            const Qam qam = make_qam(order);
            for (std::uint64_t t = 0; t < 250; ++t) {
                const ChannelInstance inst = random_instance(n, qam, 47 + order, t, 0.0, 25.0);
                const Triangularized tri = triangularize(inst);
                const DetectionResult ml = ml_brute_force(tri.x, tri.qr.r, qam);
                const DetectionResult sd = sphere_detect(tri.x, tri.qr.r, qam);
                REQUIRE(sd.symbols == ml.symbols);
                REQUIRE(std::abs(sd.final_metric - ml.final_metric) <
                        1e-9 * std::max(1.0, ml.final_metric));
            }
        }
    }
}

TEST_CASE("kbest: visit count, noiseless recovery and exhaustive regime") {
    const Qam q16 = make_qam(16);
    const ChannelInstance inst = random_instance(4, q16, 53, 0, 10.0, 20.0);
    const Triangularized t = triangularize(inst);
    const DetectionResult res = kbest_detect(t.x, t.qr.r, q16, 4);
    CHECK(res.stats.visited_nodes == 208);  // A + A K (N-1)
    CHECK(res.stats.ped_evals == 208);

    const double inf = std::numeric_limits<double>::infinity();
    const ChannelInstance clean = draw_instance(4, q16, inf, SeedSpec{54, 0});
    const Triangularized tc = triangularize(clean);
    CHECK(kbest_detect(tc.x, tc.qr.r, q16, 4).symbols == clean.s);

    // k = A^(N-1) on a 2x2 4-QAM system retains everything: exact ML.
    const Qam q4 = make_qam(4);
    for (std::uint64_t trial = 0; trial < 400; ++trial) {
        const ChannelInstance i2 = random_instance(2, q4, 55, trial, 0.0, 20.0);
        const Triangularized t2 = triangularize(i2);
        const DetectionResult kb = kbest_detect(t2.x, t2.qr.r, q4, 4);
        const DetectionResult ml = ml_brute_force(t2.x, t2.qr.r, q4);
        REQUIRE(kb.symbols == ml.symbols);
    }
}

TEST_CASE("kbest metric dominates ml metric") {
    const Qam qam = make_qam(16);
    for (std::uint64_t t = 0; t < 300; ++t) {
        const ChannelInstance inst = random_instance(4, qam, 59, t, 0.0, 25.0);
        const Triangularized tri = triangularize(inst);
        const DetectionResult kb = kbest_detect(tri.x, tri.qr.r, qam, 4);
        const DetectionResult ml = ml_brute_force(tri.x, tri.qr.r, qam);
        REQUIRE(kb.final_metric >= ml.final_metric - 1e-9);
    }
}

TEST_CASE("zf is strictly worse than kbest at 20 dB") {
    const Qam qam = make_qam(16);
    std::uint64_t zf_errors = 0, kb_errors = 0;
    for (std::uint64_t t = 0; t < 20'000; ++t) {
        const ChannelInstance inst = draw_instance(4, qam, 20.0, SeedSpec{61, t});
        zf_errors += bit_errors(zf_detect(inst.y, inst.h, qam).bits, inst.tx_bits);
        const Triangularized tri = triangularize(inst);
        kb_errors += bit_errors(kbest_detect(tri.x, tri.qr.r, qam, 4).bits, inst.tx_bits);
    }
    CHECK(zf_errors > kb_errors);
}

TEST_CASE("ber is non-increasing in snr") {
    const Qam qam = make_qam(16);
    const double snrs[] = {8.0, 14.0, 20.0};
    std::uint64_t errors[3] = {0, 0, 0};
    const std::uint64_t trials = 100'000;
    for (int s = 0; s < 3; ++s)
        for (std::uint64_t t = 0; t < trials; ++t) {
            const ChannelInstance inst = draw_instance(4, qam, snrs[s], SeedSpec{67, t});
            const Triangularized tri = triangularize(inst);
            errors[s] += bit_errors(kbest_detect(tri.x, tri.qr.r, qam, 4).bits, inst.tx_bits);
        }
    // Confidence margin of three binomial sigmas.
    for (int s = 0; s + 1 < 3; ++s) {
        const double margin = 3.0 * std::sqrt(static_cast<double>(errors[s] + errors[s + 1]) + 1.0);
        CHECK(static_cast<double>(errors[s]) + margin > static_cast<double>(errors[s + 1]));
    }
}
