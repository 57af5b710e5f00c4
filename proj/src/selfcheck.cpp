#include "boxdet/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boxdet/channel.hpp"
#include "boxdet/simkit.hpp"

namespace boxdet {

namespace {

std::string cx_str(Cx v) {
    std::ostringstream os;
    os.precision(17);
    os << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "j";
    return os.str();
}

// Explicit squared distances to the 2x2 cluster corners in Metric index
// order; the independent side of the sign-test comparison.
std::array<double, 4> corner_distances(Cx delta1, double dq) {
    return {std::norm(delta1), std::norm(delta1 - Cx(0.0, dq)), std::norm(delta1 - Cx(dq, 0.0)),
            std::norm(delta1 - Cx(dq, dq))};
}

}  // namespace

CheckReport check_metric_signs(std::uint64_t trials, std::uint64_t seed, Metric1Fn metric1,
                               Metric2Fn metric2) {
    CheckReport rep{"metric-sign", true, trials, ""};
    CounterRng rng(seed, 0x6d657472 /* stream tag */);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double dq = 0.05 + 8.0 * rng.next_unit();
        const Cx delta1(-dq + 3.0 * dq * rng.next_unit(), -dq + 3.0 * dq * rng.next_unit());
        const std::array<double, 4> d = corner_distances(delta1, dq);

        int oracle_min = 0;
        for (int i = 1; i < 4; ++i)
            if (d[i] < d[oracle_min]) oracle_min = i;
        std::array<int, 4> oracle_order{1, 2, 3, 4};
        std::stable_sort(oracle_order.begin(), oracle_order.end(),
                         [&](int a, int b) { return d[a - 1] < d[b - 1]; });

        const int got_min = metric1(delta1, dq);
        const std::array<int, 4> got_order = metric2(delta1, dq);
        if (got_min != oracle_min + 1 || got_order != oracle_order) {
            rep.pass = false;
            std::ostringstream os;
            os << "delta1=" << cx_str(delta1) << " dq=" << dq << " distances=[" << d[0] << ","
               << d[1] << "," << d[2] << "," << d[3] << "] metric1=" << got_min
               << " expected=" << oracle_min + 1 << " metric2=[" << got_order[0] << ","
               << got_order[1] << "," << got_order[2] << "," << got_order[3] << "] expected=["
               << oracle_order[0] << "," << oracle_order[1] << "," << oracle_order[2] << ","
               << oracle_order[3] << "]";
            rep.failure = os.str();
            return rep;
        }
    }
    return rep;
}

namespace {

// Random instance at a per-trial SNR drawn uniformly from [lo, hi] dB.
ChannelInstance random_instance(unsigned n, const Qam& qam, std::uint64_t seed, std::uint64_t trial,
                                double snr_lo, double snr_hi) {
    CounterRng meta(seed ^ 0x736e72u, trial);
    const double snr = snr_lo + (snr_hi - snr_lo) * meta.next_unit();
    return draw_instance(n, qam, snr, SeedSpec{seed, trial});
}

std::string symbols_str(const CVector& s) {
    std::ostringstream os;
    for (const Cx& v : s) os << cx_str(v) << " ";
    return os.str();
}

}  // namespace

CheckReport check_box_equals_ml(std::uint64_t trials, std::uint64_t seed) {
    CheckReport rep{"box-ml", true, trials, ""};
    const Qam qam = make_qam(4);
    const PruneConfig cfg{PruneStrategy::None, 4, 4, 0};
    for (std::uint64_t t = 0; t < trials; ++t) {
        const ChannelInstance inst = random_instance(4, qam, seed, t, 0.0, 20.0);
        const QrFactors qr = qr_decompose(inst.h);
        const CVector x = herm_mul_vec(qr.q, inst.y);
        const DetectionResult ml = ml_brute_force(x, qr.r, qam);
        const DetectionResult box = box_detect(x, qr.r, qam, cfg);
        if (ml.symbols != box.symbols) {
            rep.pass = false;
            std::ostringstream os;
            os << "trial=" << t << " snr=" << inst.snr_db << " ml=[" << symbols_str(ml.symbols)
               << "] box=[" << symbols_str(box.symbols) << "]";
            rep.failure = os.str();
            return rep;
        }
    }
    return rep;
}

CheckReport check_sphere_equals_ml(std::uint64_t trials, std::uint64_t seed) {
    CheckReport rep{"sd-ml", true, 0, ""};
    const unsigned dims[] = {2, 4};
    const unsigned orders[] = {4, 16};
    const std::uint64_t per_config = std::max<std::uint64_t>(1, trials / 4);
    for (const unsigned n : dims) {
        for (const unsigned order : orders) {
            const Qam qam = make_qam(order);
            for (std::uint64_t t = 0; t < per_config; ++t) {
                ++rep.cases;
                const ChannelInstance inst =
                    random_instance(n, qam, seed + order, t, 0.0, 25.0);
                const QrFactors qr = qr_decompose(inst.h);
                const CVector x = herm_mul_vec(qr.q, inst.y);
                const DetectionResult ml = ml_brute_force(x, qr.r, qam);
                const DetectionResult sd = sphere_detect(x, qr.r, qam);
                if (ml.symbols != sd.symbols) {
                    rep.pass = false;
                    std::ostringstream os;
                    os << "n=" << n << " order=" << order << " trial=" << t << " ml=["
                       << symbols_str(ml.symbols) << "] metric=" << ml.final_metric << " sd=["
                       << symbols_str(sd.symbols) << "] metric=" << sd.final_metric;
                    rep.failure = os.str();
                    return rep;
                }
            }
        }
    }
    return rep;
}

CheckReport check_counter_reconciliation(std::uint64_t trials, std::uint64_t seed) {
    CheckReport rep{"counters", true, 0, ""};
    struct Config {
        Detector det;
        unsigned n, a, k, b, m;
    };
    const Config configs[] = {
        {Detector::Kbest, 4, 4, 4, 4, 0},   {Detector::Kbest, 4, 16, 4, 4, 0},
        {Detector::Kbest, 4, 64, 4, 4, 0},  {Detector::Kbest, 8, 4, 4, 4, 0},
        {Detector::Kbest, 8, 16, 4, 4, 0},  {Detector::Kbest, 8, 64, 4, 4, 0},
        {Detector::Box, 4, 16, 4, 4, 0},    {Detector::BoxScp, 4, 16, 4, 4, 0},
        {Detector::BoxScp, 8, 16, 4, 4, 0}, {Detector::BoxIcp, 4, 16, 4, 4, 0},
        {Detector::BoxIcp, 8, 16, 4, 4, 0}, {Detector::BoxSicp, 4, 16, 4, 4, 1},
        {Detector::BoxSicp, 8, 16, 4, 4, 1}, {Detector::BoxSicp, 8, 16, 4, 4, 2},
        {Detector::BoxSicp, 8, 16, 4, 4, 3}, {Detector::Box, 2, 16, 16, 16, 0},
    };
    const std::uint64_t per_config = std::max<std::uint64_t>(1, trials / std::size(configs));
    for (const Config& c : configs) {
        SimConfig sim;
        sim.n = c.n;
        sim.qam_order = c.a;
        sim.detector = c.det;
        sim.k = c.k;
        sim.box_size = c.b;
        sim.icp_layers = c.m;
        const Qam qam = make_qam(c.a);
        const std::uint64_t expected = visited_formula(c.det, c.n, c.a, c.k, c.b, c.m);
        for (std::uint64_t t = 0; t < per_config; ++t) {
            ++rep.cases;
            const ChannelInstance inst = random_instance(c.n, qam, seed + c.n, t, 5.0, 25.0);
            const DetectionResult res = detect_instance(sim, qam, inst);
            if (res.stats.visited_nodes != expected) {
                rep.pass = false;
                std::ostringstream os;
                os << detector_name(c.det) << " n=" << c.n << " A=" << c.a << " K=" << c.k
                   << " B=" << c.b << " m=" << c.m << " trial=" << t
                   << " measured=" << res.stats.visited_nodes << " formula=" << expected;
                rep.failure = os.str();
                return rep;
            }
        }
    }
    return rep;
}

std::vector<CheckReport> run_all_checks(std::uint64_t trials, std::uint64_t seed) {
    return {check_metric_signs(trials, seed), check_box_equals_ml(std::min<std::uint64_t>(trials, 5000), seed),
            check_sphere_equals_ml(std::min<std::uint64_t>(trials, 2000), seed),
            check_counter_reconciliation(std::min<std::uint64_t>(trials, 160), seed)};
}

}  // namespace boxdet
