// tools/boxdet_main.cpp
//
// Command-line front end.
//
//   boxdet ber         Monte Carlo BER sweep, CSV output plus a summary table
//   boxdet complexity  closed-form visited-node counts per detector
//   boxdet check       oracle self-checks (sign tests, box vs ML, SD vs ML,
//                      counter reconciliation)
//
// Exit codes: 0 success, 1 runtime failure or failed check, 2 flag errors.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boxdet/errors.hpp"
#include "boxdet/selfcheck.hpp"
#include "boxdet/simkit.hpp"

namespace {

using namespace boxdet;

std::vector<double> parse_snr_range(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw CLI::ValidationError("--snr", "expected start:step:stop");
    double start, step, stop;
    try {
        start = std::stod(spec.substr(0, c1));
        step = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        stop = std::stod(spec.substr(c2 + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--snr", "expected numeric start:step:stop");
    }
    if (step <= 0.0 || stop < start)
        throw CLI::ValidationError("--snr", "need step > 0 and stop >= start");
    std::vector<double> points;
    const long count = std::lround((stop - start) / step);
    for (long i = 0; i <= count; ++i) {
        const double v = start + static_cast<double>(i) * step;
        if (v > stop + 1e-9) break;
        points.push_back(v);
    }
    return points;
}

std::vector<Detector> parse_detectors(const std::string& csv) {
    std::set<Detector> seen;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string name =
            csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!name.empty()) {
            const auto det = detector_from_name(name);
            if (!det) throw CLI::ValidationError("--detectors", "unknown detector '" + name + "'");
            seen.insert(*det);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seen.empty()) throw CLI::ValidationError("--detectors", "no detectors given");
    return {seen.begin(), seen.end()};  // set order == enum order == CSV row order
}

struct BerArgs {
    unsigned mimo = 4;
    unsigned qam = 16;
    std::string detectors;
    unsigned k = 4;
    unsigned box = 4;
    unsigned m = 1;
    bool m_given = false;
    std::string snr;
    std::uint64_t seed = 0;
    std::uint64_t min_errors = 200;
    std::uint64_t max_trials = 10'000'000;
    unsigned workers = 1;
    std::string out;
};

int cmd_ber(const BerArgs& args) {
    const std::vector<double> snr_points = parse_snr_range(args.snr);
    const std::vector<Detector> detectors = parse_detectors(args.detectors);
    if (!args.m_given &&
        std::find(detectors.begin(), detectors.end(), Detector::BoxSicp) != detectors.end()) {
        std::cerr << "boxdet ber: box-sicp requires --m\n";
        return 2;
    }

    std::vector<SimConfig> configs;
    for (const Detector det : detectors) {
        SimConfig cfg;
        cfg.n = args.mimo;
        cfg.qam_order = args.qam;
        cfg.detector = det;
        cfg.k = args.k;
        cfg.box_size = args.box;
        cfg.icp_layers = args.m;
        cfg.snr_points = snr_points;
        cfg.master_seed = args.seed;
        cfg.min_bit_errors = args.min_errors;
        cfg.max_trials = args.max_trials;
        cfg.workers = args.workers;
        try {
            validate_config(cfg);  // every configuration checked before any work
        } catch (const std::invalid_argument& e) {
            std::cerr << "boxdet ber: " << e.what() << "\n";
            return 2;
        }
        configs.push_back(std::move(cfg));
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<BerRecord>> per_detector;
    per_detector.reserve(configs.size());
    for (const SimConfig& cfg : configs) per_detector.push_back(run_ber(cfg));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // Row order: SNR ascending, detector enum order within each SNR point.
    std::vector<BerRecord> rows;
    rows.reserve(snr_points.size() * configs.size());
    for (std::size_t s = 0; s < snr_points.size(); ++s)
        for (const auto& recs : per_detector) rows.push_back(recs[s]);
    write_csv(rows, args.out);

    std::printf("wrote %zu records to %s (%.1f s)\n", rows.size(), args.out.c_str(), elapsed);
    std::printf("%-10s %14s %16s\n", "detector", "snr@ber=1e-3", "gap vs kbest/dB");
    std::optional<double> kbest_snr;
    for (std::size_t d = 0; d < detectors.size(); ++d)
        if (detectors[d] == Detector::Kbest) {
            try {
                kbest_snr = interpolate_snr_at_ber(per_detector[d], 1e-3);
            } catch (const NotBracketed&) {
            }
        }
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        try {
            const double snr = interpolate_snr_at_ber(per_detector[d], 1e-3);
            if (kbest_snr)
                std::printf("%-10s %14.2f %16.2f\n", detector_name(detectors[d]), snr,
                            snr - *kbest_snr);
            else
                std::printf("%-10s %14.2f %16s\n", detector_name(detectors[d]), snr, "-");
        } catch (const NotBracketed&) {
            std::printf("%-10s %14s %16s\n", detector_name(detectors[d]), "not bracketed", "-");
        }
    }
    return 0;
}

struct ComplexityArgs {
    unsigned mimo = 4;
    unsigned qam = 16;
    unsigned k = 4;
    unsigned box = 4;
    std::vector<unsigned> m{1};
};

int cmd_complexity(const ComplexityArgs& args) {
    if (args.mimo < 3) {
        std::cerr << "boxdet complexity: --mimo must be >= 3 for the SICP rows\n";
        return 2;
    }
    for (const unsigned m : args.m)
        if (m < 1 || m > args.mimo - 2) {
            std::cerr << "boxdet complexity: --m values must satisfy 1 <= m <= mimo-2\n";
            return 2;
        }
    SimConfig probe;
    probe.n = args.mimo;
    probe.qam_order = args.qam;
    probe.detector = Detector::Kbest;
    probe.k = args.k;
    probe.box_size = args.box;
    probe.snr_points = {0.0};
    try {
        validate_config(probe);
    } catch (const std::invalid_argument& e) {
        std::cerr << "boxdet complexity: " << e.what() << "\n";
        return 2;
    }

    const unsigned n = args.mimo, a = args.qam, k = args.k, b = args.box;
    std::printf("visited nodes per detection (N=%u, A=%u, K=%u, B=%u)\n\n", n, a, k, b);
    std::printf("  %-10s %-26s %s\n", "algorithm", "equation", "count");
    std::printf("  %-10s %-26s %llu\n", "kbest", "A + A*K*(N-1)",
                static_cast<unsigned long long>(visited_formula(Detector::Kbest, n, a, k, b, 0)));
    std::printf("  %-10s %-26s %llu\n", "dkb", "(3*K-2)*N",
                static_cast<unsigned long long>(dkb_visited_count(n, k)));
    std::printf("  %-10s %-26s %llu\n", "box", "B^N",
                static_cast<unsigned long long>(visited_formula(Detector::Box, n, a, k, b, 0)));
    std::printf("  %-10s %-26s %llu\n", "box-scp", "N*B",
                static_cast<unsigned long long>(visited_formula(Detector::BoxScp, n, a, k, b, 0)));
    std::printf("  %-10s %-26s %llu\n", "box-icp", "2*B + (2*K-1)*(N-2)",
                static_cast<unsigned long long>(visited_formula(Detector::BoxIcp, n, a, k, b, 0)));
    std::printf("  %-10s %-26s", "box-sicp", "2*B + m*(K-1) + (N-2)*K");
    for (const unsigned m : args.m)
        std::printf(" m=%u: %llu ", m,
                    static_cast<unsigned long long>(visited_formula(Detector::BoxSicp, n, a, k, b, m)));
    std::printf("\n\n");
    std::printf("dkb is a reference count only (complex-mode selection); the box rows are\n");
    std::printf("independent of A. See README.md for the counting convention.\n");
    return 0;
}

struct CheckArgs {
    std::string suite;
    std::uint64_t trials = 10'000;
    std::uint64_t seed = 0;
};

int cmd_check(const CheckArgs& args) {
    std::vector<CheckReport> reports;
    if (args.suite.empty()) {
        reports = run_all_checks(args.trials, args.seed);
    } else if (args.suite == "metric-sign") {
        reports.push_back(check_metric_signs(args.trials, args.seed));
    } else if (args.suite == "box-ml") {
        reports.push_back(check_box_equals_ml(args.trials, args.seed));
    } else if (args.suite == "sd-ml") {
        reports.push_back(check_sphere_equals_ml(args.trials, args.seed));
    } else if (args.suite == "counters") {
        reports.push_back(check_counter_reconciliation(args.trials, args.seed));
    } else {
        std::cerr << "boxdet check: unknown suite '" << args.suite
                  << "' (metric-sign, box-ml, sd-ml, counters)\n";
        return 2;
    }

    bool all_pass = true;
    for (const CheckReport& r : reports) {
        if (r.pass) {
            std::printf("PASS %-12s %llu/%llu agreements\n", r.suite.c_str(),
                        static_cast<unsigned long long>(r.cases),
                        static_cast<unsigned long long>(r.cases));
        } else {
            all_pass = false;
            std::printf("FAIL %-12s counterexample: %s\n", r.suite.c_str(), r.failure.c_str());
        }
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO detection experiments: box decoding with sort-free pruning"};
    app.require_subcommand(1);

    BerArgs ber;
    CLI::App* ber_cmd = app.add_subcommand("ber", "Monte Carlo BER sweep, CSV output");
    ber_cmd->add_option("--mimo", ber.mimo, "MIMO size N (N x N square system)")->required();
    ber_cmd->add_option("--qam", ber.qam, "QAM order A: 4, 16, 64 or 256")->required();
    ber_cmd
        ->add_option("--detectors", ber.detectors,
                     "comma list of zf,lmmse,ml,sd,kbest,box,box-scp,box-icp,box-sicp")
        ->required();
    ber_cmd->add_option("--k", ber.k, "survivors per layer (K-Best list size)")
        ->capture_default_str();
    ber_cmd->add_option("--box", ber.box, "box size B (power of 4)")->capture_default_str();
    ber_cmd->add_option("--m", ber.m, "ICP layers, required with box-sicp (1 <= m <= N-2)");
    ber_cmd->add_option("--snr", ber.snr, "SNR grid start:step:stop in dB, inclusive")->required();
    ber_cmd->add_option("--seed", ber.seed, "master seed")->capture_default_str();
    ber_cmd->add_option("--min-errors", ber.min_errors, "stop an SNR point after this many bit errors")
        ->capture_default_str();
    ber_cmd->add_option("--max-trials", ber.max_trials, "hard trial cap per SNR point")
        ->capture_default_str();
    ber_cmd->add_option("--workers", ber.workers, "worker threads (results are identical for any count)")
        ->capture_default_str();
    ber_cmd->add_option("--out", ber.out, "output CSV path (written atomically)")->required();

    ComplexityArgs cx;
    CLI::App* cx_cmd = app.add_subcommand("complexity", "closed-form visited-node counts");
    cx_cmd->add_option("--mimo", cx.mimo, "MIMO size N")->required();
    cx_cmd->add_option("--qam", cx.qam, "QAM order A")->required();
    cx_cmd->add_option("--k", cx.k, "survivors per layer")->capture_default_str();
    cx_cmd->add_option("--box", cx.box, "box size B")->capture_default_str();
    cx_cmd->add_option("--m", cx.m, "ICP layer counts for the box-sicp row")
        ->delimiter(',')
        ->capture_default_str();

    CheckArgs chk;
    CLI::App* chk_cmd = app.add_subcommand("check", "oracle self-checks");
    chk_cmd->add_option("--suite", chk.suite, "metric-sign, box-ml, sd-ml or counters (default: all)");
    chk_cmd->add_option("--trials", chk.trials, "cases per suite")->capture_default_str();
    chk_cmd->add_option("--seed", chk.seed, "master seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    ber.m_given = ber_cmd->count("--m") > 0;

    try {
        if (ber_cmd->parsed()) return cmd_ber(ber);
        if (cx_cmd->parsed()) return cmd_complexity(cx);
        return cmd_check(chk);
    } catch (const CLI::ParseError& e) {
        std::cerr << "boxdet: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "boxdet: " << e.what() << "\n";
        return 1;
    }
}
