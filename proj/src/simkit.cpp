#include "boxdet/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "boxdet/errors.hpp"

namespace boxdet {

namespace {

constexpr std::uint64_t kBatchTrials = 1024;  // early-stop granularity, worker-independent

const char* kDetectorNames[] = {"zf",  "lmmse", "ml",      "sd",      "kbest",
                                "box", "box-scp", "box-icp", "box-sicp"};

bool is_power_of_four(unsigned v) {
    if (v == 0) return false;
    while (v % 4 == 0) v /= 4;
    return v == 1;
}

}  // namespace

const char* detector_name(Detector d) { return kDetectorNames[static_cast<int>(d)]; }

std::optional<Detector> detector_from_name(std::string_view name) {
    for (int i = 0; i < 9; ++i)
        if (name == kDetectorNames[i]) return static_cast<Detector>(i);
    return std::nullopt;
}

void validate_config(const SimConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (!is_power_of_four(cfg.qam_order) || cfg.qam_order < 4 || cfg.qam_order > 256)
        throw std::invalid_argument("config: qam order must be one of 4, 16, 64, 256");
    if (cfg.snr_points.empty()) throw std::invalid_argument("config: no SNR points");
    for (std::size_t i = 1; i < cfg.snr_points.size(); ++i)
        if (!(cfg.snr_points[i] > cfg.snr_points[i - 1]))
            throw std::invalid_argument("config: SNR points must be strictly increasing");
    if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (cfg.max_trials < 1) throw std::invalid_argument("config: max_trials must be >= 1");

    switch (cfg.detector) {
        case Detector::Kbest:
            if (cfg.k < 1) throw std::invalid_argument("config: k must be >= 1");
            break;
        case Detector::Ml: {
            double paths = 1.0;
            for (unsigned i = 0; i < cfg.n; ++i) {
                paths *= cfg.qam_order;
                if (paths > 1e7)
                    throw std::invalid_argument("config: ML search space A^N exceeds 10^7");
            }
            break;
        }
        case Detector::Box:
        case Detector::BoxScp:
        case Detector::BoxIcp:
        case Detector::BoxSicp: {
            if (!is_power_of_four(cfg.box_size))
                throw std::invalid_argument("config: box size must be a power of 4");
            if (cfg.box_size > cfg.qam_order)
                throw std::invalid_argument("config: box size exceeds constellation order");
            if (cfg.detector == Detector::BoxIcp || cfg.detector == Detector::BoxSicp) {
                if (cfg.k != cfg.box_size)
                    throw std::invalid_argument("config: ICP/SICP require k == box size");
                if (cfg.n < 2) throw std::invalid_argument("config: ICP requires n >= 2");
            }
            if (cfg.detector == Detector::BoxSicp &&
                (cfg.icp_layers < 1 || cfg.icp_layers + 2 > cfg.n))
                throw std::invalid_argument("config: SICP needs 1 <= m <= n - 2");
            if (cfg.detector == Detector::Box) {
                double paths = 1.0;
                for (unsigned i = 0; i < cfg.n; ++i) {
                    paths *= cfg.box_size;
                    if (paths > 1e7)
                        throw std::invalid_argument("config: box search space B^N exceeds 10^7");
                }
            }
            break;
        }
        default:
            break;
    }
}

std::uint64_t visited_formula(Detector d, unsigned n, unsigned a, unsigned k, unsigned b,
                              unsigned m) {
    const std::uint64_t N = n, A = a, K = k, B = b, M = m;
    switch (d) {
        case Detector::Kbest:
            return A + A * K * (N - 1);
        case Detector::Box: {
            std::uint64_t v = 1;
            for (unsigned i = 0; i < n; ++i) v *= B;
            return v;
        }
        case Detector::BoxScp:
            return N * B;
        case Detector::BoxIcp:
            return 2 * B + (2 * K - 1) * (N - 2);
        case Detector::BoxSicp:
            return 2 * B + M * (K - 1) + (N - 2) * K;
        default:
            throw UnsupportedDetector("visited_formula: no tree-visit count for this detector");
    }
}

std::uint64_t dkb_visited_count(unsigned n, unsigned k) {
    return (3ull * k - 2ull) * n;
}

DetectionResult detect_instance(const SimConfig& cfg, const Qam& qam,
                                const ChannelInstance& inst) {
    switch (cfg.detector) {
        case Detector::Zf:
            return zf_detect(inst.y, inst.h, qam);
        case Detector::Lmmse:
            return lmmse_detect(inst.y, inst.h, qam, inst.noise_var);
        default:
            break;
    }
    const QrFactors qr = qr_decompose(inst.h);
    const CVector x = herm_mul_vec(qr.q, inst.y);
    switch (cfg.detector) {
        case Detector::Ml:
            return ml_brute_force(x, qr.r, qam);
        case Detector::Sd:
            return sphere_detect(x, qr.r, qam);
        case Detector::Kbest:
            return kbest_detect(x, qr.r, qam, cfg.k);
        case Detector::Box:
            return box_detect(x, qr.r, qam, {PruneStrategy::None, cfg.box_size, cfg.box_size, 0});
        case Detector::BoxScp:
            return box_detect(x, qr.r, qam, {PruneStrategy::Scp, cfg.box_size, cfg.box_size, 0});
        case Detector::BoxIcp:
            return box_detect(x, qr.r, qam, {PruneStrategy::Icp, cfg.box_size, cfg.k, 0});
        default:
            return box_detect(x, qr.r, qam,
                              {PruneStrategy::Sicp, cfg.box_size, cfg.k, cfg.icp_layers});
    }
}

namespace {

struct Accum {
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t visited = 0;
    std::uint64_t ped_evals = 0;

    void merge(const Accum& o) {
        trials += o.trials;
        bit_errors += o.bit_errors;
        visited += o.visited;
        ped_evals += o.ped_evals;
    }
};

Accum run_range(const SimConfig& cfg, const Qam& qam, double snr_db, std::uint64_t first,
                std::uint64_t last) {
    Accum acc;
    for (std::uint64_t trial = first; trial < last; ++trial) {
        const ChannelInstance inst =
            draw_instance(cfg.n, qam, snr_db, SeedSpec{cfg.master_seed, trial});
        const DetectionResult res = detect_instance(cfg, qam, inst);
        std::uint64_t errors = 0;
        for (std::size_t b = 0; b < inst.tx_bits.size(); ++b)
            errors += inst.tx_bits[b] != res.bits[b];
        ++acc.trials;
        acc.bit_errors += errors;
        acc.visited += res.stats.visited_nodes;
        acc.ped_evals += res.stats.ped_evals;
    }
    return acc;
}

}  // namespace

std::vector<BerRecord> run_ber(const SimConfig& cfg) {
    validate_config(cfg);
    const Qam qam = make_qam(cfg.qam_order);
    const double bits_per_trial = static_cast<double>(cfg.n) * qam.bits_per_symbol;

    std::vector<BerRecord> records;
    records.reserve(cfg.snr_points.size());

    for (const double snr_db : cfg.snr_points) {
        Accum total;
        std::uint64_t next_trial = 0;
        while (next_trial < cfg.max_trials && total.bit_errors < cfg.min_bit_errors) {
            const std::uint64_t batch =
                std::min<std::uint64_t>(kBatchTrials, cfg.max_trials - next_trial);
            // Batch boundaries are fixed regardless of the worker count, so
            // the early-stop decision (and thus the trial count) never
            // depends on scheduling.
            if (cfg.workers <= 1 || batch < 2 * cfg.workers) {
                total.merge(run_range(cfg, qam, snr_db, next_trial, next_trial + batch));
            } else {
                std::vector<Accum> parts(cfg.workers);
                std::vector<std::thread> pool;
                pool.reserve(cfg.workers);
                for (unsigned w = 0; w < cfg.workers; ++w) {
                    const std::uint64_t lo = next_trial + batch * w / cfg.workers;
                    const std::uint64_t hi = next_trial + batch * (w + 1) / cfg.workers;
                    pool.emplace_back([&, w, lo, hi] { parts[w] = run_range(cfg, qam, snr_db, lo, hi); });
                }
                for (std::thread& t : pool) t.join();
                for (const Accum& p : parts) total.merge(p);
            }
            next_trial += batch;
        }

        BerRecord rec;
        rec.snr_db = snr_db;
        rec.detector = cfg.detector;
        rec.trials = total.trials;
        rec.bit_errors = total.bit_errors;
        rec.ber = static_cast<double>(total.bit_errors) / (static_cast<double>(total.trials) * bits_per_trial);
        rec.avg_visited_nodes = static_cast<double>(total.visited) / static_cast<double>(total.trials);
        rec.avg_ped_evals = static_cast<double>(total.ped_evals) / static_cast<double>(total.trials);
        rec.elapsed_seconds = 0.0;
        records.push_back(rec);
    }
    return records;
}

double interpolate_snr_at_ber(const std::vector<BerRecord>& records, double target_ber) {
    if (target_ber <= 0.0) throw std::invalid_argument("interpolate: target must be positive");
    for (const BerRecord& r : records)
        if (r.ber == target_ber) return r.snr_db;
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        const BerRecord& a = records[i];
        const BerRecord& b = records[i + 1];
        if (a.ber <= 0.0 || b.ber <= 0.0) continue;
        if ((a.ber - target_ber) * (b.ber - target_ber) > 0.0) continue;
        const double la = std::log10(a.ber);
        const double lb = std::log10(b.ber);
        const double lt = std::log10(target_ber);
        if (la == lb) return a.snr_db;
        return a.snr_db + (b.snr_db - a.snr_db) * (la - lt) / (la - lb);
    }
    throw NotBracketed("interpolate: records do not bracket the target BER");
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string csv_string(const std::vector<BerRecord>& records) {
    std::string out = kCsvHeader;
    out.push_back('\n');
    for (const BerRecord& r : records) {
        out += format_double(r.snr_db);
        out.push_back(',');
        out += detector_name(r.detector);
        out.push_back(',');
        out += std::to_string(r.trials);
        out.push_back(',');
        out += std::to_string(r.bit_errors);
        out.push_back(',');
        out += format_double(r.ber);
        out.push_back(',');
        out += format_double(r.avg_visited_nodes);
        out.push_back(',');
        out += format_double(r.avg_ped_evals);
        out.push_back(',');
        out += format_double(r.elapsed_seconds);
        out.push_back('\n');
    }
    return out;
}

void write_csv(const std::vector<BerRecord>& records, const std::string& path) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("write_csv: cannot open " + tmp.string());
        f << csv_string(records);
        if (!f.good()) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write_csv: write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace boxdet
