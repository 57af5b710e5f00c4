// boxdet/simkit.hpp
//
// Monte Carlo BER harness with deterministic parallel execution, the
// closed-form visited-node counts, SNR interpolation at a target BER, and
// CSV record emission.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxdet/boxdec.hpp"
#include "boxdet/channel.hpp"

namespace boxdet {

// Enum order is also the CSV row order within one SNR point.
enum class Detector { Zf, Lmmse, Ml, Sd, Kbest, Box, BoxScp, BoxIcp, BoxSicp };

const char* detector_name(Detector d);
std::optional<Detector> detector_from_name(std::string_view name);

struct SimConfig {
    unsigned n = 4;
    unsigned qam_order = 16;
    Detector detector = Detector::Kbest;
    unsigned k = 4;          // K-Best list size / box survivors
    unsigned box_size = 4;   // B
    unsigned icp_layers = 1; // m, BoxSicp only
    std::vector<double> snr_points;  // dB, strictly increasing
    std::uint64_t master_seed = 0;
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_trials = 10'000'000;
    unsigned workers = 1;
};

// One (snr, detector) measurement. elapsed_seconds is reserved in the record
// schema and always written as 0: records must be byte-reproducible across
// runs and worker counts, so wall time is reported on the CLI summary
// instead.
struct BerRecord {
    double snr_db = 0.0;
    Detector detector = Detector::Zf;
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double avg_visited_nodes = 0.0;
    double avg_ped_evals = 0.0;
    double elapsed_seconds = 0.0;
};

// Throws std::invalid_argument on an inconsistent configuration.
void validate_config(const SimConfig& cfg);

// Closed-form visited-node count per detection call for the tree detectors.
// Throws UnsupportedDetector for Zf/Lmmse/Ml/Sd, which have no such form.
std::uint64_t visited_formula(Detector d, unsigned n, unsigned a, unsigned k, unsigned b,
                              unsigned m);

// Reference count (3K - 2) N for the distributed K-Best scheme; reported in
// complexity tables only, never simulated.
std::uint64_t dkb_visited_count(unsigned n, unsigned k);

// Runs one detector on a shared per-trial instance stream. Instances depend
// only on (master_seed, trial, snr, n, qam), so sweeps over different
// detectors with the same seed see identical channels and noise. Each SNR
// point stops after min_bit_errors accumulated errors (checked on fixed
// batch boundaries) or max_trials.
std::vector<BerRecord> run_ber(const SimConfig& cfg);

// Single detection on one instance under `cfg`, shared by the harness and
// the self-check suites.
DetectionResult detect_instance(const SimConfig& cfg, const Qam& qam,
                                const ChannelInstance& inst);

// SNR where log10(ber) crosses log10(target), linear in dB against log-BER,
// scanning adjacent record pairs in ascending SNR. Throws NotBracketed.
double interpolate_snr_at_ber(const std::vector<BerRecord>& records, double target_ber);

inline constexpr char kCsvHeader[] =
    "snr_db,detector,trials,bit_errors,ber,avg_visited_nodes,avg_ped_evals,elapsed_seconds";

std::string csv_string(const std::vector<BerRecord>& records);

// Writes header + records to `path` via a temporary file and rename, so a
// failed run never leaves a partial CSV behind.
void write_csv(const std::vector<BerRecord>& records, const std::string& path);

}  // namespace boxdet
