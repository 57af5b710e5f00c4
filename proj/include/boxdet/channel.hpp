// boxdet/channel.hpp
//
// Random instance generation: i.i.d. Rayleigh channel, uniform symbol draws
// and AWGN at a configured SNR. Every instance is a pure function of
// (master_seed, trial_index), so trials can be generated in any order and on
// any number of workers with identical results.

#pragma once

#include <cstdint>

#include "boxdet/constellation.hpp"
#include "boxdet/numerics.hpp"

namespace boxdet {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

struct ChannelInstance {
    CMatrix h;        // i.i.d. CN(0, 1) entries
    CVector s;        // transmitted constellation points
    BitVec tx_bits;   // bits behind s, symbol by symbol
    CVector y;        // h * s + w
    double snr_db = 0.0;
    double noise_var = 0.0;  // per complex entry of w
};

// Counter-based generator (Philox 4x32-10). The key carries the master seed;
// the counter carries (block, attempt, trial index), so streams for distinct
// trials and redraw attempts never collide.
class CounterRng {
public:
    CounterRng(std::uint64_t master_seed, std::uint64_t trial_index, std::uint32_t attempt = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    double next_unit();        // uniform in [0, 1)
    double next_gaussian();    // standard normal (Box-Muller)
    Cx next_cgaussian(double variance);  // circularly symmetric, E|z|^2 = variance

private:
    void refill();

    std::uint32_t key0_, key1_;
    std::uint32_t trial_lo_, trial_hi_, attempt_;
    std::uint32_t block_ = 0;
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int avail_ = 0;
    bool have_cached_gaussian_ = false;
    double cached_gaussian_ = 0.0;
};

// noise_var = n / 10^(snr_db / 10) under unit average symbol energy; an
// snr_db of +infinity is the noiseless sentinel (y = h * s exactly).
double noise_variance(unsigned n, double snr_db);

// Draws h, the transmitted bits/symbols and the noise for one trial. Channel
// draws whose R factor has a near-zero diagonal are rejected and redrawn from
// a derived attempt stream, so the returned h always admits a usable QR.
ChannelInstance draw_instance(unsigned n, const Qam& qam, double snr_db, SeedSpec seed);

}  // namespace boxdet
