#include "boxdet/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "boxdet/errors.hpp"

namespace boxdet {

namespace {

// Philox 4x32 round constants.
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t c1 = ctr[1];
    const std::uint32_t c3 = ctr[3];
    ctr[0] = hi1 ^ c1 ^ k0;
    ctr[1] = lo1;
    ctr[2] = hi0 ^ c3 ^ k1;
    ctr[3] = lo0;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t trial_index, std::uint32_t attempt)
    : key0_(static_cast<std::uint32_t>(master_seed)),
      key1_(static_cast<std::uint32_t>(master_seed >> 32)),
      trial_lo_(static_cast<std::uint32_t>(trial_index)),
      trial_hi_(static_cast<std::uint32_t>(trial_index >> 32)),
      attempt_(attempt) {}

void CounterRng::refill() {
    std::uint32_t ctr[4] = {block_, attempt_, trial_lo_, trial_hi_};
    std::uint32_t k0 = key0_;
    std::uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out_[0] = ctr[0];
    out_[1] = ctr[1];
    out_[2] = ctr[2];
    out_[3] = ctr[3];
    avail_ = 4;
    ++block_;
}

std::uint32_t CounterRng::next_u32() {
    if (avail_ == 0) refill();
    return out_[4 - avail_--];
}

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double CounterRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
    if (have_cached_gaussian_) {
        have_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps the log finite
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_gaussian_ = radius * std::sin(angle);
    have_cached_gaussian_ = true;
    return radius * std::cos(angle);
}

Cx CounterRng::next_cgaussian(double variance) {
    const double sigma = std::sqrt(variance * 0.5);
    const double re = next_gaussian();
    const double im = next_gaussian();
    return Cx(sigma * re, sigma * im);
}

double noise_variance(unsigned n, double snr_db) {
    return static_cast<double>(n) / std::pow(10.0, snr_db / 10.0);
}

ChannelInstance draw_instance(unsigned n, const Qam& qam, double snr_db, SeedSpec seed) {
    if (n < 1) throw std::invalid_argument("draw_instance: n must be >= 1");
    const double nv = noise_variance(n, snr_db);

    for (std::uint32_t attempt = 0;; ++attempt) {
        CounterRng rng(seed.master_seed, seed.trial_index, attempt);

        ChannelInstance inst;
        inst.snr_db = snr_db;
        inst.noise_var = nv;

        inst.h = CMatrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) inst.h(i, j) = rng.next_cgaussian(1.0);

        inst.tx_bits.reserve(n * qam.bits_per_symbol);
        inst.s.reserve(n);
        BitVec group(qam.bits_per_symbol);
        for (unsigned sym = 0; sym < n; ++sym) {
            const std::uint64_t u = rng.next_u64();
            for (unsigned b = 0; b < qam.bits_per_symbol; ++b) {
                group[b] = static_cast<std::uint8_t>((u >> (qam.bits_per_symbol - 1 - b)) & 1u);
                inst.tx_bits.push_back(group[b]);
            }
            inst.s.push_back(bits_to_symbol(group, qam));
        }

        inst.y = mat_vec(inst.h, inst.s);
        for (std::size_t i = 0; i < n; ++i) inst.y[i] += rng.next_cgaussian(nv);

        try {
            (void)qr_decompose(inst.h);
        } catch (const SingularChannel&) {
            continue;  // redraw from the next attempt stream
        }
        return inst;
    }
}

}  // namespace boxdet
