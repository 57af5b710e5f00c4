#include "boxdet/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boxdet/errors.hpp"

namespace boxdet {

namespace {

bool is_power_of_four(unsigned v) {
    if (v == 0) return false;
    while (v % 4 == 0) v /= 4;
    return v == 1;
}

unsigned int_sqrt(unsigned v) {
    unsigned s = static_cast<unsigned>(std::lround(std::sqrt(static_cast<double>(v))));
    while (s * s > v) --s;
    while ((s + 1) * (s + 1) <= v) ++s;
    return s;
}

unsigned int_log2(unsigned v) {
    unsigned b = 0;
    while ((1u << b) < v) ++b;
    return b;
}

}  // namespace

Qam make_qam(unsigned order) {
    if (!is_power_of_four(order) || order < 4 || order > 256)
        throw UnsupportedOrder("make_qam: order must be one of 4, 16, 64, 256");
    Qam q;
    q.order = order;
    q.side = int_sqrt(order);
    q.bits_per_symbol = int_log2(order);
    q.scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    q.delta_q = 2.0 * q.scale;
    q.span = (q.side - 1) * q.scale;
    return q;
}

Cx grid_point(const Qam& qam, GridIndex g) {
    return Cx(-qam.span + g.re * qam.delta_q, -qam.span + g.im * qam.delta_q);
}

unsigned gray_encode(unsigned index) { return index ^ (index >> 1); }

unsigned gray_decode(unsigned bits) {
    unsigned v = bits;
    v ^= v >> 1;
    v ^= v >> 2;
    v ^= v >> 4;
    return v;
}

namespace {

unsigned bits_to_level(const BitVec& bits, std::size_t offset, unsigned count) {
    unsigned g = 0;
    for (unsigned b = 0; b < count; ++b) g = (g << 1) | (bits[offset + b] ? 1u : 0u);
    return gray_decode(g);
}

void level_to_bits(unsigned level, unsigned count, BitVec& out) {
    const unsigned g = gray_encode(level);
    for (unsigned b = count; b-- > 0;) out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
}

int symbol_level(double coord, const Qam& qam) {
    const double t = (coord + qam.span) / qam.delta_q;
    const long idx = std::lround(t);
    if (idx < 0 || idx >= static_cast<long>(qam.side) || std::abs(t - static_cast<double>(idx)) > 1e-9)
        throw NotAConstellationPoint("symbol_to_bits: value is not a constellation point");
    return static_cast<int>(idx);
}

}  // namespace

Cx bits_to_symbol(const BitVec& bits, const Qam& qam) {
    if (bits.size() != qam.bits_per_symbol)
        throw std::invalid_argument("bits_to_symbol: wrong bit count");
    const unsigned half = qam.bits_per_symbol / 2;
    GridIndex g;
    g.re = static_cast<int>(bits_to_level(bits, 0, half));
    g.im = static_cast<int>(bits_to_level(bits, half, half));
    return grid_point(qam, g);
}

void append_symbol_bits(Cx s, const Qam& qam, BitVec& out) {
    const unsigned half = qam.bits_per_symbol / 2;
    level_to_bits(static_cast<unsigned>(symbol_level(s.real(), qam)), half, out);
    level_to_bits(static_cast<unsigned>(symbol_level(s.imag(), qam)), half, out);
}

BitVec symbol_to_bits(Cx s, const Qam& qam) {
    BitVec out;
    out.reserve(qam.bits_per_symbol);
    append_symbol_bits(s, qam, out);
    return out;
}

namespace {

int floor_cell(double coord, const Qam& qam) {
    const int raw = static_cast<int>(std::floor((coord + qam.span) / qam.delta_q));
    return std::clamp(raw, 0, static_cast<int>(qam.side) - 2);
}

int round_level(double coord, const Qam& qam) {
    const long raw = std::lround((coord + qam.span) / qam.delta_q);
    return static_cast<int>(std::clamp(raw, 0L, static_cast<long>(qam.side) - 1));
}

}  // namespace

GridIndex quantize_base(Cx a, const Qam& qam) {
    return GridIndex{floor_cell(a.real(), qam), floor_cell(a.imag(), qam)};
}

GridIndex nearest_point(Cx a, const Qam& qam) {
    return GridIndex{round_level(a.real(), qam), round_level(a.imag(), qam)};
}

BoxWindow box_window(Cx a, const Qam& qam, unsigned box_size) {
    if (box_size > qam.order)
        throw BoxLargerThanConstellation("box_window: box size exceeds constellation order");
    if (!is_power_of_four(box_size))
        throw std::invalid_argument("box_window: box size must be a power of 4");
    const int side_b = static_cast<int>(int_sqrt(box_size));
    const int max_start = static_cast<int>(qam.side) - side_b;
    const GridIndex base = quantize_base(a, qam);

    BoxWindow w;
    w.side = static_cast<unsigned>(side_b);
    // First offset is -sqrt(B)/2 + 1; shifting the start keeps all points on
    // the grid while preserving exactly B distinct candidates.
    w.re0 = std::clamp(base.re + 1 - side_b / 2, 0, max_start);
    w.im0 = std::clamp(base.im + 1 - side_b / 2, 0, max_start);
    return w;
}

std::vector<GridIndex> box_candidates(Cx a, const Qam& qam, unsigned box_size) {
    const BoxWindow w = box_window(a, qam, box_size);
    std::vector<GridIndex> out;
    out.reserve(box_size);
    for (unsigned dr = 0; dr < w.side; ++dr)
        for (unsigned di = 0; di < w.side; ++di)
            out.push_back(GridIndex{w.re0 + static_cast<int>(dr), w.im0 + static_cast<int>(di)});
    return out;
}

}  // namespace boxdet
