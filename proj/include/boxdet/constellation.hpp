// boxdet/constellation.hpp
//
// Square-QAM grids: construction, Gray bit mapping, floor quantization to
// the lower-left corner of a grid cell, and the fixed-size box candidate
// window used by the box decoder.

#pragma once

#include <cstdint>
#include <vector>

#include "boxdet/numerics.hpp"

namespace boxdet {

using BitVec = std::vector<std::uint8_t>;

// Square QAM descriptor. Per real dimension the unscaled grid is the odd
// integers {-(side-1), ..., -1, +1, ..., +(side-1)} with spacing 2; `scale`
// maps that grid to unit average symbol energy, so delta_q = 2 * scale and
// the coordinate span is span = (side - 1) * scale per dimension.
struct Qam {
    unsigned order = 0;            // A: number of constellation points
    unsigned side = 0;             // sqrt(A) levels per dimension
    unsigned bits_per_symbol = 0;  // log2(A)
    double scale = 0.0;            // 1 / sqrt(2 (A - 1) / 3)
    double delta_q = 0.0;          // grid spacing
    double span = 0.0;             // v: grid covers [-span, +span] per dimension
};

// Integer grid coordinates; (0, 0) is the lower-left constellation point and
// coordinate value = -span + index * delta_q per dimension.
struct GridIndex {
    int re = 0;
    int im = 0;
    friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

// (re, im) lexicographic order; used for deterministic tie breaking.
inline bool grid_index_less(GridIndex a, GridIndex b) {
    return a.re != b.re ? a.re < b.re : a.im < b.im;
}

// Supported orders: 4, 16, 64, 256. Throws UnsupportedOrder otherwise.
Qam make_qam(unsigned order);

Cx grid_point(const Qam& qam, GridIndex g);

// Binary-reflected Gray code helpers (per-dimension level <-> bit pattern).
unsigned gray_encode(unsigned index);
unsigned gray_decode(unsigned bits);

// bits are laid out [real-axis bits][imag-axis bits], MSB first within each
// half; per axis the level index carries the Gray pattern of its bits.
Cx bits_to_symbol(const BitVec& bits, const Qam& qam);
BitVec symbol_to_bits(Cx s, const Qam& qam);
void append_symbol_bits(Cx s, const Qam& qam, BitVec& out);

// Index of the lower-left corner of the grid cell containing `a`, clamped
// into [0, side-2] per dimension so an unshifted 2x2 box always fits.
GridIndex quantize_base(Cx a, const Qam& qam);

// Nearest constellation point to `a` (per-dimension rounding with clamping).
GridIndex nearest_point(Cx a, const Qam& qam);

// A sqrt(B) x sqrt(B) window of grid indices: [re0, re0+side) x [im0, im0+side).
struct BoxWindow {
    int re0 = 0;
    int im0 = 0;
    unsigned side = 0;
};

// Candidate window around quantize_base(a): offsets -sqrt(B)/2+1 .. sqrt(B)/2
// per dimension, with the whole window shifted inward when it would leave the
// grid. Throws BoxLargerThanConstellation when box_size > order.
BoxWindow box_window(Cx a, const Qam& qam, unsigned box_size);

// The window contents in enumeration order: re offset outer, im offset inner,
// both ascending. For box_size = 4 this is lower-left, above, right, diagonal.
std::vector<GridIndex> box_candidates(Cx a, const Qam& qam, unsigned box_size);

}  // namespace boxdet
