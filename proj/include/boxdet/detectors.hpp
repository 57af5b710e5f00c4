// boxdet/detectors.hpp
//
// Baseline detectors behind a single result type: ZF, LMMSE, brute-force ML,
// depth-first sphere decoding (exact ML) and sorting-based K-Best, plus the
// accumulated-distance recursion they share with the box decoder.

#pragma once

#include <cstdint>

#include "boxdet/constellation.hpp"
#include "boxdet/numerics.hpp"

namespace boxdet {

// Per-call counters. visited_nodes counts candidates whose accumulated
// distance entered a pruning, sorting or final-selection stage; ped_evals
// counts every accumulated-distance evaluation; comparisons counts the sign
// tests and explicit metric comparisons performed by the selection logic.
struct DetectorStats {
    std::uint64_t visited_nodes = 0;
    std::uint64_t ped_evals = 0;
    std::uint64_t comparisons = 0;
};

struct DetectionResult {
    CVector symbols;       // transmit order: symbols[0] is layer 1
    BitVec bits;           // concatenated per-symbol bits, symbols[0] first
    double final_metric = 0.0;
    DetectorStats stats;
};

// Partial decision path. decided.front() is the layer-N symbol; a node with
// k decided symbols sits at layer N - k + 1. ped accumulates the squared
// residuals of the triangularized system and never decreases along a path.
struct PathNode {
    CVector decided;
    double ped = 0.0;
};

// Extends `node` by one layer decision. With k symbols already decided the
// extension targets layer i = N - k, adding
//   | x_i - sum_{j>i} r(i,j) s_j - r(i,i) * candidate |^2.
PathNode ped_extend(const PathNode& node, const CVector& x, const CMatrix& r, Cx candidate);

// Linear receivers. Both quantize per coordinate to the nearest grid point.
DetectionResult zf_detect(const CVector& y, const CMatrix& h, const Qam& qam);
DetectionResult lmmse_detect(const CVector& y, const CMatrix& h, const Qam& qam, double noise_var);

// Exhaustive argmin of || x - R s ||^2 over the full symbol space. Guarded:
// throws SearchSpaceTooLarge when A^N > 10^7. Ties resolve to the
// lexicographically smallest grid-index path (layer N first).
DetectionResult ml_brute_force(const CVector& x, const CMatrix& r, const Qam& qam);

// Depth-first search with infinite initial radius and nearest-first child
// enumeration; returns the exact ML decision with the same tie rule.
DetectionResult sphere_detect(const CVector& x, const CMatrix& r, const Qam& qam);

// Breadth-first search keeping the k lowest-metric paths per layer via a
// stable full sort; ties keep (parent, grid index) expansion order.
DetectionResult kbest_detect(const CVector& x, const CMatrix& r, const Qam& qam, unsigned k);

// Shared helpers for tree detectors.
double min_r_diagonal(const CMatrix& r);
DetectionResult result_from_path(const PathNode& leaf, const Qam& qam, DetectorStats stats);
bool path_less(const CVector& a, const CVector& b);  // (re, im) lexicographic per layer

}  // namespace boxdet
