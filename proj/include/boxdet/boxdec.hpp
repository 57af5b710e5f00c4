// boxdet/boxdec.hpp
//
// Box decoding tree search. Each layer quantizes the interference-canceled
// zero-forcing reference onto the QAM grid and expands a fixed candidate
// window ("box cluster") around it. Candidates inside a cluster share the
// parent metric and the diagonal factor, so their metric order is decided by
// sign tests on the offset delta1 = a - s1 alone:
//
//   s2 s4          s1 = lower-left cell corner (the quantized base)
//   s1 s3          s2 = s1 + j dq, s3 = s1 + dq, s4 = s1 + dq + j dq
//
// Metric 1 locates the cluster minimum with two axis tests; Metric 2 orders
// all four candidates with the axis tests plus two diagonal tests. Three
// pruning strategies build on them: SCP keeps one child per cluster, ICP
// merges pre-ordered clusters into the K globally best children, and SICP_m
// runs ICP on the first m layers after the root and SCP afterwards.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "boxdet/constellation.hpp"
#include "boxdet/detectors.hpp"

namespace boxdet {

enum class PruneStrategy { None, Scp, Icp, Sicp };

struct PruneConfig {
    PruneStrategy strategy = PruneStrategy::None;
    unsigned box_size = 4;    // B: power of 4, at most the QAM order
    unsigned survivors = 4;   // K: must equal box_size for Icp/Sicp
    unsigned icp_layers = 0;  // m: Sicp only, 1 <= m <= N - 2
};

// One parent's candidate window at a layer. delta1 lies in [0, delta_q)^2
// exactly when the base cell was not clamped at the grid edge; `interior`
// records that.
struct BoxCluster {
    PathNode parent;
    std::size_t parent_index = 0;
    Cx a;                // reference point x'_i / r(i,i)
    GridIndex base;      // lower-left corner of the cell containing a
    Cx delta1;           // a - value(base)
    double r_ii = 0.0;
    double d_parent = 0.0;
    BoxWindow window;
    std::vector<GridIndex> candidates;  // window points, re offset outer
    bool interior = true;

    double candidate_ped(const Qam& qam, std::size_t idx) const;
};

BoxCluster build_cluster(PathNode parent, std::size_t parent_index, Cx a, double r_ii,
                         const Qam& qam, unsigned box_size);

// Metric 1: index in {1..4} of the minimum-metric candidate of a 2x2 cluster
// from two axis sign tests; an exact zero resolves to the lower index.
int metric1_select(Cx delta1, double delta_q);

// Metric 2: the metric-ascending order of the 2x2 cluster from the two axis
// tests and the two diagonal tests; ties resolve to the lower index.
std::array<int, 4> metric2_order(Cx delta1, double delta_q);

// SCP: per cluster, extend the parent by the Metric 1 winner; only the
// winner's metric is evaluated (one visit per cluster).
std::vector<PathNode> scp_prune(const std::vector<BoxCluster>& clusters, const Qam& qam,
                                DetectorStats& stats);

// ICP: multiway merge over pre-ordered clusters. Each cluster head costs one
// metric evaluation, each emission advances one cluster, so emitting k
// children from k clusters costs 2k - 1 evaluations. Output is metric-sorted;
// exhausted clusters are skipped.
std::vector<PathNode> icp_select(const std::vector<BoxCluster>& clusters, unsigned k,
                                 const Qam& qam, DetectorStats& stats);

// Full detection under the configured strategy. Visited-node accounting
// matches the closed forms reported by simkit::visited_formula exactly.
DetectionResult box_detect(const CVector& x, const CMatrix& r, const Qam& qam,
                           const PruneConfig& cfg);

}  // namespace boxdet
