#include "boxdet/boxdec.hpp"

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

// Sign of d_a - d_b for the 2x2 cluster, expressed through delta1 only.
// The axis differences carry a positive factor r^2 * dq, the diagonal ones
// 2 r^2 * dq; both drop out of the sign.
double pair_sign(int a, int b, double re, double im, double dq) {
    if (a == b) return 0.0;
    if (a < b) return -pair_sign(b, a, re, im, dq);
    if (a == 2 && b == 1) return dq - 2.0 * im;
    if (a == 3 && b == 1) return dq - 2.0 * re;
    if (a == 4 && b == 1) return dq - re - im;
    if (a == 3 && b == 2) return im - re;
    if (a == 4 && b == 2) return dq - 2.0 * re;  // equals d3 - d1
    /* a == 4 && b == 3 */
    return dq - 2.0 * im;  // equals d2 - d1
}

}  // namespace

int metric1_select(Cx delta1, double delta_q) {
    const bool low_im = delta_q - 2.0 * delta1.imag() >= 0.0;  // d2 >= d1
    const bool low_re = delta_q - 2.0 * delta1.real() >= 0.0;  // d3 >= d1
    if (low_re) return low_im ? 1 : 2;
    return low_im ? 3 : 4;
}

std::array<int, 4> metric2_order(Cx delta1, double delta_q) {
    const double re = delta1.real();
    const double im = delta1.imag();
    std::array<int, 4> order{1, 2, 3, 4};
    // Insertion sort driven by the sign tests; stable, so an exact zero
    // leaves the lower index first.
    for (int i = 1; i < 4; ++i) {
        const int cur = order[i];
        int j = i;
        while (j > 0 && pair_sign(cur, order[j - 1], re, im, delta_q) < 0.0) {
            order[j] = order[j - 1];
            --j;
        }
        order[j] = cur;
    }
    return order;
}

double BoxCluster::candidate_ped(const Qam& qam, std::size_t idx) const {
    const Cx s = grid_point(qam, candidates[idx]);
    return d_parent + r_ii * r_ii * std::norm(a - s);
}

BoxCluster build_cluster(PathNode parent, std::size_t parent_index, Cx a, double r_ii,
                         const Qam& qam, unsigned box_size) {
    BoxCluster c;
    c.parent = std::move(parent);
    c.parent_index = parent_index;
    c.a = a;
    c.base = quantize_base(a, qam);
    c.delta1 = a - grid_point(qam, c.base);
    c.r_ii = r_ii;
    c.d_parent = c.parent.ped;
    c.window = box_window(a, qam, box_size);
    c.candidates.reserve(box_size);
    for (unsigned dr = 0; dr < c.window.side; ++dr)
        for (unsigned di = 0; di < c.window.side; ++di)
            c.candidates.push_back(
                GridIndex{c.window.re0 + static_cast<int>(dr), c.window.im0 + static_cast<int>(di)});
    c.interior = c.delta1.real() >= 0.0 && c.delta1.real() < qam.delta_q &&
                 c.delta1.imag() >= 0.0 && c.delta1.imag() < qam.delta_q;
    return c;
}

namespace {

// Candidate index (into cluster.candidates) of the Metric 1 winner: the
// corner of the base cell selected by the axis tests. The base cell always
// sits inside the window and always contains the grid point nearest to the
// reference, clamped or not.
std::size_t metric1_candidate(const BoxCluster& c, const Qam& qam, DetectorStats& stats) {
    const int pick = metric1_select(c.delta1, qam.delta_q);
    stats.comparisons += 2;
    const int re = c.base.re + (pick == 3 || pick == 4 ? 1 : 0);
    const int im = c.base.im + (pick == 2 || pick == 4 ? 1 : 0);
    return static_cast<std::size_t>(re - c.window.re0) * c.window.side +
           static_cast<std::size_t>(im - c.window.im0);
}

// Visit order for the merge: candidates in ascending squared distance to the
// reference. An interior 2x2 cluster uses the Metric 2 sign tests; clamped
// clusters and larger windows order by explicitly computed distances (pure
// grid geometry, no accumulated-metric evaluation).
std::vector<std::size_t> merge_order(const BoxCluster& c, const Qam& qam, DetectorStats& stats) {
    if (c.window.side == 2 && c.interior) {
        const std::array<int, 4> m2 = metric2_order(c.delta1, qam.delta_q);
        stats.comparisons += 5;
        // Window start equals base here, so Metric index b maps to window
        // slot b - 1 directly.
        std::vector<std::size_t> order(4);
        for (int t = 0; t < 4; ++t) order[t] = static_cast<std::size_t>(m2[t] - 1);
        return order;
    }
    std::vector<std::size_t> order(c.candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> dist(c.candidates.size());
    for (std::size_t i = 0; i < dist.size(); ++i)
        dist[i] = std::norm(c.a - grid_point(qam, c.candidates[i]));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return dist[l] < dist[r]; });
    return order;
}

PathNode extend_by_candidate(const BoxCluster& c, const Qam& qam, std::size_t idx, double ped) {
    PathNode child;
    child.decided = c.parent.decided;
    child.decided.push_back(grid_point(qam, c.candidates[idx]));
    child.ped = ped;
    return child;
}

}  // namespace

std::vector<PathNode> scp_prune(const std::vector<BoxCluster>& clusters, const Qam& qam,
                                DetectorStats& stats) {
    std::vector<PathNode> out;
    out.reserve(clusters.size());
    for (const BoxCluster& c : clusters) {
        const std::size_t idx = metric1_candidate(c, qam, stats);
        const double ped = c.candidate_ped(qam, idx);
        ++stats.ped_evals;
        ++stats.visited_nodes;
        out.push_back(extend_by_candidate(c, qam, idx, ped));
    }
    return out;
}

std::vector<PathNode> icp_select(const std::vector<BoxCluster>& clusters, unsigned k,
                                 const Qam& qam, DetectorStats& stats) {
    struct Head {
        double ped = 0.0;
        std::size_t pos = 0;  // position within the cluster's visit order
        bool active = false;
    };

    const std::size_t nc = clusters.size();
    std::vector<std::vector<std::size_t>> orders(nc);
    std::vector<Head> heads(nc);
    for (std::size_t ci = 0; ci < nc; ++ci) {
        orders[ci] = merge_order(clusters[ci], qam, stats);
        if (!orders[ci].empty()) {
            heads[ci].ped = clusters[ci].candidate_ped(qam, orders[ci][0]);
            heads[ci].active = true;
            ++stats.ped_evals;
            ++stats.visited_nodes;
        }
    }

    std::vector<PathNode> out;
    out.reserve(k);
    for (unsigned emitted = 0; emitted < k; ++emitted) {
        // Global minimum across the live heads; ties prefer the lower
        // candidate index, then the lower parent index.
        std::size_t best = nc;
        for (std::size_t ci = 0; ci < nc; ++ci) {
            if (!heads[ci].active) continue;
            if (best == nc) {
                best = ci;
                continue;
            }
            ++stats.comparisons;
            const Head& hb = heads[best];
            const Head& hc = heads[ci];
            const std::size_t cb = orders[best][hb.pos];
            const std::size_t cc = orders[ci][hc.pos];
            if (hc.ped < hb.ped ||
                (hc.ped == hb.ped &&
                 (cc < cb || (cc == cb && clusters[ci].parent_index < clusters[best].parent_index))))
                best = ci;
        }
        if (best == nc) break;  // every cluster exhausted

        const BoxCluster& c = clusters[best];
        out.push_back(extend_by_candidate(c, qam, orders[best][heads[best].pos], heads[best].ped));

        if (emitted + 1 == k) break;  // the last emission needs no replacement
        if (++heads[best].pos < orders[best].size()) {
            heads[best].ped = c.candidate_ped(qam, orders[best][heads[best].pos]);
            ++stats.ped_evals;
            ++stats.visited_nodes;
        } else {
            heads[best].active = false;
        }
    }
    return out;
}

namespace {

void validate_config(const PruneConfig& cfg, const Qam& qam, std::size_t n) {
    if (!is_power_of_four(cfg.box_size))
        throw std::invalid_argument("box_detect: box size must be a power of 4");
    if (cfg.box_size > qam.order)
        throw BoxLargerThanConstellation("box_detect: box size exceeds constellation order");
    if (cfg.strategy == PruneStrategy::Icp || cfg.strategy == PruneStrategy::Sicp) {
        if (cfg.survivors != cfg.box_size)
            throw std::invalid_argument("box_detect: ICP/SICP require survivors == box size");
        if (n < 2) throw std::invalid_argument("box_detect: ICP requires N >= 2");
    }
    if (cfg.strategy == PruneStrategy::Sicp &&
        (cfg.icp_layers < 1 || cfg.icp_layers > n - 2))
        throw std::invalid_argument("box_detect: SICP needs 1 <= m <= N - 2");
    if (cfg.strategy == PruneStrategy::None) {
        double paths = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            paths *= cfg.box_size;
            if (paths > 1e7) throw SearchSpaceTooLarge("box_detect: B^N exceeds 10^7");
        }
    }
}

// Expands every candidate of the cluster. Leaf-layer children count as
// visited (their metric feeds the final selection); other layers only count
// when `count_visits` is set (root expansion under a pruning strategy).
void expand_all(const BoxCluster& c, const Qam& qam, bool leaf, bool count_visits,
                DetectorStats& stats, std::vector<PathNode>& out) {
    for (std::size_t idx = 0; idx < c.candidates.size(); ++idx) {
        const double ped = c.candidate_ped(qam, idx);
        ++stats.ped_evals;
        if (leaf || count_visits) ++stats.visited_nodes;
        out.push_back(extend_by_candidate(c, qam, idx, ped));
    }
}

}  // namespace

DetectionResult box_detect(const CVector& x, const CMatrix& r, const Qam& qam,
                           const PruneConfig& cfg) {
    const std::size_t n = r.rows;
    validate_config(cfg, qam, n);
    if (min_r_diagonal(r) < kSingularDiagonal)
        throw SingularChannel("box_detect: singular triangular factor");

    DetectorStats stats;
    const unsigned B = cfg.box_size;
    const unsigned K = cfg.survivors;

    auto clusters_for = [&](const std::vector<PathNode>& parents,
                            std::size_t row) -> std::vector<BoxCluster> {
        std::vector<BoxCluster> cl;
        cl.reserve(parents.size());
        const double rii = r(row, row).real();
        for (std::size_t p = 0; p < parents.size(); ++p) {
            Cx xi = x[row];
            for (std::size_t t = 0; t < parents[p].decided.size(); ++t)
                xi -= r(row, n - 1 - t) * parents[p].decided[t];
            cl.push_back(build_cluster(parents[p], p, xi / rii, rii, qam, B));
        }
        return cl;
    };

    // Root layer: one cluster around x_N / r(N,N); all B candidates survive.
    // Under a pruning strategy the root metrics feed the layer selection and
    // count as visits; without pruning only leaf metrics are selected on.
    const bool pruned = cfg.strategy != PruneStrategy::None;
    std::vector<PathNode> survivors;
    {
        const std::vector<BoxCluster> root = clusters_for({PathNode{}}, n - 1);
        expand_all(root[0], qam, /*leaf=*/n == 1, /*count_visits=*/pruned && n > 1, stats,
                   survivors);
    }

    for (std::size_t layer = 1; layer < n; ++layer) {
        const std::size_t row = n - 1 - layer;
        const bool leaf = layer == n - 1;
        const std::vector<BoxCluster> clusters = clusters_for(survivors, row);

        bool use_icp = false;
        if (cfg.strategy == PruneStrategy::Icp) use_icp = !leaf;
        if (cfg.strategy == PruneStrategy::Sicp) use_icp = layer <= cfg.icp_layers && !leaf;

        if (cfg.strategy == PruneStrategy::None) {
            std::vector<PathNode> next;
            next.reserve(clusters.size() * B);
            for (const BoxCluster& c : clusters)
                expand_all(c, qam, leaf, /*count_visits=*/false, stats, next);
            survivors = std::move(next);
        } else if (use_icp) {
            survivors = icp_select(clusters, K, qam, stats);
        } else {
            // SCP layers, and the leaf layer of ICP/SICP: only each cluster's
            // Metric 1 winner can carry the global minimum, so one visit per
            // cluster suffices.
            survivors = scp_prune(clusters, qam, stats);
        }
    }

    const PathNode* best = &survivors.front();
    for (const PathNode& leaf : survivors) {
        ++stats.comparisons;
        if (leaf.ped < best->ped ||
            (leaf.ped == best->ped && path_less(leaf.decided, best->decided)))
            best = &leaf;
    }
    return result_from_path(*best, qam, stats);
}

}  // namespace boxdet
